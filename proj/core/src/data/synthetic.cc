// Copyright 2026 The PSR-Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "psrlab/data/synthetic.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "psrlab/util/error.h"
#include "psrlab/util/rng.h"

namespace psrlab::data {
namespace {

// Shape membership for offsets (dx, dy) from the centre, radius r and stroke
// half-width t.
bool InShape(std::size_t cls, double dx, double dy, double r, double t) {
  const double ax = std::abs(dx);
  const double ay = std::abs(dy);
  const bool in_box = ax <= r && ay <= r;
  const double dist = std::hypot(dx, dy);
  switch (cls) {
    case 0:
      return dist <= r;
    case 1:
      return ax <= 0.8 * r && ay <= 0.8 * r;
    case 2:
      return in_box && (ax <= t || ay <= t);
    case 3:
      return in_box && static_cast<long>(std::floor((dy + r) / (2.0 * t))) % 2 == 0;
    case 4:
      return in_box && static_cast<long>(std::floor((dx + r) / (2.0 * t))) % 2 == 0;
    case 5:
      return in_box && std::abs(dx - dy) <= 1.2 * t;
    case 6:
      return in_box && std::abs(dx + dy) <= 1.2 * t;
    case 7:
      return dist <= r && dist >= r - 2.0 * t;
    case 8:
      return dy <= r && dy >= -r && ax <= 0.5 * (dy + r);
    case 9:
      return in_box && (std::abs(dx - dy) <= t || std::abs(dx + dy) <= t);
    default:
      return false;
  }
}

}  // namespace

DataSet GenerateSynthetic(const SyntheticSpec& spec) {
  Require(spec.n_classes >= 2 && spec.n_classes <= 10,
          ErrorCode::kInvalidArgument,
          "synthetic data supports 2..10 classes, got " +
              std::to_string(spec.n_classes));
  Require(spec.image_size >= 6, ErrorCode::kInvalidArgument,
          "synthetic images must be at least 6 pixels wide");
  Require(spec.n_per_class >= 1, ErrorCode::kInvalidArgument,
          "n_per_class must be >= 1");
  Require(spec.noise_level >= 0.0 && spec.contrast > 0.0 && spec.contrast <= 1.0,
          ErrorCode::kInvalidArgument, "bad noise level or contrast");

  const std::size_t s = spec.image_size;
  const std::size_t n = spec.n_classes * spec.n_per_class;
  const double size = static_cast<double>(s);
  const double jitter = std::max(1.0, std::floor(size / 6.0));
  const double lo = 0.5 - 0.5 * spec.contrast;
  const double hi = 0.5 + 0.5 * spec.contrast;

  std::vector<float> pixels(n * s * s);
  DataSet ds;
  ds.labels.reserve(n);
  Rng rng(DeriveSeed(spec.seed, {0x5e7}));
  std::size_t sample = 0;
  for (std::size_t cls = 0; cls < spec.n_classes; ++cls) {
    for (std::size_t j = 0; j < spec.n_per_class; ++j, ++sample) {
      const double cx = (size - 1.0) / 2.0 +
                        std::round(rng.Uniform(-jitter, jitter));
      const double cy = (size - 1.0) / 2.0 +
                        std::round(rng.Uniform(-jitter, jitter));
      const double r = size * rng.Uniform(0.26, 0.34);
      const double t = std::max(0.75, size / 14.0);
      float* img = pixels.data() + sample * s * s;
      for (std::size_t y = 0; y < s; ++y) {
        for (std::size_t x = 0; x < s; ++x) {
          const bool on = InShape(cls, static_cast<double>(x) - cx,
                                  static_cast<double>(y) - cy, r, t);
          double v = on ? hi : lo;
          if (spec.noise_level > 0.0) {
            v += rng.Uniform(-spec.noise_level, spec.noise_level);
          }
          img[y * s + x] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
      ds.labels.push_back(cls);
    }
  }
  ds.images = nn::Tensor({n, 1, s, s}, std::move(pixels));
  ds.n_classes = spec.n_classes;
  std::ostringstream prov;
  prov << "synthetic(seed=" << spec.seed << ")";
  ds.provenance = prov.str();
  return ds;
}

}  // namespace psrlab::data
