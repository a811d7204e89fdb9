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

#ifndef PSRLAB_DATA_SYNTHETIC_H_
#define PSRLAB_DATA_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>

#include "psrlab/data/dataset.h"

namespace psrlab::data {

struct SyntheticSpec {
  std::size_t n_classes = 10;
  std::size_t n_per_class = 100;
  std::size_t image_size = 12;
  // Half-width of the additive uniform pixel noise.
  double noise_level = 0.1;
  // Foreground/background intensity gap, centred on 0.5.
  double contrast = 1.0;
  std::uint64_t seed = 0;
};

// Grayscale procedural shapes, one per class: disk, square, plus, horizontal
// bars, vertical bars, diagonal, anti-diagonal, ring, triangle, X. Each
// sample gets random position and size jitter plus uniform noise, clamped to
// [0, 1]. Samples are ordered class by class. Throws kInvalidArgument for
// n_classes outside [2, 10] or an image smaller than 6 pixels.
DataSet GenerateSynthetic(const SyntheticSpec& spec);

}  // namespace psrlab::data

#endif  // PSRLAB_DATA_SYNTHETIC_H_
