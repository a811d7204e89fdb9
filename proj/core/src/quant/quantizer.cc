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

#include "psrlab/quant/quantizer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psrlab/util/error.h"

namespace psrlab::quant {
namespace {

class RangeObserver : public nn::ActivationHook {
 public:
  explicit RangeObserver(std::size_t sites) : ranges_(sites), seen_(sites, false) {}

  void OnActivation(std::size_t site, nn::Tensor& values,
                    std::vector<std::uint8_t>*) override {
    const auto [lo, hi] = std::minmax_element(values.data().begin(), values.data().end());
    if (!seen_[site]) {
      ranges_[site] = {*lo, *hi};
      seen_[site] = true;
    } else {
      ranges_[site].min = std::min(ranges_[site].min, *lo);
      ranges_[site].max = std::max(ranges_[site].max, *hi);
    }
  }

  std::vector<Range> ranges() const { return ranges_; }

 private:
  std::vector<Range> ranges_;
  std::vector<bool> seen_;
};

}  // namespace

std::int8_t QuantParams::Quantize(float v) const {
  const double q = std::nearbyint(static_cast<double>(v) / scale) + zero_point;
  return static_cast<std::int8_t>(std::clamp(q, -128.0, 127.0));
}

float QuantParams::Dequantize(std::int8_t q) const {
  return static_cast<float>((static_cast<double>(q) - zero_point) * scale);
}

float QuantParams::RoundTrip(float v, bool* saturated) const {
  const double q = std::nearbyint(static_cast<double>(v) / scale) + zero_point;
  if (saturated != nullptr) *saturated = q < -128.0 || q > 127.0;
  return static_cast<float>((std::clamp(q, -128.0, 127.0) - zero_point) * scale);
}

QuantParams ParamsForRange(float min, float max) {
  Require(std::isfinite(min) && std::isfinite(max) && min <= max,
          ErrorCode::kNonFinite, "bad quantization range");
  if (min == max) {
    QuantParams p;
    p.scale = std::max(std::abs(min), 1e-8f) / 127.0f;
    p.zero_point = 0;
    return p;
  }
  const double lo = std::min(0.0f, min);
  const double hi = std::max(0.0f, max);
  QuantParams p;
  p.scale = static_cast<float>((hi - lo) / 255.0);
  p.zero_point = static_cast<std::int32_t>(
      std::clamp(std::nearbyint(-128.0 - lo / p.scale), -128.0, 127.0));
  return p;
}

QuantizedTensor QuantizeTensor(const nn::Tensor& t) {
  Require(t.AllFinite(), ErrorCode::kNonFinite, "cannot quantize non-finite weights");
  const auto [lo, hi] = std::minmax_element(t.data().begin(), t.data().end());
  QuantizedTensor q;
  q.params = ParamsForRange(*lo, *hi);
  q.codes.reserve(t.size());
  for (float v : t.data()) q.codes.push_back(q.params.Quantize(v));
  return q;
}

nn::Tensor DequantizeTensor(const QuantizedTensor& q, const nn::Shape& shape) {
  std::vector<float> values;
  values.reserve(q.codes.size());
  for (std::int8_t c : q.codes) values.push_back(q.params.Dequantize(c));
  return nn::Tensor(shape, std::move(values));
}

ActivationRanges CalibrateRanges(const nn::Model& model,
                                 const data::DataSet& calibration,
                                 std::size_t batch_size) {
  Require(!calibration.empty(), ErrorCode::kInvalidArgument,
          "calibration set is empty");
  Require(batch_size > 0, ErrorCode::kInvalidArgument, "batch size is 0");
  RangeObserver observer(model.num_sites());
  for (std::size_t begin = 0; begin < calibration.size(); begin += batch_size) {
    const std::size_t end = std::min(calibration.size(), begin + batch_size);
    nn::Forward(model, calibration.images.Slice(begin, end), nullptr, &observer);
  }
  return {observer.ranges()};
}

void FakeQuantHook::OnActivation(std::size_t site, nn::Tensor& values,
                                 std::vector<std::uint8_t>* pass) {
  Require(site < sites_.size(), ErrorCode::kInvalidArgument,
          "no calibrated range for activation site " + std::to_string(site));
  const QuantParams& p = sites_[site];
  for (std::size_t e = 0; e < values.size(); ++e) {
    bool saturated = false;
    values[e] = p.RoundTrip(values[e], &saturated);
    if (pass != nullptr && saturated) (*pass)[e] = 0;
  }
}

QuantizedModel::QuantizedModel(const nn::Model& model, const ActivationRanges& ranges)
    : dequantized_(model), ranges_(ranges) {
  Require(ranges.sites.size() == model.num_sites(), ErrorCode::kInvalidArgument,
          "activation ranges cover " + std::to_string(ranges.sites.size()) +
              " sites, model has " + std::to_string(model.num_sites()));
  nn::ParameterStore& params = dequantized_.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    weights_.push_back(QuantizeTensor(params.at(i)));
    params.at(i) = DequantizeTensor(weights_.back(), params.at(i).shape());
  }
  std::vector<QuantParams> sites;
  for (const Range& r : ranges.sites) sites.push_back(ParamsForRange(r.min, r.max));
  hook_ = FakeQuantHook(std::move(sites));
}

QuantizedModel QuantizeModel(const nn::Model& model, const ActivationRanges& ranges) {
  return QuantizedModel(model, ranges);
}

nn::Container QuantizedModel::ToContainer() const {
  nn::Container c;
  c.tensors.push_back(
      nn::StoredTensor::Text(nn::kModelDescriptionKey, nn::DescribeModel(dequantized_)));
  const nn::ParameterStore& params = dequantized_.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<std::uint32_t> dims;
    for (std::size_t d : params.at(i).shape()) dims.push_back(static_cast<std::uint32_t>(d));
    c.tensors.push_back(nn::StoredTensor::Int8(params.name(i), dims, weights_[i].codes));
    c.tensors.push_back(nn::StoredTensor::Float(
        params.name(i) + ".qparams",
        nn::Tensor({2}, {weights_[i].params.scale,
                         static_cast<float>(weights_[i].params.zero_point)})));
  }
  std::vector<float> table;
  for (const Range& r : ranges_.sites) {
    table.push_back(r.min);
    table.push_back(r.max);
  }
  c.tensors.push_back(nn::StoredTensor::Float(
      kActivationRangesKey, nn::Tensor({ranges_.sites.size(), 2}, std::move(table))));
  return c;
}

QuantizedModel QuantizedModel::FromContainer(const nn::Container& c) {
  QuantizedModel q;
  q.dequantized_ = nn::ModelFromDescription(c.Get(nn::kModelDescriptionKey).ToText());
  nn::ParameterStore& params = q.dequantized_.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const nn::StoredTensor& codes = c.Get(params.name(i));
    Require(codes.dtype == nn::DType::kI8 && codes.i8.size() == params.at(i).size(),
            ErrorCode::kFormat, "bad int8 tensor '" + params.name(i) + "'");
    const nn::Tensor qp = c.Get(params.name(i) + ".qparams").ToTensor();
    Require(qp.size() == 2 && qp[0] > 0.0f, ErrorCode::kFormat,
            "bad quantization parameters for '" + params.name(i) + "'");
    QuantizedTensor t{codes.i8, {qp[0], static_cast<std::int32_t>(qp[1])}};
    params.at(i) = DequantizeTensor(t, params.at(i).shape());
    q.weights_.push_back(std::move(t));
  }
  const nn::Tensor table = c.Get(kActivationRangesKey).ToTensor();
  Require(table.rank() == 2 && table.dim(1) == 2 &&
              table.dim(0) == q.dequantized_.num_sites(),
          ErrorCode::kFormat, "activation range table does not match the model");
  std::vector<QuantParams> sites;
  for (std::size_t s = 0; s < table.dim(0); ++s) {
    q.ranges_.sites.push_back({table[2 * s], table[2 * s + 1]});
    sites.push_back(ParamsForRange(table[2 * s], table[2 * s + 1]));
  }
  q.hook_ = FakeQuantHook(std::move(sites));
  return q;
}

bool IsQuantizedContainer(const nn::Container& c) {
  return c.Find(kActivationRangesKey) != nullptr;
}

std::size_t ModelSizeBytes(const nn::Model& model) {
  return 4 * model.params().TotalElements();
}

std::size_t ModelSizeBytes(const QuantizedModel& model) {
  return model.dequantized().params().TotalElements() + 5 * model.weights().size() +
         8 * model.ranges().sites.size();
}

}  // namespace psrlab::quant
