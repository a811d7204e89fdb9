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

#ifndef PSRLAB_QUANT_QUANTIZER_H_
#define PSRLAB_QUANT_QUANTIZER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "psrlab/data/dataset.h"
#include "psrlab/nn/checkpoint.h"
#include "psrlab/nn/classifier.h"
#include "psrlab/nn/engine.h"
#include "psrlab/nn/model.h"

namespace psrlab::quant {

// Affine signed 8-bit mapping: q = clamp(round(v / scale) + zero_point),
// v' = (q - zero_point) * scale.
struct QuantParams {
  float scale = 1.0f;
  std::int32_t zero_point = 0;

  std::int8_t Quantize(float v) const;
  float Dequantize(std::int8_t q) const;
  // Quantize then dequantize; `saturated` reports clamping.
  float RoundTrip(float v, bool* saturated = nullptr) const;
};

// Min/max observer parameters. The range is widened to contain zero; a
// degenerate range falls back to a symmetric scale max(|v|, 1e-8) / 127.
QuantParams ParamsForRange(float min, float max);

struct Range {
  float min = 0.0f;
  float max = 0.0f;
};

// Calibrated value range for every activation site of a model (site 0 is
// the input, site i + 1 the output of layer i).
struct ActivationRanges {
  std::vector<Range> sites;
};

// One deterministic forward sweep over `calibration` recording running
// per-site extrema. Throws kInvalidArgument on an empty calibration set.
ActivationRanges CalibrateRanges(const nn::Model& model,
                                 const data::DataSet& calibration,
                                 std::size_t batch_size = 64);

struct QuantizedTensor {
  std::vector<std::int8_t> codes;
  QuantParams params;
};

QuantizedTensor QuantizeTensor(const nn::Tensor& t);
nn::Tensor DequantizeTensor(const QuantizedTensor& q, const nn::Shape& shape);

// Fake-quantization hook: rounds every activation through its site's int8
// grid. Gradients pass straight through inside the range and stop where the
// value saturated.
class FakeQuantHook : public nn::ActivationHook {
 public:
  FakeQuantHook() = default;
  explicit FakeQuantHook(std::vector<QuantParams> sites) : sites_(std::move(sites)) {}
  void OnActivation(std::size_t site, nn::Tensor& values,
                    std::vector<std::uint8_t>* pass) override;
  const std::vector<QuantParams>& sites() const { return sites_; }

 private:
  std::vector<QuantParams> sites_;
};

class QuantizedModel {
 public:
  // Per-tensor int8 weights and per-site activation parameters. Throws
  // kNonFinite for non-finite weights and kInvalidArgument when the ranges
  // do not cover every activation site.
  QuantizedModel(const nn::Model& model, const ActivationRanges& ranges);

  const nn::Model& dequantized() const { return dequantized_; }
  const std::vector<QuantizedTensor>& weights() const { return weights_; }
  const ActivationRanges& ranges() const { return ranges_; }
  const std::string& architecture_id() const { return dequantized_.architecture_id(); }

  // Fake-quant inference view; attacks use its straight-through gradients.
  nn::Classifier classifier() const { return nn::Classifier(dequantized_, &hook_); }
  nn::Tensor Forward(const nn::Tensor& x) const { return classifier().Logits(x); }

  nn::Container ToContainer() const;
  static QuantizedModel FromContainer(const nn::Container& c);

 private:
  QuantizedModel() : dequantized_("", {1}, 1) {}

  nn::Model dequantized_;
  std::vector<QuantizedTensor> weights_;
  ActivationRanges ranges_;
  mutable FakeQuantHook hook_;
};

QuantizedModel QuantizeModel(const nn::Model& model, const ActivationRanges& ranges);

// Parameter memory: 4 bytes per float parameter; for the quantized model 1
// byte per parameter, 5 bytes (scale + zero point) per tensor and 8 bytes
// (min + max) per activation site.
std::size_t ModelSizeBytes(const nn::Model& model);
std::size_t ModelSizeBytes(const QuantizedModel& model);

inline constexpr const char* kActivationRangesKey = "quant.activation_ranges";

bool IsQuantizedContainer(const nn::Container& c);

}  // namespace psrlab::quant

#endif  // PSRLAB_QUANT_QUANTIZER_H_
