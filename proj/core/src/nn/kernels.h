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

#ifndef PSRLAB_NN_KERNELS_H_
#define PSRLAB_NN_KERNELS_H_

// Batch kernels behind the engine. All tensors are row-major NCHW or [B, F];
// backward kernels accumulate (+=) into their gradient outputs.

#include <cstddef>
#include <cstdint>

namespace psrlab::nn::kernels {

struct ConvGeometry {
  std::size_t batch, in_c, in_h, in_w;
  std::size_t out_c, kernel, stride, pad;
  std::size_t out_h, out_w;
};

void Conv2dForward(const ConvGeometry& g, const float* x, const float* weight,
                   const float* bias, float* y);
// Any of dx/dweight/dbias may be null to skip that gradient.
void Conv2dBackward(const ConvGeometry& g, const float* x, const float* weight,
                    const float* dy, float* dx, float* dweight, float* dbias);

void LinearForward(std::size_t batch, std::size_t in, std::size_t out,
                   const float* x, const float* weight, const float* bias,
                   float* y);
void LinearBackward(std::size_t batch, std::size_t in, std::size_t out,
                    const float* x, const float* weight, const float* dy,
                    float* dx, float* dweight, float* dbias);

// stats receives (mean, inv_std) per (sample, group), accumulated in double.
void GroupNormForward(std::size_t batch, std::size_t channels,
                      std::size_t spatial, std::size_t groups, double eps,
                      const float* x, const float* gamma, const float* beta,
                      float* y, double* stats);
void GroupNormBackward(std::size_t batch, std::size_t channels,
                       std::size_t spatial, std::size_t groups, const float* x,
                       const float* gamma, const double* stats,
                       const float* dy, float* dx, float* dgamma,
                       float* dbeta);

void MaxPoolForward(std::size_t batch, std::size_t channels, std::size_t h,
                    std::size_t w, std::size_t k, const float* x, float* y,
                    std::uint32_t* argmax);

}  // namespace psrlab::nn::kernels

#endif  // PSRLAB_NN_KERNELS_H_
