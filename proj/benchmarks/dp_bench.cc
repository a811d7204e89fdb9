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


#include <vector>

#include "benchmark/benchmark.h"
#include "psrlab/dp/mechanism.h"
#include "psrlab/dp/rdp_accountant.h"
#include "psrlab/util/rng.h"

namespace psrlab::dp {
namespace {

void BM_RdpSubsampledGaussian(benchmark::State& state) {
  const int alpha = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(RdpSubsampledGaussian(0.01, 1.1, alpha));
}
BENCHMARK(BM_RdpSubsampledGaussian)->Arg(2)->Arg(32)->Arg(256);

void BM_EpsilonFor(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(EpsilonFor(0.01, 1.1, 10000, 1e-5));
}
BENCHMARK(BM_EpsilonFor);

void BM_CalibrateSigma(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(CalibrateSigma(3.4, 1e-5, 0.01, 10000));
}
BENCHMARK(BM_CalibrateSigma)->Unit(benchmark::kMillisecond);

void BM_ClipAndAggregate(benchmark::State& state) {
  const std::size_t dim = state.range(0);
  Rng rng(3);
  std::vector<std::vector<float>> base(64, std::vector<float>(dim));
  for (auto& g : base) {
    for (float& v : g) v = static_cast<float>(rng.Normal());
  }
  for (auto _ : state) {
    std::vector<std::vector<float>> grads = base;
    ClipPerSample(grads, 1.0);
    benchmark::DoNotOptimize(NoisyAggregate(grads, dim, 1.1, 1.0, 64.0, rng));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ClipAndAggregate)->Arg(6170)->Arg(23850);

}  // namespace
}  // namespace psrlab::dp
