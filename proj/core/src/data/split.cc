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

#include "psrlab/data/split.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psrlab/util/error.h"
#include "psrlab/util/rng.h"

namespace psrlab::data {
namespace {

std::vector<std::size_t> Permutation(std::size_t n, std::uint64_t seed,
                                     std::uint64_t stream) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(DeriveSeed(seed, {stream}));
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  return idx;
}

}  // namespace

std::vector<std::vector<std::size_t>> SplitIndices(std::size_t n,
                                                   const SplitSpec& spec) {
  Require(spec.train >= 0.0 && spec.val >= 0.0 && spec.test >= 0.0,
          ErrorCode::kInvalidArgument, "split fractions must be >= 0");
  Require(std::abs(spec.train + spec.val + spec.test - 1.0) <= 1e-9,
          ErrorCode::kInvalidArgument, "split fractions must sum to 1");
  const std::size_t n_val =
      static_cast<std::size_t>(std::llround(spec.val * static_cast<double>(n)));
  const std::size_t n_test =
      static_cast<std::size_t>(std::llround(spec.test * static_cast<double>(n)));
  Require(n_val + n_test <= n, ErrorCode::kInvalidArgument,
          "validation and test fractions exceed the dataset");
  const std::vector<std::size_t> perm = Permutation(n, spec.seed, 0x5b1);
  std::vector<std::vector<std::size_t>> parts(3);
  const std::size_t n_train = n - n_val - n_test;
  parts[0].assign(perm.begin(), perm.begin() + n_train);
  parts[1].assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  parts[2].assign(perm.begin() + n_train + n_val, perm.end());
  for (auto& p : parts) std::sort(p.begin(), p.end());
  return parts;
}

Splits SplitDataset(const DataSet& ds, const SplitSpec& spec, bool require_val) {
  auto parts = SplitIndices(ds.size(), spec);
  Require(!require_val || !parts[1].empty(), ErrorCode::kInvalidArgument,
          "validation split is empty but quantization calibration needs it");
  return {ds.Subset(parts[0]), ds.Subset(parts[1]), ds.Subset(parts[2])};
}

std::vector<DataSet> PartitionClients(const DataSet& train, std::size_t n_clients,
                                      std::uint64_t seed) {
  Require(n_clients >= 2, ErrorCode::kInvalidArgument, "need at least 2 clients");
  const std::size_t n = train.size();
  Require(n >= n_clients, ErrorCode::kInvalidArgument,
          "cannot give " + std::to_string(n_clients) + " clients a non-empty shard of " +
              std::to_string(n) + " samples");
  const std::vector<std::size_t> perm = Permutation(n, seed, 0xc11e);
  std::vector<DataSet> shards;
  std::size_t offset = 0;
  for (std::size_t c = 0; c < n_clients; ++c) {
    const std::size_t size = n / n_clients + (c < n % n_clients ? 1 : 0);
    std::vector<std::size_t> idx(perm.begin() + offset, perm.begin() + offset + size);
    std::sort(idx.begin(), idx.end());
    shards.push_back(train.Subset(idx));
    offset += size;
  }
  return shards;
}

}  // namespace psrlab::data
