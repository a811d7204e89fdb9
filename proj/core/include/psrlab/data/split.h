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

#ifndef PSRLAB_DATA_SPLIT_H_
#define PSRLAB_DATA_SPLIT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psrlab/data/dataset.h"

namespace psrlab::data {

struct SplitSpec {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
};

struct Splits {
  DataSet train;
  DataSet val;
  DataSet test;
};

// Disjoint, exhaustive partition under a seeded permutation. Validation and
// test sizes are round(fraction * N); the remainder goes to train. Samples
// keep their original relative order inside each part. With require_val set
// an empty validation part (needed for quantization calibration) is an error.
Splits SplitDataset(const DataSet& ds, const SplitSpec& spec,
                    bool require_val = false);

// Index form of SplitDataset: {train, val, test} index lists.
std::vector<std::vector<std::size_t>> SplitIndices(std::size_t n,
                                                   const SplitSpec& spec);

// IID shards of near-equal size (sizes differ by at most one, larger shards
// first). Throws kInvalidArgument for n_clients < 2 or when a shard would be
// empty.
std::vector<DataSet> PartitionClients(const DataSet& train, std::size_t n_clients,
                                      std::uint64_t seed);

}  // namespace psrlab::data

#endif  // PSRLAB_DATA_SPLIT_H_
