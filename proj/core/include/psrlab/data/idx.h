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

#ifndef PSRLAB_DATA_IDX_H_
#define PSRLAB_DATA_IDX_H_

#include <cstddef>
#include <string>

#include "psrlab/data/dataset.h"

namespace psrlab::data {

// Reads an IDX image/label file pair (unsigned-byte payloads, big-endian
// dimension sizes). Images may be [N, H, W] (one channel) or [N, C, H, W].
// Pixels are scaled by 1/255. When n_classes is 0 it is inferred as
// max(label) + 1. Throws kFormat on bad magic or truncation and
// kInvalidArgument when the two files disagree on the sample count.
DataSet LoadIdx(const std::string& images_path, const std::string& labels_path,
                std::size_t n_classes = 0);

// Writes `ds` as an IDX pair; pixels are rounded to the nearest byte.
// Single-channel images are written as [N, H, W].
void WriteIdx(const DataSet& ds, const std::string& images_path,
              const std::string& labels_path);

}  // namespace psrlab::data

#endif  // PSRLAB_DATA_IDX_H_
