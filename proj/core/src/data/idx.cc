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

#include "psrlab/data/idx.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

#include "psrlab/util/error.h"

namespace psrlab::data {
namespace {

struct IdxFile {
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> payload;
};

IdxFile ReadIdxFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Require(bytes.size() >= 4 && bytes[0] == 0 && bytes[1] == 0,
          ErrorCode::kFormat, "'" + path + "': bad IDX magic");
  Require(bytes[2] == 0x08, ErrorCode::kFormat,
          "'" + path + "': only unsigned-byte IDX payloads are supported");
  const std::size_t rank = bytes[3];
  Require(rank >= 1, ErrorCode::kFormat, "'" + path + "': IDX rank is 0");
  const std::size_t header = 4 + 4 * rank;
  Require(bytes.size() >= header, ErrorCode::kFormat,
          "'" + path + "': truncated IDX header");
  IdxFile f;
  std::size_t count = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    const std::uint8_t* p = bytes.data() + 4 + 4 * d;
    const std::size_t dim = (std::size_t{p[0]} << 24) | (std::size_t{p[1]} << 16) |
                            (std::size_t{p[2]} << 8) | std::size_t{p[3]};
    f.dims.push_back(dim);
    count *= dim;
  }
  Require(bytes.size() - header >= count, ErrorCode::kFormat,
          "'" + path + "': truncated IDX payload (" +
              std::to_string(bytes.size() - header) + " of " +
              std::to_string(count) + " bytes)");
  f.payload.assign(bytes.begin() + header, bytes.begin() + header + count);
  return f;
}

void WriteIdxFile(const std::string& path, const std::vector<std::size_t>& dims,
                  const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> bytes = {0, 0, 0x08,
                                     static_cast<std::uint8_t>(dims.size())};
  for (std::size_t d : dims) {
    for (int shift = 24; shift >= 0; shift -= 8) {
      bytes.push_back(static_cast<std::uint8_t>(d >> shift));
    }
  }
  bytes.insert(bytes.end(), payload.begin(), payload.end());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  Require(static_cast<bool>(out), ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace

DataSet LoadIdx(const std::string& images_path, const std::string& labels_path,
                std::size_t n_classes) {
  IdxFile images = ReadIdxFile(images_path);
  IdxFile labels = ReadIdxFile(labels_path);
  Require(images.dims.size() == 3 || images.dims.size() == 4, ErrorCode::kFormat,
          "image IDX must have rank 3 or 4");
  Require(labels.dims.size() == 1, ErrorCode::kFormat, "label IDX must have rank 1");
  Require(images.dims[0] == labels.dims[0], ErrorCode::kInvalidArgument,
          "count mismatch: " + std::to_string(images.dims[0]) + " images vs " +
              std::to_string(labels.dims[0]) + " labels");
  nn::Shape shape = images.dims.size() == 3
                        ? nn::Shape{images.dims[0], 1, images.dims[1], images.dims[2]}
                        : nn::Shape(images.dims.begin(), images.dims.end());
  std::vector<float> pixels(images.payload.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = static_cast<float>(images.payload[i]) / 255.0f;
  }
  DataSet ds;
  ds.images = nn::Tensor(std::move(shape), std::move(pixels));
  ds.labels.assign(labels.payload.begin(), labels.payload.end());
  std::size_t max_label = 0;
  for (std::size_t l : ds.labels) max_label = std::max(max_label, l);
  ds.n_classes = n_classes == 0 ? max_label + 1 : n_classes;
  ds.provenance = "idx-file:" + images_path;
  ds.Validate();
  return ds;
}

void WriteIdx(const DataSet& ds, const std::string& images_path,
              const std::string& labels_path) {
  ds.Validate();
  Require(!ds.empty(), ErrorCode::kInvalidArgument, "cannot write an empty dataset");
  Require(ds.n_classes <= 256, ErrorCode::kInvalidArgument,
          "IDX labels are bytes; n_classes must be <= 256");
  const nn::Shape& s = ds.images.shape();
  std::vector<std::size_t> dims =
      s[1] == 1 ? std::vector<std::size_t>{s[0], s[2], s[3]}
                : std::vector<std::size_t>(s.begin(), s.end());
  std::vector<std::uint8_t> pixels(ds.images.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = static_cast<std::uint8_t>(std::lround(ds.images[i] * 255.0f));
  }
  WriteIdxFile(images_path, dims, pixels);
  std::vector<std::uint8_t> labels(ds.labels.begin(), ds.labels.end());
  WriteIdxFile(labels_path, {ds.labels.size()}, labels);
}

}  // namespace psrlab::data
