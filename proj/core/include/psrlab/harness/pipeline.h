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

#ifndef PSRLAB_HARNESS_PIPELINE_H_
#define PSRLAB_HARNESS_PIPELINE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "psrlab/data/dataset.h"
#include "psrlab/data/split.h"
#include "psrlab/fed/federation.h"
#include "psrlab/harness/config.h"
#include "psrlab/harness/report.h"
#include "psrlab/nn/model.h"

namespace psrlab::harness {

// Artifact layout below an output directory:
//   data/{train,val,test}-{images,labels}.idx
//   models/<variant>.psrl, models/<variant>.int8.psrl,
//   models/<variant>.surrogate.psrl
//   logs/<variant>.rounds.csv
//   report.json, report.csv
struct ArtifactPaths {
  std::string root;

  std::string DataPrefix(const std::string& split) const;
  std::string Model(const std::string& variant) const;
  std::string QuantizedModel(const std::string& variant) const;
  std::string Surrogate(const std::string& variant) const;
  std::string RoundLog(const std::string& variant) const;
  std::string ReportJson() const;
  std::string ReportCsv() const;
};

// "<prefix>-images.idx" / "<prefix>-labels.idx".
data::DataSet LoadIdxPrefix(const std::string& prefix, std::size_t n_classes = 0);
void WriteIdxPrefix(const data::DataSet& ds, const std::string& prefix);

// Builds or loads the dataset, splits it and stores the splits as IDX under
// `data_dir`; the returned splits are read back from those files so every
// later stage sees byte-grid pixels.
data::Splits PrepareData(const ExperimentConfig& cfg, const std::string& data_dir);

// Names of the models the pipeline trains.
std::vector<std::string> VariantNames(const ExperimentConfig& cfg);

// Initial weights shared by all variants; surrogates use a separate stream.
nn::Model InitialModel(const ExperimentConfig& cfg, const data::DataSet& train,
                       bool surrogate = false);

// Federated training of one variant. Round accuracy is logged on the
// validation split (test split when validation is empty).
fed::FederationResult TrainVariant(const ExperimentConfig& cfg, const std::string& variant,
                                   const data::Splits& splits, bool surrogate = false);

// Runs every stage and writes all artifacts plus report.json and report.csv.
// Stage failures are rethrown with the stage name prefixed.
RobustnessReport RunPipeline(const ExperimentConfig& cfg, const std::string& output_dir);

}  // namespace psrlab::harness

#endif  // PSRLAB_HARNESS_PIPELINE_H_
