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

#include "psrlab/harness/pipeline.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "psrlab/data/idx.h"
#include "psrlab/data/synthetic.h"
#include "psrlab/harness/evaluation.h"
#include "psrlab/nn/architectures.h"
#include "psrlab/nn/checkpoint.h"
#include "psrlab/nn/classifier.h"
#include "psrlab/quant/quantizer.h"
#include "psrlab/util/error.h"
#include "psrlab/util/rng.h"

namespace psrlab::harness {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kSurrogateStream = 0x5077;

class StageTimer {
 public:
  StageTimer(RobustnessReport& report, std::string stage)
      : report_(report), stage_(std::move(stage)),
        start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    report_.timings.emplace_back(stage_, d.count());
  }

 private:
  RobustnessReport& report_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

template <typename Fn>
auto RunStage(RobustnessReport& report, const std::string& stage, Fn&& fn) {
  StageTimer timer(report, stage);
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "[" + stage + "] " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kFailedPrecondition, "[" + stage + "] " + e.what());
  }
}

// One evaluated model: float or quantized.
struct Target {
  std::string name;
  std::string variant;
  bool quantized = false;
  std::unique_ptr<nn::Model> model;
  std::unique_ptr<quant::QuantizedModel> qmodel;
  double epsilon = 0.0;
  std::size_t size_before = 0;
  std::size_t size_after = 0;

  nn::Classifier classifier() const {
    return quantized ? qmodel->classifier() : nn::Classifier(*model);
  }
};

ReportRow MakeRow(const Target& t, const std::string& attack, const std::string& threat,
                  const std::string& generator, const RobustStats& s,
                  std::uint64_t attack_seed) {
  ReportRow row;
  row.model = t.name;
  row.attack = attack;
  row.threat = threat;
  row.generator = generator;
  row.clean_acc = s.clean_acc;
  row.robust_acc_mean = s.mean;
  row.robust_acc_std = s.stddev;
  row.robust_acc_repeats = s.per_repeat;
  row.success_rate_mean = s.success_rate_mean;
  row.epsilon = t.epsilon;
  row.size_before = t.size_before;
  row.size_after = t.size_after;
  row.attack_seed = attack_seed;
  return row;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

std::string ArtifactPaths::DataPrefix(const std::string& split) const {
  return (fs::path(root) / "data" / split).string();
}
std::string ArtifactPaths::Model(const std::string& variant) const {
  return (fs::path(root) / "models" / (variant + ".psrl")).string();
}
std::string ArtifactPaths::QuantizedModel(const std::string& variant) const {
  return (fs::path(root) / "models" / (variant + ".int8.psrl")).string();
}
std::string ArtifactPaths::Surrogate(const std::string& variant) const {
  return (fs::path(root) / "models" / (variant + ".surrogate.psrl")).string();
}
std::string ArtifactPaths::RoundLog(const std::string& variant) const {
  return (fs::path(root) / "logs" / (variant + ".rounds.csv")).string();
}
std::string ArtifactPaths::ReportJson() const {
  return (fs::path(root) / "report.json").string();
}
std::string ArtifactPaths::ReportCsv() const {
  return (fs::path(root) / "report.csv").string();
}

data::DataSet LoadIdxPrefix(const std::string& prefix, std::size_t n_classes) {
  return data::LoadIdx(prefix + "-images.idx", prefix + "-labels.idx", n_classes);
}

void WriteIdxPrefix(const data::DataSet& ds, const std::string& prefix) {
  data::WriteIdx(ds, prefix + "-images.idx", prefix + "-labels.idx");
}

data::Splits PrepareData(const ExperimentConfig& cfg, const std::string& data_dir) {
  fs::create_directories(data_dir);
  data::DataSet full = cfg.data.source == "synthetic"
                           ? data::GenerateSynthetic(cfg.data.synthetic)
                           : data::LoadIdx(cfg.data.images_path, cfg.data.labels_path);
  const data::Splits splits = data::SplitDataset(full, cfg.data.split, cfg.quantize.enabled);
  data::Splits out;
  const std::pair<const char*, const data::DataSet*> parts[] = {
      {"train", &splits.train}, {"val", &splits.val}, {"test", &splits.test}};
  for (const auto& [name, part] : parts) {
    const std::string prefix = (fs::path(data_dir) / name).string();
    if (part->empty()) continue;
    WriteIdxPrefix(*part, prefix);
    data::DataSet loaded = LoadIdxPrefix(prefix, full.n_classes);
    loaded.provenance = full.provenance + "/" + name;
    if (std::string(name) == "train") out.train = std::move(loaded);
    if (std::string(name) == "val") out.val = std::move(loaded);
    if (std::string(name) == "test") out.test = std::move(loaded);
  }
  return out;
}

std::vector<std::string> VariantNames(const ExperimentConfig& cfg) {
  if (cfg.federation.mode.empty()) return cfg.training.variants;
  std::string name;
  for (const std::string& m : cfg.federation.mode) name += (name.empty() ? "" : "|") + m;
  return {name};
}

nn::Model InitialModel(const ExperimentConfig& cfg, const data::DataSet& train,
                       bool surrogate) {
  const nn::Shape sample = train.sample_shape();
  Require(sample.size() == 3 && sample[1] == sample[2], ErrorCode::kInvalidArgument,
          "images must be square [C, H, W]");
  nn::ArchitectureConfig arch;
  arch.id = cfg.model.arch;
  arch.in_channels = sample[0];
  arch.image_size = sample[1];
  arch.n_classes = train.n_classes;
  arch.widths = cfg.model.widths;
  arch.groups = cfg.model.groups;
  const std::uint64_t seed = surrogate ? DeriveSeed(cfg.seed, {kInitStream, kSurrogateStream})
                                       : DeriveSeed(cfg.seed, {kInitStream});
  return nn::BuildModel(arch, seed);
}

fed::FederationResult TrainVariant(const ExperimentConfig& cfg, const std::string& variant,
                                   const data::Splits& splits, bool surrogate) {
  fed::FederationConfig f = cfg.FederationFor(variant);
  if (surrogate) f.seed = DeriveSeed(f.seed, {kSurrogateStream});
  const data::DataSet& eval = splits.val.empty() ? splits.test : splits.val;
  return fed::RunFederation(f, InitialModel(cfg, splits.train, surrogate), splits.train,
                            eval);
}

RobustnessReport RunPipeline(const ExperimentConfig& cfg, const std::string& output_dir) {
  cfg.Validate();
  const ArtifactPaths paths{output_dir};
  fs::create_directories(fs::path(output_dir) / "models");
  fs::create_directories(fs::path(output_dir) / "logs");

  RobustnessReport report;
  report.experiment = cfg.experiment;
  report.seed = cfg.seed;
  report.config_json = ConfigToJson(cfg);

  const data::Splits splits = RunStage(report, "data", [&] {
    return PrepareData(cfg, (fs::path(output_dir) / "data").string());
  });
  Require(!splits.test.empty(), ErrorCode::kInvalidArgument, "[data] test split is empty");

  const std::vector<std::string> variants = VariantNames(cfg);
  const bool transfer =
      std::find(cfg.eval.threats.begin(), cfg.eval.threats.end(), "transfer") !=
      cfg.eval.threats.end();
  const bool whitebox =
      std::find(cfg.eval.threats.begin(), cfg.eval.threats.end(), "whitebox") !=
      cfg.eval.threats.end();

  std::vector<Target> targets;
  std::vector<std::unique_ptr<nn::Model>> surrogates;
  for (const std::string& variant : variants) {
    fed::FederationResult trained = RunStage(report, "train:" + variant, [&] {
      fed::FederationResult r = TrainVariant(cfg, variant, splits);
      nn::SaveModel(paths.Model(variant), r.model);
      std::ofstream log(paths.RoundLog(variant));
      fed::WriteRoundLogCsv(log, r.rounds);
      return r;
    });
    Target t;
    t.name = variant;
    t.variant = variant;
    t.epsilon = trained.epsilon;
    t.model = std::make_unique<nn::Model>(std::move(trained.model));
    t.size_before = t.size_after = quant::ModelSizeBytes(*t.model);
    targets.push_back(std::move(t));

    if (cfg.quantize.enabled) {
      RunStage(report, "quantize:" + variant, [&] {
        const Target& source = targets.back();
        const quant::ActivationRanges ranges =
            quant::CalibrateRanges(*source.model, splits.val, cfg.quantize.batch_size);
        Target q;
        q.name = variant + "/int8";
        q.variant = variant;
        q.quantized = true;
        q.epsilon = source.epsilon;
        q.qmodel = std::make_unique<quant::QuantizedModel>(*source.model, ranges);
        q.size_before = source.size_before;
        q.size_after = quant::ModelSizeBytes(*q.qmodel);
        nn::WriteContainer(paths.QuantizedModel(variant), q.qmodel->ToContainer());
        targets.push_back(std::move(q));
        return 0;
      });
    }
    if (transfer) {
      RunStage(report, "surrogate:" + variant, [&] {
        fed::FederationResult s = TrainVariant(cfg, variant, splits, true);
        nn::SaveModel(paths.Surrogate(variant), s.model);
        surrogates.push_back(std::make_unique<nn::Model>(std::move(s.model)));
        return 0;
      });
    }
  }

  for (const Target& t : targets) {
    report.models.push_back({t.name, t.variant, t.quantized,
                             nn::Accuracy(t.classifier(), splits.test.images,
                                          splits.test.labels),
                             t.epsilon, t.size_after});
  }

  const ThreatModel own = cfg.federation.poison_fraction > 0.0
                              ? ThreatModel::TrainTime(cfg.federation.poison_fraction)
                              : ThreatModel::WhiteBox();
  for (attack::Method method : cfg.attack.methods) {
    const attack::AttackConfig acfg = cfg.AttackFor(method);
    const std::string name(attack::MethodName(method));
    RunStage(report, "evaluate:" + name, [&] {
      if (whitebox) {
        for (const Target& t : targets) {
          const RobustStats s = EvaluateRobustness(t.classifier(), splits.test, acfg, own,
                                                   cfg.eval.repeats, cfg.eval.workers);
          report.rows.push_back(MakeRow(t, name, ThreatName(own), "", s, acfg.seed));
        }
      }
      if (transfer) {
        std::vector<nn::Classifier> generator_views;
        for (const auto& s : surrogates) generator_views.emplace_back(*s);
        std::vector<nn::Classifier> target_views;
        for (const Target& t : targets) target_views.push_back(t.classifier());
        for (std::size_t g = 0; g < generator_views.size(); ++g) {
          for (std::size_t i = 0; i < targets.size(); ++i) {
            const RobustStats s = EvaluateRobustness(
                target_views[i], splits.test, acfg,
                ThreatModel::Transfer(generator_views[g]), cfg.eval.repeats,
                cfg.eval.workers);
            report.rows.push_back(MakeRow(targets[i], name, "transfer",
                                          variants[g] + "/surrogate", s, acfg.seed));
          }
        }
      }
      return 0;
    });
  }
  FlagRows(report);
  for (const ReportRow& row : report.rows) {
    if (row.flagged) {
      Warn("robust accuracy above clean accuracy for " + row.model + " (" + row.attack +
           ", " + row.threat + ")");
    }
  }
  RunStage(report, "report", [&] {
    WriteText(paths.ReportCsv(), ReportToCsv(report));
    return 0;
  });
  EmitReport(report, ReportFormat::kJson, paths.ReportJson());
  return report;
}

}  // namespace psrlab::harness
