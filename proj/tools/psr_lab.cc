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

// psr-lab: command line front end for the PSR-Lab experiment pipeline.
//
//   psr-lab pipeline   --config cfg.json [--out dir]
//   psr-lab train      --config cfg.json --variant standard --out model.psrl
//   psr-lab attack     --model m.psrl --data dir/test --method pgd --out adv.psrl
//   psr-lab quantize   --model m.psrl --calib dir/val --out m.int8.psrl
//   psr-lab evaluate   --model m.psrl --data dir/test --method pgd --repeats 10
//   psr-lab accountant --q 0.01 --sigma 1.1 --steps 1000 --delta 1e-5

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "psrlab/attack/attack.h"
#include "psrlab/dp/rdp_accountant.h"
#include "psrlab/harness/config.h"
#include "psrlab/harness/evaluation.h"
#include "psrlab/harness/pipeline.h"
#include "psrlab/harness/report.h"
#include "psrlab/nn/checkpoint.h"
#include "psrlab/nn/classifier.h"
#include "psrlab/quant/quantizer.h"
#include "psrlab/util/error.h"

namespace {

using nlohmann::json;
using namespace psrlab;

// A checkpoint opened as either a float or a quantized model.
class LoadedModel {
 public:
  explicit LoadedModel(const std::string& path) {
    const nn::Container c = nn::ReadContainer(path);
    if (quant::IsQuantizedContainer(c)) {
      qmodel_ = std::make_unique<quant::QuantizedModel>(quant::QuantizedModel::FromContainer(c));
    } else {
      model_ = std::make_unique<nn::Model>(nn::ModelFromContainer(c));
    }
  }
  nn::Classifier classifier() const {
    return qmodel_ ? qmodel_->classifier() : nn::Classifier(*model_);
  }
  const nn::Model& model() const { return qmodel_ ? qmodel_->dequantized() : *model_; }
  bool quantized() const { return qmodel_ != nullptr; }

 private:
  std::unique_ptr<nn::Model> model_;
  std::unique_ptr<quant::QuantizedModel> qmodel_;
};

struct AttackFlags {
  std::string method = "pgd";
  std::string eps = "8/255";
  std::string step = "2/255";
  int steps = 10;
  int restarts = 0;
  std::uint64_t seed = 0;
  int workers = 1;

  void Register(CLI::App* app) {
    app->add_option("--method", method, "fgsm, pgd or fab")->capture_default_str();
    app->add_option("--eps", eps, "L-infinity budget, e.g. 8/255")->capture_default_str();
    app->add_option("--step", step, "PGD step size")->capture_default_str();
    app->add_option("--steps", steps, "iterations")->capture_default_str();
    app->add_option("--restarts", restarts, "restarts (0: method default)");
    app->add_option("--seed", seed, "attack seed")->capture_default_str();
    app->add_option("--workers", workers, "worker threads")->capture_default_str();
  }

  attack::AttackConfig Config() const {
    attack::AttackConfig cfg;
    cfg.method = attack::ParseMethod(method);
    cfg.eps = attack::ParseRational(eps);
    cfg.step_size = attack::ParseRational(step);
    cfg.n_steps = steps;
    cfg.n_restarts = restarts;
    cfg.seed = seed;
    cfg.Validate();
    return cfg;
  }
};

void Print(const json& j) { std::cout << j.dump(2) << std::endl; }

int RunPipelineCommand(const std::string& config_path, const std::string& out_dir) {
  const harness::ExperimentConfig cfg = harness::LoadConfig(config_path);
  const harness::RobustnessReport report = harness::RunPipeline(cfg, out_dir);
  const harness::ArtifactPaths paths{out_dir};
  Print({{"report_json", paths.ReportJson()},
         {"report_csv", paths.ReportCsv()},
         {"rows", report.rows.size()}});
  return 0;
}

int RunTrain(const std::string& config_path, const std::string& variant,
             const std::string& out, std::string workdir, bool surrogate) {
  const harness::ExperimentConfig cfg = harness::LoadConfig(config_path);
  if (workdir.empty()) {
    workdir = (std::filesystem::path(out).parent_path() / "data").string();
  }
  const data::Splits splits = harness::PrepareData(cfg, workdir);
  const fed::FederationResult r = harness::TrainVariant(cfg, variant, splits, surrogate);
  nn::SaveModel(out, r.model);
  Print({{"model", out},
         {"rounds", r.rounds.size()},
         {"clean_acc", r.rounds.empty() ? 0.0 : r.rounds.back().clean_acc},
         {"epsilon", r.epsilon}});
  return 0;
}

int RunAttackCommand(const AttackFlags& flags, const std::string& model_path,
                     const std::string& data_prefix, const std::string& out) {
  const LoadedModel model(model_path);
  const data::DataSet ds = harness::LoadIdxPrefix(data_prefix, model.model().n_classes());
  const attack::AttackConfig cfg = flags.Config();
  const nn::Classifier classifier = model.classifier();
  const attack::AdversarialBatch adv =
      attack::RunAttack(classifier, ds.images, ds.labels, cfg, {}, flags.workers);
  double mean = 0.0;
  double max = 0.0;
  for (double v : adv.linf) {
    mean += v / adv.size();
    max = std::max(max, v);
  }
  if (!out.empty()) {
    auto column = [&](const std::string& name, auto values) {
      std::vector<float> f(values.begin(), values.end());
      return nn::StoredTensor::Float(name, nn::Tensor({f.size()}, std::move(f)));
    };
    nn::Container c;
    c.tensors.push_back(nn::StoredTensor::Float("x_adv", adv.x_adv));
    c.tensors.push_back(column("origin", adv.origin));
    c.tensors.push_back(column("success", adv.success));
    c.tensors.push_back(column("linf", adv.linf));
    nn::WriteContainer(out, c);
  }
  Print({{"method", attack::MethodName(cfg.method)},
         {"samples", adv.size()},
         {"success_rate", adv.SuccessRate()},
         {"mean_linf", mean},
         {"max_linf", max},
         {"robust_acc", nn::Accuracy(classifier, adv.x_adv, ds.labels)}});
  return 0;
}

int RunQuantize(const std::string& model_path, const std::string& calib_prefix,
                const std::string& out, std::size_t batch_size) {
  const nn::Model model = nn::LoadModel(model_path);
  const data::DataSet calib = harness::LoadIdxPrefix(calib_prefix, model.n_classes());
  const quant::QuantizedModel q =
      quant::QuantizeModel(model, quant::CalibrateRanges(model, calib, batch_size));
  nn::WriteContainer(out, q.ToContainer());
  const double before = static_cast<double>(quant::ModelSizeBytes(model));
  const double after = static_cast<double>(quant::ModelSizeBytes(q));
  Print({{"size_before", quant::ModelSizeBytes(model)},
         {"size_after", quant::ModelSizeBytes(q)},
         {"reduction_pct", 100.0 * (1.0 - after / before)}});
  return 0;
}

int RunEvaluate(const AttackFlags& flags, const std::string& model_path,
                const std::string& data_prefix, const std::string& generator_path,
                int repeats) {
  const LoadedModel model(model_path);
  const data::DataSet ds = harness::LoadIdxPrefix(data_prefix, model.model().n_classes());
  const nn::Classifier target = model.classifier();
  std::optional<LoadedModel> generator;
  std::optional<nn::Classifier> generator_view;
  harness::ThreatModel threat = harness::ThreatModel::WhiteBox();
  if (!generator_path.empty()) {
    generator.emplace(generator_path);
    generator_view.emplace(generator->classifier());
    threat = harness::ThreatModel::Transfer(*generator_view);
  }
  const harness::RobustStats s = harness::EvaluateRobustness(
      target, ds, flags.Config(), threat, repeats, flags.workers);
  Print({{"threat", harness::ThreatName(threat)},
         {"clean_acc", s.clean_acc},
         {"robust_acc_mean", s.mean},
         {"robust_acc_std", s.stddev},
         {"robust_acc_repeats", s.per_repeat},
         {"success_rate_mean", s.success_rate_mean}});
  return 0;
}

int RunAccountant(double q, std::optional<double> sigma, std::optional<double> target,
                  std::uint64_t steps, double delta) {
  Require(sigma.has_value() != target.has_value(), ErrorCode::kInvalidArgument,
          "give exactly one of --sigma and --target-eps");
  const double s = sigma ? *sigma : dp::CalibrateSigma(*target, delta, q, steps);
  const dp::EpsilonResult e = dp::EpsilonFor(q, s, steps, delta);
  Print({{"q", q},
         {"sigma", s},
         {"steps", steps},
         {"delta", delta},
         {"epsilon", e.epsilon},
         {"best_order", e.best_order}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSR-Lab: privacy, robustness and quantization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::string model_path;
  std::string data_prefix;

  CLI::App* pipeline = app.add_subcommand("pipeline", "run the end-to-end pipeline");
  std::string out_dir = "psr-out";
  pipeline->add_option("--config", config_path, "experiment JSON")->required();
  pipeline->add_option("--out", out_dir, "artifact directory")->capture_default_str();

  CLI::App* train = app.add_subcommand("train", "train one model variant");
  std::string variant = "standard";
  std::string workdir;
  bool surrogate = false;
  train->add_option("--config", config_path, "experiment JSON")->required();
  train->add_option("--variant", variant, "training mode")->capture_default_str();
  train->add_option("--out", out, "checkpoint path")->required();
  train->add_option("--workdir", workdir, "directory for the prepared data splits");
  train->add_flag("--surrogate", surrogate, "train the transfer surrogate instead");

  AttackFlags attack_flags;
  CLI::App* attack_cmd = app.add_subcommand("attack", "craft adversarial examples");
  attack_flags.Register(attack_cmd);
  attack_cmd->add_option("--model", model_path, "checkpoint")->required();
  attack_cmd->add_option("--data", data_prefix, "IDX prefix (<prefix>-images.idx)")
      ->required();
  attack_cmd->add_option("--out", out, "adversarial batch container");

  CLI::App* quantize = app.add_subcommand("quantize", "static int8 quantization");
  std::string calib_prefix;
  std::size_t batch_size = 64;
  quantize->add_option("--model", model_path, "float checkpoint")->required();
  quantize->add_option("--calib", calib_prefix, "calibration IDX prefix")->required();
  quantize->add_option("--out", out, "int8 checkpoint")->required();
  quantize->add_option("--batch-size", batch_size, "calibration batch")->capture_default_str();

  AttackFlags eval_flags;
  CLI::App* evaluate = app.add_subcommand("evaluate", "repeated robustness evaluation");
  eval_flags.Register(evaluate);
  std::string generator_path;
  int repeats = 10;
  evaluate->add_option("--model", model_path, "target checkpoint")->required();
  evaluate->add_option("--data", data_prefix, "test IDX prefix")->required();
  evaluate->add_option("--generator", generator_path, "transfer surrogate checkpoint");
  evaluate->add_option("--repeats", repeats, "seeded attack repeats")->capture_default_str();

  CLI::App* accountant = app.add_subcommand("accountant", "RDP privacy accounting");
  double q = 0.01;
  std::optional<double> sigma;
  std::optional<double> target_eps;
  std::uint64_t steps = 1000;
  double delta = 1e-5;
  accountant->add_option("--q", q, "sampling rate")->capture_default_str();
  accountant->add_option("--sigma", sigma, "noise multiplier");
  accountant->add_option("--target-eps", target_eps, "calibrate sigma for this epsilon");
  accountant->add_option("--steps", steps, "noisy steps")->capture_default_str();
  accountant->add_option("--delta", delta, "delta")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (pipeline->parsed()) return RunPipelineCommand(config_path, out_dir);
    if (train->parsed()) return RunTrain(config_path, variant, out, workdir, surrogate);
    if (attack_cmd->parsed()) return RunAttackCommand(attack_flags, model_path, data_prefix, out);
    if (quantize->parsed()) return RunQuantize(model_path, calib_prefix, out, batch_size);
    if (evaluate->parsed()) {
      return RunEvaluate(eval_flags, model_path, data_prefix, generator_path, repeats);
    }
    if (accountant->parsed()) return RunAccountant(q, sigma, target_eps, steps, delta);
  } catch (const psrlab::Error& e) {
    std::cerr << "psr-lab: " << e.what() << std::endl;
    return e.code() == psrlab::ErrorCode::kInvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "psr-lab: " << e.what() << std::endl;
    return 1;
  }
  return 1;
}
