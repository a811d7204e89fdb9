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

#include "psrlab/harness/config.h"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "psrlab/nn/architectures.h"
#include "psrlab/util/error.h"
#include "psrlab/util/rng.h"

namespace psrlab::harness {
namespace {

using nlohmann::json;

constexpr std::uint64_t kAttackSeedStream = 0xa77ac;

[[noreturn]] void SchemaError(const std::string& where, const std::string& what) {
  Fail(ErrorCode::kInvalidArgument, "config " + where + ": " + what);
}

// Typed, key-checked view of one JSON object.
class Section {
 public:
  Section(const json& parent, const std::string& name, std::set<std::string> allowed)
      : name_(name) {
    if (!parent.contains(name)) return;
    node_ = &parent.at(name);
    if (!node_->is_object()) SchemaError(name, "must be an object");
    for (const auto& [key, value] : node_->items()) {
      if (!allowed.count(key)) SchemaError(name, "unknown key '" + key + "'");
    }
  }

  bool Has(const std::string& key) const { return node_ && node_->contains(key); }

  template <typename T>
  void Get(const std::string& key, T& out) const {
    if (!Has(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      SchemaError(name_ + "." + key, "has the wrong type");
    }
  }

  template <typename T>
  void Get(const std::string& key, std::optional<T>& out) const {
    if (!Has(key) || node_->at(key).is_null()) return;
    T value{};
    Get(key, value);
    out = value;
  }

  // Number, or a string such as "8/255".
  void GetRational(const std::string& key, double& out) const {
    if (!Has(key)) return;
    const json& v = node_->at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else if (v.is_string()) {
      out = attack::ParseRational(v.get<std::string>());
    } else {
      SchemaError(name_ + "." + key, "must be a number or a fraction string");
    }
  }

  // String or array of strings.
  void GetStrings(const std::string& key, std::vector<std::string>& out) const {
    if (!Has(key)) return;
    const json& v = node_->at(key);
    if (v.is_string()) {
      out = {v.get<std::string>()};
    } else {
      Get(key, out);
    }
  }

  const json* node() const { return node_; }

 private:
  std::string name_;
  const json* node_ = nullptr;
};

std::vector<std::string> MethodNames(const std::vector<attack::Method>& methods) {
  std::vector<std::string> out;
  for (attack::Method m : methods) out.emplace_back(attack::MethodName(m));
  return out;
}

template <typename T>
json Optional(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

attack::AttackConfig ExperimentConfig::AttackFor(attack::Method method) const {
  attack::AttackConfig cfg;
  cfg.method = method;
  cfg.eps = attack.eps;
  cfg.step_size = attack.step;
  cfg.n_steps = attack.steps;
  cfg.n_restarts = attack.restarts;
  cfg.seed = attack_seed();
  return cfg;
}

std::uint64_t ExperimentConfig::attack_seed() const {
  return attack.seed ? *attack.seed : DeriveSeed(seed, {kAttackSeedStream});
}

fed::FederationConfig ExperimentConfig::FederationFor(const std::string& variant) const {
  fed::FederationConfig f;
  f.n_clients = federation.n_clients;
  f.rounds = federation.rounds;
  f.local_epochs = federation.local_epochs;
  f.adversary_id = federation.adversary_id;
  f.poison_fraction = federation.poison_fraction;
  f.regenerate_poison = federation.regenerate_poison;
  f.modes.clear();
  if (!federation.mode.empty()) {
    for (const std::string& m : federation.mode) f.modes.push_back(fed::ParseTrainMode(m));
  } else {
    f.modes.push_back(fed::ParseTrainMode(variant));
  }
  bool any_dp = false;
  for (fed::TrainMode m : f.modes) any_dp |= fed::UsesDp(m);
  f.adv_train_fraction = training.adv_train_fraction;
  f.optimizer.learning_rate =
      any_dp && training.dp_learning_rate ? *training.dp_learning_rate : training.learning_rate;
  f.optimizer.momentum = training.momentum;
  f.optimizer.batch_size = training.batch_size;
  if (any_dp) {
    dp::PrivacySpec p;
    p.clip_norm = dp.clip_norm;
    p.delta = dp.delta;
    p.sampling_rate = dp.sampling_rate;
    p.target_epsilon = dp.target_epsilon;
    if (dp.sigma) p.noise_multiplier = *dp.sigma;
    f.dp = p;
  }
  f.adversarial_attack = AttackFor(training.adv_method);
  f.adversarial_attack.n_restarts = 1;
  f.poison_attack = AttackFor(federation.poison_method);
  f.seed = DeriveSeed(seed, {0xfede});
  f.workers = eval.workers;
  return f;
}

void ExperimentConfig::Validate() const {
  Require(data.source == "synthetic" || data.source == "idx", ErrorCode::kInvalidArgument,
          "data.source must be 'synthetic' or 'idx'");
  Require(data.source != "idx" || (!data.images_path.empty() && !data.labels_path.empty()),
          ErrorCode::kInvalidArgument, "idx data needs images and labels paths");
  Require(!(dp.sigma && dp.target_epsilon), ErrorCode::kInvalidArgument,
          "dp.sigma and dp.target_epsilon are mutually exclusive");
  Require(!training.variants.empty(), ErrorCode::kInvalidArgument,
          "training.variants is empty");
  Require(eval.repeats >= 1, ErrorCode::kInvalidArgument, "eval.repeats must be >= 1");
  Require(eval.workers >= 1, ErrorCode::kInvalidArgument, "eval.workers must be >= 1");
  for (const std::string& t : eval.threats) {
    Require(t == "whitebox" || t == "transfer", ErrorCode::kInvalidArgument,
            "unknown threat '" + t + "'");
  }
  std::vector<std::string> variants =
      federation.mode.empty() ? training.variants : std::vector<std::string>{"configured"};
  for (const std::string& v : variants) {
    const fed::FederationConfig f = FederationFor(v);
    f.Validate();
    for (fed::TrainMode m : f.modes) {
      Require(!fed::UsesDp(m) || dp.sigma || dp.target_epsilon,
              ErrorCode::kInvalidArgument,
              "dp training needs dp.sigma or dp.target_epsilon");
    }
  }
  for (attack::Method m : attack.methods) AttackFor(m).Validate();
  Require(!quantize.enabled || data.split.val > 0.0, ErrorCode::kInvalidArgument,
          "quantization calibration needs a validation split");
}

ExperimentConfig ParseConfig(const std::string& json_text,
                             std::optional<std::uint64_t> env_seed) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kFormat, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) SchemaError("root", "must be an object");
  const std::set<std::string> top = {"experiment", "seed", "data", "model", "training",
                                     "dp", "attack", "federation", "quantize", "eval"};
  for (const auto& [key, value] : root.items()) {
    if (!top.count(key)) SchemaError("root", "unknown key '" + key + "'");
  }

  ExperimentConfig cfg;
  if (root.contains("experiment")) {
    if (!root["experiment"].is_string()) SchemaError("experiment", "must be a string");
    cfg.experiment = root["experiment"].get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) SchemaError("seed", "must be an unsigned integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (env_seed) cfg.seed = *env_seed;

  const Section d(root, "data", {"source", "n_classes", "n_per_class", "image_size",
                                 "noise_level", "contrast", "images", "labels", "split"});
  d.Get("source", cfg.data.source);
  d.Get("n_classes", cfg.data.synthetic.n_classes);
  d.Get("n_per_class", cfg.data.synthetic.n_per_class);
  d.Get("image_size", cfg.data.synthetic.image_size);
  d.Get("noise_level", cfg.data.synthetic.noise_level);
  d.Get("contrast", cfg.data.synthetic.contrast);
  d.Get("images", cfg.data.images_path);
  d.Get("labels", cfg.data.labels_path);
  if (d.node()) {
    const Section split(*d.node(), "split", {"train", "val", "test"});
    split.Get("train", cfg.data.split.train);
    split.Get("val", cfg.data.split.val);
    split.Get("test", cfg.data.split.test);
  }

  const Section m(root, "model", {"arch", "widths", "groups"});
  m.Get("arch", cfg.model.arch);
  m.Get("widths", cfg.model.widths);
  m.Get("groups", cfg.model.groups);

  const Section t(root, "training", {"variants", "learning_rate", "dp_learning_rate",
                                     "momentum", "batch_size", "adv_train_fraction",
                                     "adv_method"});
  t.GetStrings("variants", cfg.training.variants);
  t.Get("learning_rate", cfg.training.learning_rate);
  t.Get("dp_learning_rate", cfg.training.dp_learning_rate);
  t.Get("momentum", cfg.training.momentum);
  t.Get("batch_size", cfg.training.batch_size);
  t.Get("adv_train_fraction", cfg.training.adv_train_fraction);
  if (t.Has("adv_method")) {
    std::string method;
    t.Get("adv_method", method);
    cfg.training.adv_method = attack::ParseMethod(method);
  }

  const Section p(root, "dp", {"clip_norm", "delta", "target_epsilon", "sigma",
                               "sampling_rate"});
  p.Get("clip_norm", cfg.dp.clip_norm);
  p.Get("delta", cfg.dp.delta);
  p.Get("target_epsilon", cfg.dp.target_epsilon);
  p.Get("sigma", cfg.dp.sigma);
  p.Get("sampling_rate", cfg.dp.sampling_rate);

  const Section a(root, "attack", {"methods", "eps", "step", "steps", "restarts", "seed"});
  if (a.Has("methods")) {
    std::vector<std::string> names;
    a.GetStrings("methods", names);
    cfg.attack.methods.clear();
    for (const std::string& n : names) cfg.attack.methods.push_back(attack::ParseMethod(n));
  }
  a.GetRational("eps", cfg.attack.eps);
  a.GetRational("step", cfg.attack.step);
  a.Get("steps", cfg.attack.steps);
  a.Get("restarts", cfg.attack.restarts);
  a.Get("seed", cfg.attack.seed);

  const Section f(root, "federation", {"n_clients", "rounds", "local_epochs", "adversary_id",
                                       "poison_fraction", "poison_method", "regenerate_poison",
                                       "mode"});
  f.Get("n_clients", cfg.federation.n_clients);
  f.Get("rounds", cfg.federation.rounds);
  f.Get("local_epochs", cfg.federation.local_epochs);
  f.Get("adversary_id", cfg.federation.adversary_id);
  f.Get("poison_fraction", cfg.federation.poison_fraction);
  f.Get("regenerate_poison", cfg.federation.regenerate_poison);
  if (f.Has("poison_method")) {
    std::string method;
    f.Get("poison_method", method);
    cfg.federation.poison_method = attack::ParseMethod(method);
  }
  f.GetStrings("mode", cfg.federation.mode);

  const Section q(root, "quantize", {"enabled", "batch_size"});
  q.Get("enabled", cfg.quantize.enabled);
  q.Get("batch_size", cfg.quantize.batch_size);

  const Section e(root, "eval", {"repeats", "threats", "workers"});
  e.Get("repeats", cfg.eval.repeats);
  e.GetStrings("threats", cfg.eval.threats);
  e.Get("workers", cfg.eval.workers);

  cfg.data.synthetic.seed = DeriveSeed(cfg.seed, {0xda7a});
  cfg.data.split.seed = DeriveSeed(cfg.seed, {0x5b1});
  cfg.Validate();
  return cfg;
}

std::optional<std::uint64_t> SeedFromEnvironment() {
  const char* text = std::getenv("PSR_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(text, &end, 10);
  Require(errno == 0 && *end == '\0' && text[0] != '-', ErrorCode::kInvalidArgument,
          std::string("PSR_SEED is not an unsigned integer: '") + text + "'");
  return static_cast<std::uint64_t>(value);
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), SeedFromEnvironment());
}

std::string ConfigToJson(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;
  j["data"] = {{"source", cfg.data.source},
               {"n_classes", cfg.data.synthetic.n_classes},
               {"n_per_class", cfg.data.synthetic.n_per_class},
               {"image_size", cfg.data.synthetic.image_size},
               {"noise_level", cfg.data.synthetic.noise_level},
               {"contrast", cfg.data.synthetic.contrast},
               {"images", cfg.data.images_path},
               {"labels", cfg.data.labels_path},
               {"split", {{"train", cfg.data.split.train},
                          {"val", cfg.data.split.val},
                          {"test", cfg.data.split.test}}}};
  j["model"] = {{"arch", cfg.model.arch},
                {"widths", cfg.model.widths.empty() ? nn::DefaultWidths(cfg.model.arch)
                                                    : cfg.model.widths},
                {"groups", cfg.model.groups}};
  j["training"] = {{"variants", cfg.training.variants},
                   {"learning_rate", cfg.training.learning_rate},
                   {"dp_learning_rate", Optional(cfg.training.dp_learning_rate)},
                   {"momentum", cfg.training.momentum},
                   {"batch_size", cfg.training.batch_size},
                   {"adv_train_fraction", cfg.training.adv_train_fraction},
                   {"adv_method", attack::MethodName(cfg.training.adv_method)}};
  j["dp"] = {{"clip_norm", cfg.dp.clip_norm},
             {"delta", cfg.dp.delta},
             {"target_epsilon", Optional(cfg.dp.target_epsilon)},
             {"sigma", Optional(cfg.dp.sigma)},
             {"sampling_rate", cfg.dp.sampling_rate}};
  j["attack"] = {{"methods", MethodNames(cfg.attack.methods)},
                 {"eps", cfg.attack.eps},
                 {"step", cfg.attack.step},
                 {"steps", cfg.attack.steps},
                 {"restarts", cfg.attack.restarts},
                 {"seed", cfg.attack_seed()}};
  j["federation"] = {{"n_clients", cfg.federation.n_clients},
                     {"rounds", cfg.federation.rounds},
                     {"local_epochs", cfg.federation.local_epochs},
                     {"adversary_id", Optional(cfg.federation.adversary_id)},
                     {"poison_fraction", cfg.federation.poison_fraction},
                     {"poison_method", attack::MethodName(cfg.federation.poison_method)},
                     {"regenerate_poison", cfg.federation.regenerate_poison},
                     {"mode", cfg.federation.mode}};
  j["quantize"] = {{"enabled", cfg.quantize.enabled},
                   {"batch_size", cfg.quantize.batch_size}};
  j["eval"] = {{"repeats", cfg.eval.repeats},
               {"threats", cfg.eval.threats},
               {"workers", cfg.eval.workers}};
  return j.dump();
}

}  // namespace psrlab::harness
