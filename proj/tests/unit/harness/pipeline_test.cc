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


#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "json.hpp"
#include "psrlab/dp/rdp_accountant.h"
#include "psrlab/harness/pipeline.h"

namespace psrlab::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kTiny = R"({
  "experiment": "tiny", "seed": 3,
  "data": {"n_per_class": 16, "contrast": 0.3},
  "model": {"widths": [8, 16]},
  "attack": {"methods": ["fgsm"], "eps": "8/255", "step": "2/255", "steps": 1},
  "federation": {"n_clients": 2, "rounds": 1},
  "quantize": {"enabled": true},
  "eval": {"repeats": 2, "threats": ["whitebox"]}
})";

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("psrlab_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(TempDir("shared"));
    report_ = new RobustnessReport(RunPipeline(ParseConfig(kTiny), dir_->string()));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
    delete report_;
  }

  static fs::path* dir_;
  static RobustnessReport* report_;
};

fs::path* PipelineTest::dir_ = nullptr;
RobustnessReport* PipelineTest::report_ = nullptr;

TEST_F(PipelineTest, WritesArtifacts) {
  const ArtifactPaths paths{dir_->string()};
  for (const std::string& p :
       {paths.Model("standard"), paths.QuantizedModel("standard"), paths.RoundLog("standard"),
        paths.ReportJson(), paths.ReportCsv(), paths.DataPrefix("train") + "-images.idx",
        paths.DataPrefix("val") + "-labels.idx", paths.DataPrefix("test") + "-images.idx"}) {
    EXPECT_TRUE(fs::exists(p)) << p;
  }
  EXPECT_FALSE(fs::exists(paths.Surrogate("standard")));
}

TEST_F(PipelineTest, ReportMatchesFiles) {
  const ArtifactPaths paths{dir_->string()};
  const std::string text = ReadFile(paths.ReportJson());
  EXPECT_NO_THROW(ValidateReportJson(text));
  EXPECT_EQ(text, ReportToJson(*report_));
  EXPECT_EQ(ReadFile(paths.ReportCsv()), ReportToCsv(*report_));
}

TEST_F(PipelineTest, RowsCoverModelsAndAttacks) {
  ASSERT_EQ(report_->models.size(), 2u);
  EXPECT_EQ(report_->models[0].name, "standard");
  EXPECT_EQ(report_->models[1].name, "standard/int8");
  EXPECT_LT(report_->models[1].size_bytes, report_->models[0].size_bytes);
  ASSERT_EQ(report_->rows.size(), 2u);
  for (const ReportRow& row : report_->rows) {
    EXPECT_EQ(row.attack, "fgsm");
    EXPECT_EQ(row.threat, "whitebox");
    EXPECT_EQ(row.robust_acc_repeats.size(), 2u);
    EXPECT_LE(row.robust_acc_mean, row.clean_acc + kRobustAboveCleanTolerance);
  }
}

TEST_F(PipelineTest, RerunIsIdentical) {
  const fs::path other = TempDir("rerun");
  const RobustnessReport again = RunPipeline(ParseConfig(kTiny), other.string());
  EXPECT_EQ(ReportToJson(again, false), ReportToJson(*report_, false));
  EXPECT_EQ(ReportToCsv(again), ReportToCsv(*report_));
  const ArtifactPaths a{dir_->string()};
  const ArtifactPaths b{other.string()};
  EXPECT_EQ(ReadFile(a.Model("standard")), ReadFile(b.Model("standard")));
  EXPECT_EQ(ReadFile(a.QuantizedModel("standard")), ReadFile(b.QuantizedModel("standard")));
  fs::remove_all(other);
}

TEST_F(PipelineTest, SeedChangesResults) {
  const fs::path other = TempDir("seed");
  const RobustnessReport changed = RunPipeline(ParseConfig(kTiny, 4), other.string());
  EXPECT_NE(ReadFile(ArtifactPaths{dir_->string()}.Model("standard")),
            ReadFile(ArtifactPaths{other.string()}.Model("standard")));
  EXPECT_EQ(changed.seed, 4u);
  fs::remove_all(other);
}

TEST(PipelineDataTest, IdxPrefixRoundTrip) {
  const fs::path dir = TempDir("idx");
  const ExperimentConfig cfg = ParseConfig(kTiny);
  const data::Splits splits = PrepareData(cfg, dir.string());
  const data::DataSet test = LoadIdxPrefix((dir / "test").string(), 10);
  EXPECT_TRUE(std::ranges::equal(test.images.data(), splits.test.images.data()));
  EXPECT_EQ(test.labels, splits.test.labels);
  EXPECT_EQ(splits.train.size() + splits.val.size() + splits.test.size(), 160u);
  fs::remove_all(dir);
}

TEST(PipelineDataTest, VariantNamesFollowModes) {
  ExperimentConfig cfg = ParseConfig(kTiny);
  EXPECT_EQ(VariantNames(cfg), std::vector<std::string>{"standard"});
  cfg.federation.mode = {"standard", "adversarial"};
  EXPECT_EQ(VariantNames(cfg), std::vector<std::string>{"standard|adversarial"});
}

TEST(PipelineDataTest, UnwritableOutputFails) {
  ASSERT_EQ(std::system("touch /tmp/psrlab_pipeline_file"), 0);
  EXPECT_ANY_THROW(RunPipeline(ParseConfig(kTiny), "/tmp/psrlab_pipeline_file/out"));
}

#ifdef PSRLAB_CLI_PATH

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult Cli(const std::string& args) {
  const fs::path capture = fs::temp_directory_path() / "psrlab_cli_capture.txt";
  const std::string cmd =
      std::string(PSRLAB_CLI_PATH) + " " + args + " > " + capture.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = ReadFile(capture);
  return r;
}

TEST(CliTest, ExitCodes) {
  EXPECT_NE(Cli("").status, 0);
  EXPECT_NE(Cli("pipeline").status, 0);
  EXPECT_EQ(Cli("accountant --q 0.01 --sigma 1 --target-eps 2").status, 2);
  EXPECT_EQ(Cli("pipeline --config /nonexistent.json --out /tmp/x").status, 1);
}

TEST(CliTest, AccountantMatchesLibrary) {
  const CliResult r = Cli("accountant --q 0.02 --sigma 1.1 --steps 500 --delta 1e-5");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  const dp::EpsilonResult e = dp::EpsilonFor(0.02, 1.1, 500, 1e-5);
  EXPECT_DOUBLE_EQ(j["epsilon"].get<double>(), e.epsilon);
  const CliResult cal = Cli("accountant --q 0.02 --target-eps 3.4 --steps 500 --delta 1e-5");
  ASSERT_EQ(cal.status, 0);
  EXPECT_NEAR(json::parse(cal.out)["epsilon"].get<double>(), 3.4, 3.4e-2);
}

TEST_F(PipelineTest, CliReproducesPipelineRows) {
  const ArtifactPaths paths{dir_->string()};
  const ExperimentConfig cfg = ParseConfig(kTiny);
  const std::string attack = "--method fgsm --eps 8/255 --step 2/255 --steps 1 --repeats 2 --seed " +
                             std::to_string(cfg.attack_seed()) + " --data " +
                             paths.DataPrefix("test");
  const CliResult fp = Cli("evaluate " + attack + " --model " + paths.Model("standard"));
  ASSERT_EQ(fp.status, 0);
  EXPECT_EQ(json::parse(fp.out)["robust_acc_repeats"].get<std::vector<double>>(),
            report_->rows[0].robust_acc_repeats);
  const CliResult q =
      Cli("evaluate " + attack + " --model " + paths.QuantizedModel("standard"));
  ASSERT_EQ(q.status, 0);
  EXPECT_EQ(json::parse(q.out)["robust_acc_repeats"].get<std::vector<double>>(),
            report_->rows[1].robust_acc_repeats);
}

TEST_F(PipelineTest, CliQuantizeMatchesPipeline) {
  const ArtifactPaths paths{dir_->string()};
  const fs::path out = *dir_ / "cli.int8.psrl";
  const CliResult r = Cli("quantize --model " + paths.Model("standard") + " --calib " +
                          paths.DataPrefix("val") + " --out " + out.string());
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json::parse(r.out)["size_after"].get<std::size_t>(),
            report_->models[1].size_bytes);
  EXPECT_EQ(ReadFile(out), ReadFile(paths.QuantizedModel("standard")));
}

#endif  // PSRLAB_CLI_PATH

}  // namespace
}  // namespace psrlab::harness
