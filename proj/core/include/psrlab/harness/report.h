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

#ifndef PSRLAB_HARNESS_REPORT_H_
#define PSRLAB_HARNESS_REPORT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace psrlab::harness {

inline constexpr int kReportSchemaVersion = 1;

inline constexpr const char* kCsvHeader =
    "experiment,attack,threat,clean_acc,robust_acc_mean,robust_acc_std,eps,size_before,"
    "size_after";

struct ModelSummary {
  std::string name;          // e.g. "dp" or "dp/int8"
  std::string variant;
  bool quantized = false;
  double clean_acc = 0.0;
  double epsilon = 0.0;      // privacy budget spent; 0 without DP
  std::size_t size_bytes = 0;
};

struct ReportRow {
  std::string model;
  std::string attack;
  std::string threat;
  std::string generator;     // transfer source; empty otherwise
  double clean_acc = 0.0;
  double robust_acc_mean = 0.0;
  double robust_acc_std = 0.0;
  std::vector<double> robust_acc_repeats;
  double success_rate_mean = 0.0;
  double epsilon = 0.0;
  std::size_t size_before = 0;
  std::size_t size_after = 0;
  std::uint64_t attack_seed = 0;
  // Robust accuracy exceeds clean accuracy by more than the tolerance.
  bool flagged = false;
};

struct RobustnessReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string config_json;   // resolved configuration echo
  std::vector<ModelSummary> models;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, double>> timings;   // stage -> seconds
};

// Tolerance used for ReportRow::flagged.
inline constexpr double kRobustAboveCleanTolerance = 0.01;
void FlagRows(RobustnessReport& report);

// Full nested JSON document. Timings are omitted when include_timings is false.
std::string ReportToJson(const RobustnessReport& report, bool include_timings = true);
// One row per (model, attack, threat) aggregate under kCsvHeader. The
// experiment column reads "<experiment>/<model>"; transfer threats read
// "transfer(<generator>)".
std::string ReportToCsv(const RobustnessReport& report);

enum class ReportFormat { kJson, kCsv };
// Throws kIo when the path cannot be written.
void EmitReport(const RobustnessReport& report, ReportFormat format, const std::string& path);

// Throws kFormat unless `json_text` is a report of the current schema.
void ValidateReportJson(const std::string& json_text);

}  // namespace psrlab::harness

#endif  // PSRLAB_HARNESS_REPORT_H_
