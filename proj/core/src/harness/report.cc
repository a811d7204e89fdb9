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

#include "psrlab/harness/report.h"

#include <charconv>
#include <fstream>

#include "json.hpp"
#include "psrlab/util/error.h"

namespace psrlab::harness {
namespace {

using nlohmann::json;

std::string Number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void Expect(bool ok, const std::string& what) {
  Require(ok, ErrorCode::kFormat, "report schema: " + what);
}

void ExpectFields(const json& obj, const std::string& where,
                  std::initializer_list<std::pair<const char*, json::value_t>> fields) {
  Expect(obj.is_object(), where + " must be an object");
  for (const auto& [key, type] : fields) {
    Expect(obj.contains(key), where + " lacks '" + key + "'");
    const json& v = obj.at(key);
    const bool number = type == json::value_t::number_float;
    const bool unsigned_int = type == json::value_t::number_unsigned;
    const bool ok = number ? v.is_number()
                    : unsigned_int ? v.is_number_unsigned()
                                   : v.type() == type;
    Expect(ok, where + "." + key + " has the wrong type");
  }
}

}  // namespace

void FlagRows(RobustnessReport& report) {
  for (ReportRow& row : report.rows) {
    row.flagged = row.robust_acc_mean > row.clean_acc + kRobustAboveCleanTolerance;
  }
}

std::string ReportToJson(const RobustnessReport& report, bool include_timings) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["experiment"] = report.experiment;
  j["seed"] = report.seed;
  j["config"] = report.config_json.empty() ? json::object() : json::parse(report.config_json);
  j["models"] = json::array();
  for (const ModelSummary& m : report.models) {
    j["models"].push_back({{"name", m.name},
                           {"variant", m.variant},
                           {"quantized", m.quantized},
                           {"clean_acc", m.clean_acc},
                           {"epsilon", m.epsilon},
                           {"size_bytes", m.size_bytes}});
  }
  j["rows"] = json::array();
  for (const ReportRow& r : report.rows) {
    j["rows"].push_back({{"model", r.model},
                         {"attack", r.attack},
                         {"threat", r.threat},
                         {"generator", r.generator},
                         {"clean_acc", r.clean_acc},
                         {"robust_acc_mean", r.robust_acc_mean},
                         {"robust_acc_std", r.robust_acc_std},
                         {"robust_acc_repeats", r.robust_acc_repeats},
                         {"repeats", r.robust_acc_repeats.size()},
                         {"success_rate_mean", r.success_rate_mean},
                         {"epsilon", r.epsilon},
                         {"size_before", r.size_before},
                         {"size_after", r.size_after},
                         {"attack_seed", r.attack_seed},
                         {"flagged", r.flagged}});
  }
  if (include_timings) {
    j["timings"] = json::object();
    for (const auto& [stage, seconds] : report.timings) j["timings"][stage] = seconds;
  }
  return j.dump(2) + "\n";
}

std::string ReportToCsv(const RobustnessReport& report) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const ReportRow& r : report.rows) {
    const std::string threat =
        r.generator.empty() ? r.threat : r.threat + "(" + r.generator + ")";
    out += CsvField(report.experiment + "/" + r.model) + "," + CsvField(r.attack) + "," +
           CsvField(threat) + "," + Number(r.clean_acc) + "," + Number(r.robust_acc_mean) +
           "," + Number(r.robust_acc_std) + "," + Number(r.epsilon) + "," +
           std::to_string(r.size_before) + "," + std::to_string(r.size_after) + "\n";
  }
  return out;
}

void EmitReport(const RobustnessReport& report, ReportFormat format, const std::string& path) {
  const std::string text =
      format == ReportFormat::kJson ? ReportToJson(report) : ReportToCsv(report);
  if (format == ReportFormat::kJson) ValidateReportJson(text);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), ErrorCode::kIo, "cannot write report '" + path + "'");
  out << text;
  out.close();
  Require(!out.fail(), ErrorCode::kIo, "failed writing report '" + path + "'");
}

void ValidateReportJson(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kFormat, std::string("report is not valid JSON: ") + e.what());
  }
  using V = json::value_t;
  ExpectFields(j, "report",
               {{"schema_version", V::number_unsigned}, {"experiment", V::string},
                {"seed", V::number_unsigned}, {"config", V::object},
                {"models", V::array}, {"rows", V::array}});
  Expect(j["schema_version"] == kReportSchemaVersion, "unsupported schema_version");
  for (const json& m : j["models"]) {
    ExpectFields(m, "models[]",
                 {{"name", V::string}, {"variant", V::string}, {"quantized", V::boolean},
                  {"clean_acc", V::number_float}, {"epsilon", V::number_float},
                  {"size_bytes", V::number_unsigned}});
  }
  for (const json& r : j["rows"]) {
    ExpectFields(r, "rows[]",
                 {{"model", V::string}, {"attack", V::string}, {"threat", V::string},
                  {"generator", V::string}, {"clean_acc", V::number_float},
                  {"robust_acc_mean", V::number_float}, {"robust_acc_std", V::number_float},
                  {"robust_acc_repeats", V::array}, {"repeats", V::number_unsigned},
                  {"epsilon", V::number_float}, {"size_before", V::number_unsigned},
                  {"size_after", V::number_unsigned}, {"attack_seed", V::number_unsigned},
                  {"flagged", V::boolean}});
    Expect(r["robust_acc_repeats"].size() == r["repeats"].get<std::size_t>() &&
               r["repeats"].get<std::size_t>() >= 1,
           "repeat count does not match the recorded repeats");
  }
  if (j.contains("timings")) Expect(j["timings"].is_object(), "timings must be an object");
}

}  // namespace psrlab::harness
