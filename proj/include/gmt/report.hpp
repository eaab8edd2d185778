#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace gmt {

// Named results of one experiment. JSON objects keep keys sorted, so the
// serialized form depends only on the values.
struct ExperimentReport {
  std::string id;
  nlohmann::json constants = nlohmann::json::object();
  nlohmann::json scalars = nlohmann::json::object();  // name -> {value, formula}
  nlohmann::json tables = nlohmann::json::object();   // name -> {columns, rows}
  nlohmann::json timings = nlohmann::json::object();  // seconds; emitted only on request

  void constant(const std::string& name, const nlohmann::json& value) { constants[name] = value; }
  void scalar(const std::string& name, double value, const std::string& formula);
  void table(const std::string& name, const std::vector<std::string>& columns);
  void row(const std::string& name, const std::vector<double>& values);
  double value(const std::string& name) const;
};

enum class ReportFormat { kJson, kCsv };

nlohmann::json to_json(const ExperimentReport& r, bool with_timings = false);
ExperimentReport report_from_json(const nlohmann::json& j);
std::string report_csv(const ExperimentReport& r);
std::string table_csv(const ExperimentReport& r, const std::string& table);

// Writes JSON or the scalar CSV (columns name,value,formula). Throws io on failure.
void emit_report(const ExperimentReport& r, const std::string& path, ReportFormat format, bool with_timings = false);
void write_text(const std::string& path, const std::string& text);

}  // namespace gmt
