#include "gmt/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gmt/error.hpp"

namespace gmt {

namespace {

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void ExperimentReport::scalar(const std::string& name, double value, const std::string& formula) {
  scalars[name] = {{"value", value}, {"formula", formula}};
}

void ExperimentReport::table(const std::string& name, const std::vector<std::string>& columns) {
  tables[name] = {{"columns", columns}, {"rows", nlohmann::json::array()}};
}

void ExperimentReport::row(const std::string& name, const std::vector<double>& values) {
  auto& t = tables.at(name);
  if (values.size() != t["columns"].size()) throw Error(ErrorKind::kInvalidArgument, "row width differs from columns");
  t["rows"].push_back(values);
}

double ExperimentReport::value(const std::string& name) const {
  const auto& v = scalars.at(name).at("value");
  return v.is_null() ? std::nan("") : v.get<double>();
}

nlohmann::json to_json(const ExperimentReport& r, bool with_timings) {
  nlohmann::json j = {{"experiment", r.id}, {"constants", r.constants}, {"scalars", r.scalars}, {"tables", r.tables}};
  if (with_timings) j["timings"] = r.timings;
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.id = j.at("experiment").get<std::string>();
  r.constants = j.at("constants");
  r.scalars = j.at("scalars");
  r.tables = j.at("tables");
  if (j.contains("timings")) r.timings = j.at("timings");
  return r;
}

std::string report_csv(const ExperimentReport& r) {
  std::string out = "name,value,formula\n";
  for (const auto& [name, s] : r.scalars.items()) {
    const auto& v = s.at("value");
    out += csv_field(name) + "," + (v.is_null() ? std::string("nan") : csv_number(v.get<double>())) + "," +
           csv_field(s.at("formula").get<std::string>()) + "\n";
  }
  return out;
}

std::string table_csv(const ExperimentReport& r, const std::string& table) {
  const auto& t = r.tables.at(table);
  std::string out;
  bool first = true;
  for (const auto& c : t.at("columns")) {
    out += (first ? "" : ",") + csv_field(c.get<std::string>());
    first = false;
  }
  out += "\n";
  for (const auto& row : t.at("rows")) {
    first = true;
    for (const auto& v : row) {
      out += (first ? "" : ",") + (v.is_null() ? std::string("nan") : csv_number(v.get<double>()));
      first = false;
    }
    out += "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::kIo, "write failed: " + path);
}

void emit_report(const ExperimentReport& r, const std::string& path, ReportFormat format, bool with_timings) {
  if (format == ReportFormat::kJson) {
    write_text(path, to_json(r, with_timings).dump(2) + "\n");
  } else {
    write_text(path, report_csv(r));
  }
}

}  // namespace gmt
