#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dtnf/core/format.hpp"
#include "dtnf/exp/config.hpp"

namespace dtnf::exp {

/// A named table. Cells are JSON scalars; null renders as an empty CSV field.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add(std::vector<json> row) {
    if (row.size() != columns.size()) throw std::logic_error("table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }
};

struct RecipeOutput {
  std::vector<Table> tables;
  json summary = json::object();
  /// Free-form text lines written to <recipe>.txt next to the data.
  std::vector<std::string> text;
  /// Nonzero when the recipe ran but a check it performs did not hold.
  int status = 0;
};

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (const char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return v.dump();
}

/// JSON does not allow nan/inf, so they are written as strings.
inline json json_cell(const json& v) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) return format_double(v.get<double>());
  return v;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_header(std::ostream& os, const ExperimentConfig& c) {
  for (const auto& [k, v] : c.echo()) os << "# " << k << '=' << v << '\n';
  if (c.timestamp) os << "# generated=" << utc_timestamp() << '\n';
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

inline json to_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(obj));
  }
  return rows;
}

inline json config_json(const ExperimentConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : c.echo()) j[k] = v;
  return j;
}

inline json sanitize(const json& v) {
  if (v.is_object()) {
    json o = json::object();
    for (const auto& [k, e] : v.items()) o[k] = sanitize(e);
    return o;
  }
  if (v.is_array()) {
    json a = json::array();
    for (const auto& e : v) a.push_back(sanitize(e));
    return a;
  }
  return json_cell(v);
}

/// csv: one <table>.csv per table plus summary.json; json: a single
/// <recipe>.json. Returns the files written.
inline std::vector<std::filesystem::path> write_output(const RecipeOutput& out, const ExperimentConfig& c) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec || !fs::is_directory(c.out)) throw ParamError("cannot create output directory '" + c.out.string() + "'");
  std::vector<fs::path> written;
  auto open = [&](const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw ParamError("cannot write '" + path.string() + "'");
    written.push_back(path);
    return os;
  };

  if (c.format == Format::csv) {
    for (const Table& t : out.tables) {
      auto os = open(c.out / (t.name + ".csv"));
      write_header(os, c);
      write_csv(os, t);
    }
    auto os = open(c.out / "summary.json");
    json s = sanitize(out.summary);
    os << s.dump(2) << '\n';
  } else {
    json doc = json::object();
    doc["config"] = config_json(c);
    if (c.timestamp) doc["generated"] = utc_timestamp();
    doc["summary"] = sanitize(out.summary);
    doc["tables"] = json::object();
    for (const Table& t : out.tables) doc["tables"][t.name] = to_json(t);
    auto os = open(c.out / (std::string(to_string(c.recipe)) + ".json"));
    os << doc.dump(2) << '\n';
  }
  if (!out.text.empty()) {
    auto os = open(c.out / (std::string(to_string(c.recipe)) + ".txt"));
    for (const auto& line : out.text) os << line << '\n';
  }
  return written;
}

}  // namespace dtnf::exp
