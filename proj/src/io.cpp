#include "mploc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mploc/errors.hpp"

namespace mploc {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error("CSV has no column '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join_fields(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find_first_of(",\"\n") != std::string::npos)
      throw Error("CSV field contains a delimiter: " + fields[i]);
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << join_fields(table.header) << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw Error("CSV row width does not match the header in " + path);
    out << join_fields(row) << '\n';
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(path + " is empty");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_line(line);
    if (row.size() != t.header.size()) throw Error("malformed CSV row in " + path + ": " + line);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& r : records) out << r.dump() << '\n';
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mploc
