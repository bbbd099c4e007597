#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mploc {

// %.12g; nan and inf spelled out.
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws when absent.
  std::size_t column(const std::string& name) const;
};

// Fields never contain commas, quotes or newlines; no quoting is done.
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& records);
std::vector<nlohmann::json> read_jsonl(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace mploc
