#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mploc/config.hpp"
#include "mploc/experiments.hpp"
#include "mploc/io.hpp"

namespace mploc {

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{"probe", "L", "n", "h", "E_or_grid", "estimate", "ci_lo", "ci_hi", "trials", "seed"};
  return cols;
}

struct Assertion {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ProbeOutput {
  CsvTable summary;
  std::vector<std::pair<std::string, CsvTable>> tables;  // file name, table
  std::vector<nlohmann::json> trial_log;
  std::vector<Assertion> assertions;  // hard checks only

  bool passed() const;
};

TrialPlan make_plan(const RunConfig& config);
ProbeOutput run_probe(const RunConfig& config);

// config.json, metadata.json, trials.jsonl, summary.csv and probe tables.
void write_run(const std::string& dir, const RunConfig& config, const ProbeOutput& output);

}  // namespace mploc
