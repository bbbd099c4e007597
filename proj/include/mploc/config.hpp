#pragma once

// Run configuration: a versioned JSON document describing the model, the
// scale parameters and one probe.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mploc/errors.hpp"
#include "mploc/model.hpp"
#include "mploc/msa.hpp"

namespace mploc {

inline constexpr int kSchemaVersion = 1;

// Diagnostic carrying the dotted path of the offending field, or the
// line and column of a parse failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline const std::vector<std::string>& probe_names() {
  static const std::vector<std::string> names{"ct-check", "wegner", "initial", "stability", "pair",
                                              "correlator", "eigdecay", "dynloc", "recursion", "cover"};
  return names;
}

struct ProbeOptions {
  std::string name;
  std::size_t trials = 100;
  std::vector<int> scales;         // probe-specific default when empty
  std::vector<double> energies;    // empty -> five interior energies
  std::optional<int> L;            // single-scale probes
  int k = 0;
  std::vector<double> h_list{0.01, 0.1, 1.0};
  double h = 0.0;
  double mu_tilde = 1.0;
  double grid_step = 0.0;          // 0 -> probe default
  int stride = 1;
  bool with_cnr = false;
  bool pair = false;
  std::optional<double> resonance_width;
  std::optional<Interval> interval;
  double s = 2.0;
  bool cnr_surrogate = false;

  bool operator==(const ProbeOptions&) const = default;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  int N = 2;
  int d = 1;
  int n = 2;
  DisorderSpec disorder;
  InteractionSpec interaction;
  MsaParams msa;
  ProbeOptions probe;
  std::string output_dir;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;

  // Copies N, d, n into the scale parameters and checks every range.
  void validate() const;
  MsaParams params() const;

  bool operator==(const RunConfig&) const = default;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

// Parses text; syntax errors report line and column.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace mploc
