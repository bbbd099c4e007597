#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "mploc/config.hpp"
#include "mploc/errors.hpp"
#include "mploc/runner.hpp"

namespace {

std::vector<int> parse_scales(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw mploc::ConfigError("--scales: '" + item + "' is not an integer");
    }
  }
  return out;
}

void print_mode(const mploc::RunConfig& config) {
  const auto check = config.params().strict_check();
  std::cout << "mode: " << (check.strict ? "strict" : "desk") << "\n";
  for (const auto& v : check.violations) std::cout << "  strict constraint not met: " << v << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and exact-diagonalization probes for multi-particle localization"};
  app.require_subcommand(1);

  std::string config_path;
  bool paper_strict = false;
  auto* validate = app.add_subcommand("validate", "Check a config file and report strict or desk mode");
  validate->add_option("config", config_path, "Config file")->required();
  validate->add_flag("--paper-strict", paper_strict, "Fail unless the strict parameter constraints hold");

  std::string probe, scales, out_dir;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  auto* run = app.add_subcommand("run", "Run the configured probe and write its outputs");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--probe", probe, "Probe name (overrides the config)")
      ->check(CLI::IsMember(mploc::probe_names()));
  run->add_option("--trials", trials, "Number of trials");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--scales", scales, "Comma-separated scales (recursion: number of scales)");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--workers", workers, "Worker threads (0 = all cores)");
  run->add_flag("--paper-strict", paper_strict, "Fail unless the strict parameter constraints hold");

  CLI11_PARSE(app, argc, argv);

  try {
    mploc::RunConfig config = mploc::load_config(config_path);
    if (*validate) {
      std::cout << "config ok: " << config_path << "\n";
      print_mode(config);
      return paper_strict && !config.params().strict_check().strict ? 2 : 0;
    }

    if (!probe.empty()) config.probe.name = probe;
    if (trials) config.probe.trials = *trials;
    if (seed) {
      config.master_seed = *seed;
      config.disorder.master_seed = *seed;
    }
    if (!scales.empty()) config.probe.scales = parse_scales(scales);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (workers) config.workers = *workers;
    config.validate();
    if (config.output_dir.empty()) throw mploc::ConfigError("output_dir: missing (set it in the config or pass --out)");
    if (paper_strict && !config.params().strict_check().strict) {
      print_mode(config);
      std::cerr << "error: --paper-strict requested but the strict constraints do not hold\n";
      return 2;
    }

    const auto output = mploc::run_probe(config);
    mploc::write_run(config.output_dir, config, output);
    for (const auto& row : output.summary.rows) {
      std::cout << row[0] << " L=" << row[1] << " E=" << row[4] << " estimate=" << row[5];
      if (!row[6].empty()) std::cout << " ci=[" << row[6] << ", " << row[7] << "]";
      std::cout << "\n";
    }
    for (const auto& a : output.assertions)
      std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << "\n";
    std::cout << "outputs written to " << config.output_dir << "\n";
    return output.passed() ? 0 : 1;
  } catch (const mploc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mploc::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
