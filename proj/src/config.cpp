#include "mploc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mploc {

namespace {

using nlohmann::json;

// Walks one JSON object, recording which keys were consumed so unknown keys
// can be reported with their full path.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  Node child(const std::string& key) {
    if (!has(key)) fail(at(key), "missing required field");
    return Node(j_.at(key), at(key));
  }

  template <typename T>
  T get(const std::string& key) {
    if (!has(key)) fail(at(key), "missing required field");
    return convert<T>(key);
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? convert<T>(key) : fallback;
  }

  template <typename T>
  std::optional<T> maybe(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return convert<T>(key);
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) fail(at(item.key()), "unknown field");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
  }

 private:
  template <typename T>
  T convert(const std::string& key) {
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(at(key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>)
          if (v.is_number_integer() && !v.is_number_unsigned()) fail(at(key), "expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(at(key), "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(at(key), "expected a string");
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); }))
          fail(at(key), "expected an array of numbers");
      } else if constexpr (std::is_same_v<T, std::vector<int>>) {
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer(); }))
          fail(at(key), "expected an array of integers");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(at(key), e.what());
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& path, const std::string& message) {
  if (!ok) Node::fail(path, message);
}

}  // namespace

MsaParams RunConfig::params() const {
  MsaParams p = msa;
  p.N = N;
  p.d = d;
  p.n = n;
  return p;
}

void RunConfig::validate() const {
  check(schema_version == kSchemaVersion, "schema_version", "unsupported version " + std::to_string(schema_version));
  check(N >= 1, "model.N", "must be >= 1");
  check(d >= 1, "model.d", "must be >= 1");
  check(n >= 1 && n <= N, "model.n", "must lie in [1, N]");
  try {
    disorder.validate();
  } catch (const Error& e) {
    Node::fail("model.disorder", e.what());
  }
  try {
    interaction.validate();
  } catch (const Error& e) {
    Node::fail("model.interaction", e.what());
  }
  const MsaParams p = params();
  check(p.m > 0.0, "msa.m", "must be > 0");
  check(p.p > 0.0, "msa.p", "must be > 0");
  check(p.theta > 0.0 && p.theta < 1.0 / 3.0, "msa.theta", "must lie in (0, 1/3)");
  check(p.alpha > 1.0, "msa.alpha", "must be > 1");
  check(p.L0 >= 2, "msa.L0", "must be >= 2");
  check(p.resonance_exponent > 0.0 && p.resonance_exponent < 1.0, "msa.resonance_exponent", "must lie in (0, 1)");
  const auto& names = probe_names();
  check(std::find(names.begin(), names.end(), probe.name) != names.end(), "probe.name",
        "unknown probe '" + probe.name + "'");
  check(probe.trials >= 1, "probe.trials", "must be >= 1");
  for (int L : probe.scales) check(L >= 0, "probe.scales", "scales must be >= 0");
  if (probe.L) check(*probe.L >= 0, "probe.L", "must be >= 0");
  check(probe.k >= 0, "probe.k", "must be >= 0");
  check(probe.stride >= 1, "probe.stride", "must be >= 1");
  check(probe.grid_step >= 0.0, "probe.grid_step", "must be >= 0");
  check(probe.mu_tilde > 0.0, "probe.mu_tilde", "must be > 0");
  if (probe.resonance_width) check(*probe.resonance_width > 0.0, "probe.resonance_width", "must be > 0");
  if (probe.interval) check(probe.interval->hi >= probe.interval->lo, "probe.interval", "hi must be >= lo");
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Node root(j, "");
  c.schema_version = root.get<int>("schema_version");

  Node model = root.child("model");
  c.N = model.get<int>("N");
  c.d = model.get<int>("d");
  c.n = model.get<int>("n");
  {
    Node dis = model.child("disorder");
    const auto family = dis.get<std::string>("family");
    try {
      c.disorder.family = disorder_family_from_string(family);
    } catch (const Error&) {
      Node::fail(dis.at("family"), "unknown family '" + family + "'");
    }
    c.disorder.support_bound = dis.get<double>("M");
    c.disorder.density_weight_exponent = dis.get_or<double>("kappa", c.disorder.density_weight_exponent);
    c.disorder.gaussian_sigma = dis.get_or<double>("gaussian_sigma", c.disorder.gaussian_sigma);
    if (dis.has("piecewise")) {
      Node pw = dis.child("piecewise");
      c.disorder.piecewise.edges = pw.get<std::vector<double>>("edges");
      c.disorder.piecewise.weights = pw.get<std::vector<double>>("weights");
      pw.finish();
    }
    dis.finish();
  }
  if (model.has("interaction")) {
    Node in = model.child("interaction");
    c.interaction.phi = in.get_or<std::vector<double>>("phi", c.interaction.phi);
    c.interaction.r0 = in.get_or<int>("r0", c.interaction.r0);
    c.interaction.h = in.get_or<double>("h", c.interaction.h);
    in.finish();
  }
  model.finish();

  Node msa = root.child("msa");
  c.msa.m = msa.get<double>("m");
  c.msa.p = msa.get<double>("p");
  c.msa.theta = msa.get<double>("theta");
  c.msa.alpha = msa.get_or<double>("alpha", c.msa.alpha);
  c.msa.L0 = msa.get_or<int>("L0", c.msa.L0);
  c.msa.resonance_exponent = msa.get_or<double>("resonance_exponent", c.msa.resonance_exponent);
  c.msa.J_threshold = msa.get_or<int>("J", c.msa.J_threshold);
  msa.finish();

  Node probe = root.child("probe");
  auto& p = c.probe;
  p.name = probe.get<std::string>("name");
  p.trials = probe.get_or<std::size_t>("trials", p.trials);
  p.scales = probe.get_or<std::vector<int>>("scales", p.scales);
  p.energies = probe.get_or<std::vector<double>>("energies", p.energies);
  p.L = probe.maybe<int>("L");
  p.k = probe.get_or<int>("k", p.k);
  p.h_list = probe.get_or<std::vector<double>>("h_list", p.h_list);
  p.h = probe.get_or<double>("h", p.h);
  p.mu_tilde = probe.get_or<double>("mu_tilde", p.mu_tilde);
  p.grid_step = probe.get_or<double>("grid_step", p.grid_step);
  p.stride = probe.get_or<int>("stride", p.stride);
  p.with_cnr = probe.get_or<bool>("with_cnr", p.with_cnr);
  p.pair = probe.get_or<bool>("pair", p.pair);
  p.resonance_width = probe.maybe<double>("resonance_width");
  if (auto iv = probe.maybe<std::vector<double>>("interval")) {
    if (iv->size() != 2) Node::fail(probe.at("interval"), "expected [lo, hi]");
    p.interval = Interval{(*iv)[0], (*iv)[1]};
  }
  p.s = probe.get_or<double>("s", p.s);
  p.cnr_surrogate = probe.get_or<bool>("cnr_surrogate", p.cnr_surrogate);
  probe.finish();

  c.output_dir = root.get_or<std::string>("output_dir", "");
  c.master_seed = root.get<std::uint64_t>("master_seed");
  c.workers = root.get_or<unsigned>("workers", 0u);
  root.finish();

  c.disorder.master_seed = c.master_seed;
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  json disorder{{"family", to_string(c.disorder.family)},
                {"M", c.disorder.support_bound},
                {"kappa", c.disorder.density_weight_exponent},
                {"gaussian_sigma", c.disorder.gaussian_sigma}};
  if (!c.disorder.piecewise.edges.empty() || !c.disorder.piecewise.weights.empty())
    disorder["piecewise"] = {{"edges", c.disorder.piecewise.edges}, {"weights", c.disorder.piecewise.weights}};
  json probe{{"name", c.probe.name},         {"trials", c.probe.trials},     {"scales", c.probe.scales},
             {"energies", c.probe.energies}, {"k", c.probe.k},               {"h_list", c.probe.h_list},
             {"h", c.probe.h},               {"mu_tilde", c.probe.mu_tilde}, {"grid_step", c.probe.grid_step},
             {"stride", c.probe.stride},     {"with_cnr", c.probe.with_cnr}, {"pair", c.probe.pair},
             {"s", c.probe.s},               {"cnr_surrogate", c.probe.cnr_surrogate}};
  if (c.probe.L) probe["L"] = *c.probe.L;
  if (c.probe.resonance_width) probe["resonance_width"] = *c.probe.resonance_width;
  if (c.probe.interval) probe["interval"] = {c.probe.interval->lo, c.probe.interval->hi};
  return json{{"schema_version", c.schema_version},
              {"model",
               {{"N", c.N},
                {"d", c.d},
                {"n", c.n},
                {"disorder", disorder},
                {"interaction", {{"phi", c.interaction.phi}, {"r0", c.interaction.r0}, {"h", c.interaction.h}}}}},
              {"msa",
               {{"m", c.msa.m},
                {"p", c.msa.p},
                {"theta", c.msa.theta},
                {"alpha", c.msa.alpha},
                {"L0", c.msa.L0},
                {"resonance_exponent", c.msa.resonance_exponent},
                {"J", c.msa.J_threshold}}},
              {"probe", probe},
              {"output_dir", c.output_dir},
              {"master_seed", c.master_seed},
              {"workers", c.workers}};
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                      e.what());
  }
  return config_from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mploc
