#ifndef DYNADMM_CONFIG_HPP_
#define DYNADMM_CONFIG_HPP_

// Run configuration for the experiment harness. File format: one
// `key = value` per line, `#` starts a comment, blank lines ignored. Keys are
// exactly the RunConfig field names; unknown keys are errors.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynadmm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { Sharing, Lasso, Bounds };

inline const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Sharing: return "sharing";
    case Experiment::Lasso: return "lasso";
    default: return "bounds";
  }
}

inline Experiment parse_experiment(const std::string& s) {
  if (s == "sharing") return Experiment::Sharing;
  if (s == "lasso") return Experiment::Lasso;
  if (s == "bounds") return Experiment::Bounds;
  throw ConfigError("unknown experiment '" + s + "' (expected sharing, lasso or bounds)");
}

struct RunConfig {
  Experiment experiment = Experiment::Sharing;
  std::int64_t n = 20;
  std::int64_t p = 5;
  std::int64_t m = 10;
  std::int64_t q = 2;
  double eta = 0.2;
  double epsilon = 1.0;
  double gamma = 1.0;
  double rho = 1.0;
  double sigma = 0.1;
  std::int64_t steps = 60;
  std::int64_t trials = 100;
  std::uint64_t seed = 1;
  std::vector<double> rho_sweep;
  std::string output_dir = ".";

  /// Defaults reproducing the reference experiment setups.
  static RunConfig defaults(Experiment e) {
    RunConfig c;
    c.experiment = e;
    switch (e) {
      case Experiment::Sharing:
        break;
      case Experiment::Lasso:
        c.m = 10;
        c.p = 30;
        c.q = 2;
        c.eta = 0.01;
        c.gamma = 0.2;
        c.sigma = 0.1;
        c.steps = 100;
        break;
      case Experiment::Bounds:
        c.p = 5;
        c.eta = 0.1;
        c.steps = 500;
        c.trials = 20;
        break;
    }
    return c;
  }

  /// Penalties to run: rho_sweep when given, else {rho}.
  std::vector<double> rhos() const { return rho_sweep.empty() ? std::vector<double>{rho} : rho_sweep; }

  void validate() const {
    auto need = [](bool ok, const std::string& msg) {
      if (!ok) throw ConfigError(msg);
    };
    need(steps >= 1, "steps must be >= 1");
    need(trials >= 1, "trials must be >= 1");
    need(p >= 1, "p must be >= 1");
    need(eta >= 0.0, "eta must be >= 0");
    need(rho > 0.0, "rho must be > 0");
    for (double r : rho_sweep) need(r > 0.0, "rho_sweep entries must be > 0");
    switch (experiment) {
      case Experiment::Sharing:
        need(n >= 1, "n must be >= 1");
        need(epsilon > 0.0, "epsilon must be > 0");
        need(gamma > 0.0, "gamma must be > 0");
        break;
      case Experiment::Lasso:
        need(m >= 1, "m must be >= 1");
        need(q >= 1 && q <= p, "q must satisfy 1 <= q <= p");
        need(gamma > 0.0, "gamma must be > 0");
        need(sigma >= 0.0, "sigma must be >= 0");
        break;
      case Experiment::Bounds:
        need(epsilon > 0.0, "epsilon must be > 0");
        break;
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  }
}

inline std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

}  // namespace detail

/// Applies one key/value pair; throws ConfigError on unknown keys or bad values.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_double;
  using detail::parse_int;
  if (key == "experiment") {
    c.experiment = parse_experiment(value);
  } else if (key == "n") {
    c.n = parse_int(key, value);
  } else if (key == "p") {
    c.p = parse_int(key, value);
  } else if (key == "m") {
    c.m = parse_int(key, value);
  } else if (key == "q") {
    c.q = parse_int(key, value);
  } else if (key == "eta") {
    c.eta = parse_double(key, value);
  } else if (key == "epsilon") {
    c.epsilon = parse_double(key, value);
  } else if (key == "gamma") {
    c.gamma = parse_double(key, value);
  } else if (key == "rho") {
    c.rho = parse_double(key, value);
  } else if (key == "sigma") {
    c.sigma = parse_double(key, value);
  } else if (key == "steps") {
    c.steps = parse_int(key, value);
  } else if (key == "trials") {
    c.trials = parse_int(key, value);
  } else if (key == "seed") {
    const auto s = parse_int(key, value);
    if (s < 0) throw ConfigError("'seed' must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "rho_sweep") {
    c.rho_sweep = detail::parse_list(key, value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

/// Parses key=value text into a key -> value map, preserving the last value of repeated keys.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out[key] = detail::trim(line.substr(eq + 1));
  }
  return out;
}

/// Defaults for `e`, overridden by the settings in `text`. A file naming a
/// different experiment is rejected.
inline RunConfig load_config(Experiment e, const std::string& text) {
  RunConfig c = RunConfig::defaults(e);
  for (const auto& [key, value] : parse_config_text(text)) {
    apply_setting(c, key, value);
  }
  if (c.experiment != e) {
    throw ConfigError(std::string("config is for experiment '") + experiment_name(c.experiment) +
                      "' but '" + experiment_name(e) + "' was requested");
  }
  return c;
}

inline RunConfig load_config_file(Experiment e, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_config(e, ss.str());
}

}  // namespace dynadmm

#endif  // DYNADMM_CONFIG_HPP_
