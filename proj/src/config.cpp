// Copyright 2026 The fuseloc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fuseloc/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <istream>
#include <sstream>

#include "fuseloc/io.hpp"

namespace fuseloc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw ConfigError("'" + s + "' is not a finite number");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("'" + s + "' is not a non-negative integer");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError("'" + s + "' is out of range");
  }
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("'" + s + "' is not a boolean (true/false)");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string dump_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_grid(const std::vector<double>& g, const char* name, bool integral,
                  double min_value = 0.0, bool allow_min = false) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    require(g[i] > min_value || (allow_min && g[i] == min_value),
            fmt::format("{} values must be {} {}", name, allow_min ? ">=" : ">", min_value));
    if (integral) {
      require(g[i] == std::floor(g[i]), fmt::format("{} values must be integers", name));
    }
    if (i > 0) require(g[i] > g[i - 1], fmt::format("{} must be strictly increasing", name));
  }
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

// Per-key range rule, checked as the value is read so file errors keep
// their line.
struct Rule {
  bool (*ok)(double) = nullptr;
  const char* text = "";
};

bool positive(double x) { return x > 0.0; }
bool non_negative(double x) { return x >= 0.0; }
bool above_two(double x) { return x > 2.0; }
bool unit_interval(double x) { return x > 0.0 && x <= 1.0; }

constexpr Rule kAny{};
constexpr Rule kPositive{positive, "must be > 0"};
constexpr Rule kNonNegative{non_negative, "must be >= 0"};
constexpr Rule kAboveTwo{above_two, "must be > 2"};
constexpr Rule kUnit{unit_interval, "must lie in (0, 1]"};

double checked(const std::string& v, Rule rule) {
  const double x = parse_double(v);
  if (rule.ok != nullptr && !rule.ok(x)) throw ConfigError(rule.text);
  return x;
}

Field double_field(double RunConfig::*member, Rule rule = kAny) {
  return {[member, rule](RunConfig& c, const std::string& v) { c.*member = checked(v, rule); },
          [member](const RunConfig& c) -> std::optional<std::string> {
            return format_double(c.*member);
          }};
}

Field optional_double_field(std::optional<double> RunConfig::*member, Rule rule = kAny) {
  return {[member, rule](RunConfig& c, const std::string& v) { c.*member = checked(v, rule); },
          [member](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return format_double(*(c.*member));
          }};
}

template <class T>
Field integer_field(T RunConfig::*member, std::uint64_t min = 0) {
  return {[member, min](RunConfig& c, const std::string& v) {
            const std::uint64_t x = parse_u64(v);
            if (x > std::numeric_limits<T>::max()) throw ConfigError("'" + v + "' is too large");
            if (x < min) throw ConfigError(fmt::format("must be >= {}", min));
            c.*member = static_cast<T>(x);
          },
          [member](const RunConfig& c) -> std::optional<std::string> {
            return std::to_string(c.*member);
          }};
}

Field string_field(std::string RunConfig::*member, std::vector<std::string> allowed = {}) {
  return {[member, allowed](RunConfig& c, const std::string& v) {
            if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
              throw ConfigError(fmt::format("'{}' is not one of {}", v, fmt::join(allowed, ", ")));
            }
            c.*member = v;
          },
          [member](const RunConfig& c) -> std::optional<std::string> { return c.*member; }};
}

Field list_field(std::vector<double> RunConfig::*member,
                 std::function<void(const std::vector<double>&)> check) {
  return {[member, check](RunConfig& c, const std::string& v) {
            std::vector<double> g = parse_list(v);
            check(g);
            c.*member = std::move(g);
          },
          [member](const RunConfig& c) -> std::optional<std::string> {
            if ((c.*member).empty()) return std::nullopt;
            return dump_list(c.*member);
          }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["dim"] = {[](RunConfig& c, const std::string& v) {
                  const std::uint64_t d = parse_u64(v);
                  if (d < 2 || d > 64) throw ConfigError("dim must lie in [2, 64]");
                  c.dim = static_cast<int>(d);
                },
                [](const RunConfig& c) -> std::optional<std::string> {
                  return std::to_string(c.dim);
                }};
    t["radius"] = double_field(&RunConfig::radius, kPositive);
    t["model"] = string_field(&RunConfig::model,
                              {"ppp", "matern1", "matern2", "mcp", "tcp", "ginibre"});
    t["lambda"] = double_field(&RunConfig::lambda, kPositive);
    t["lambda_p"] = optional_double_field(&RunConfig::lambda_p, kPositive);
    t["target_lambda"] = optional_double_field(&RunConfig::target_lambda, kPositive);
    t["rc"] = double_field(&RunConfig::rc, kPositive);
    t["cbar"] = double_field(&RunConfig::cbar, kPositive);
    t["sigma_c"] = double_field(&RunConfig::sigma_c, kPositive);
    t["alpha"] = double_field(&RunConfig::alpha, kUnit);
    t["ginibre_method"] = string_field(&RunConfig::ginibre_method, {"kostlan", "spectral"});
    t["K"] = double_field(&RunConfig::K, kPositive);
    t["beta"] = double_field(&RunConfig::beta, kAboveTwo);
    t["sigma_db"] = double_field(&RunConfig::sigma_db, kNonNegative);
    t["tau_min"] = double_field(&RunConfig::tau_min, kPositive);
    t["tau_max"] = double_field(&RunConfig::tau_max, kPositive);
    t["aoa_slope"] = double_field(&RunConfig::aoa_slope, kPositive);
    t["aoa_midpoint"] = double_field(&RunConfig::aoa_midpoint);
    t["reps"] = integer_field(&RunConfig::reps, 1);
    t["seed"] = integer_field(&RunConfig::seed);
    t["threads"] = integer_field(&RunConfig::threads, 1);
    t["deterministic"] = {[](RunConfig& c, const std::string& v) { c.deterministic = parse_bool(v); },
                          [](const RunConfig& c) -> std::optional<std::string> {
                            return c.deterministic ? "true" : "false";
                          }};
    t["cal_samples"] = integer_field(&RunConfig::cal_samples);
    t["moment_samples"] = integer_field(&RunConfig::moment_samples);
    t["refit"] = integer_field(&RunConfig::refit);
    t["n_grid"] = list_field(&RunConfig::n_grid, [](const auto& g) { require_grid(g, "n_grid", true); });
    t["lambda_grid"] =
        list_field(&RunConfig::lambda_grid, [](const auto& g) { require_grid(g, "lambda_grid", false); });
    t["sigma_db_grid"] = list_field(&RunConfig::sigma_db_grid, [](const auto& g) {
      require_grid(g, "sigma_db_grid", false, 0.0, true);
    });
    t["r_grid"] = list_field(&RunConfig::r_grid, [](const auto& g) { require_grid(g, "r_grid", false); });
    t["probe_n_lo"] = optional_double_field(&RunConfig::probe_n_lo, kPositive);
    t["probe_n_hi"] = optional_double_field(&RunConfig::probe_n_hi, kPositive);
    t["probe_log_shoulder"] = optional_double_field(&RunConfig::probe_log_shoulder, kNonNegative);
    t["probe_angle_shoulder"] = optional_double_field(&RunConfig::probe_angle_shoulder, kNonNegative);
    t["probe_weight"] = optional_double_field(&RunConfig::probe_weight, kNonNegative);
    t["out"] = string_field(&RunConfig::out);
    return t;
  }();
  return table;
}

}  // namespace

RunConfig::RunConfig() {
  const AoaVarianceParams aoa = default_aoa_params();
  tau_min = aoa.tau_min;
  tau_max = aoa.tau_max;
  aoa_slope = aoa.slope;
  aoa_midpoint = aoa.midpoint;
  seed = default_seed();
}

std::uint64_t default_seed() {
  const char* env = std::getenv("FUSELOC_SEED");
  if (env == nullptr || *env == '\0') return 1;
  try {
    return parse_u64(env);
  } catch (const ConfigError&) {
    throw ConfigError(std::string("FUSELOC_SEED: '") + env + "' is not a non-negative integer");
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, field] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& where) {
  const std::string prefix = where.empty() ? "" : where + ": ";
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError(prefix + "unknown key '" + key + "'");
  try {
    it->second.set(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + key + ": " + e.what());
  }
}

void load_config(RunConfig& cfg, std::istream& is, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::string where = fmt::format("{}:{}", source, line_no);
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    set_config_value(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), where);
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  load_config(cfg, in, path);
}

std::map<std::string, std::string> config_map(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [name, field] : fields()) {
    if (auto v = field.get(cfg)) out[name] = *v;
  }
  return out;
}

std::string canonical_dump(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_map(cfg)) out += k + "=" + v + "\n";
  return out;
}

void validate(const RunConfig& cfg) {
  require(cfg.dim >= 2, "dim must be >= 2");
  require(cfg.radius > 0.0, "radius must be > 0");
  require(cfg.reps >= 2, "reps must be >= 2");
  require(cfg.threads >= 1, "threads must be >= 1");
  require(cfg.cal_samples == 0 || cfg.cal_samples >= 2, "cal_samples must be 0 or >= 2");
  require(cfg.moment_samples >= 1000, "moment_samples must be >= 1000");
  require(cfg.refit == 0 || cfg.refit >= 2, "refit must be 0 or >= 2");
  require(cfg.sigma_db >= 0.0, "sigma_db must be >= 0");
  require(cfg.ginibre_method == "kostlan" || cfg.ginibre_method == "spectral",
          "ginibre_method must be kostlan or spectral");
  require_grid(cfg.n_grid, "n_grid", true);
  require_grid(cfg.lambda_grid, "lambda_grid", false);
  require_grid(cfg.r_grid, "r_grid", false);
  require_grid(cfg.sigma_db_grid, "sigma_db_grid", false, 0.0, true);
  validate(resolve_model(cfg), cfg.dim);
  validate(resolve_channel(cfg));
}

ProcessModel resolve_model(const RunConfig& cfg) {
  const std::string& m = cfg.model;
  if (m == "ppp") return Ppp{cfg.target_lambda.value_or(cfg.lambda)};
  if (m == "ginibre") return AlphaGinibre{cfg.alpha, cfg.target_lambda.value_or(cfg.lambda)};
  if (m == "matern1" || m == "matern2") {
    const bool type_i = m == "matern1";
    double lp = 0.0;
    if (cfg.lambda_p) {
      lp = *cfg.lambda_p;
    } else {
      const double target = cfg.target_lambda.value_or(cfg.lambda);
      lp = type_i ? match_matern_i_parent(target, cfg.rc, cfg.dim)
                  : match_matern_ii_parent(target, cfg.rc, cfg.dim);
    }
    if (type_i) return MaternI{lp, cfg.rc};
    return MaternII{lp, cfg.rc};
  }
  if (m == "mcp" || m == "tcp") {
    const double lp = cfg.lambda_p.value_or(0.4);
    require(lp > 0.0, "lambda_p must be > 0");
    const double cbar = cfg.target_lambda ? *cfg.target_lambda / lp : cfg.cbar;
    if (m == "mcp") return MaternCluster{lp, cbar, cfg.rc};
    return ThomasCluster{lp, cbar, cfg.sigma_c};
  }
  throw ConfigError("unknown model '" + m + "' (ppp, matern1, matern2, mcp, tcp, ginibre)");
}

ProcessModel model_family(const RunConfig& cfg) {
  const std::string& m = cfg.model;
  if (m == "matern1") return MaternI{cfg.lambda_p.value_or(1.0), cfg.rc};
  if (m == "matern2") return MaternII{cfg.lambda_p.value_or(1.0), cfg.rc};
  return resolve_model(cfg);
}

GinibreMethod resolve_ginibre_method(const RunConfig& cfg) {
  return cfg.ginibre_method == "spectral" ? GinibreMethod::spectral : GinibreMethod::kostlan;
}

ChannelParams resolve_channel(const RunConfig& cfg) {
  ChannelParams p{cfg.K, cfg.beta, sigma_from_db(cfg.sigma_db),
                  {cfg.tau_min, cfg.tau_max, cfg.aoa_slope, cfg.aoa_midpoint}};
  validate(p);
  return p;
}

RunOptions resolve_run_options(const RunConfig& cfg) {
  RunOptions o;
  o.seed = cfg.seed;
  o.reps = cfg.reps;
  o.threads = cfg.threads;
  if (cfg.refit > 0) o.refit_samples = cfg.refit;
  return o;
}

LaplaceProbe resolve_probe(const RunConfig& cfg) {
  LaplaceProbe p = default_probe(resolve_channel(cfg), cfg.dim);
  if (cfg.probe_n_lo) p.n_lo = *cfg.probe_n_lo;
  if (cfg.probe_n_hi) p.n_hi = *cfg.probe_n_hi;
  if (cfg.probe_n_lo || cfg.probe_n_hi) {
    require(p.n_lo > 0.0 && p.n_hi > p.n_lo, "probe box needs 0 < probe_n_lo < probe_n_hi");
    p.log_shoulder = 0.2 * std::log(p.n_hi / p.n_lo);
  }
  if (cfg.probe_log_shoulder) p.log_shoulder = *cfg.probe_log_shoulder;
  if (cfg.probe_angle_shoulder) p.angle_shoulder = *cfg.probe_angle_shoulder;
  if (cfg.probe_weight) p.weight = *cfg.probe_weight;
  validate(p, cfg.dim);
  return p;
}

}  // namespace fuseloc
