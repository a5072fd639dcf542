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

// Command-line front end: sampling, observation, calibration, localization,
// Monte Carlo experiments, bounds and diagnostics.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "fuseloc/analysis.hpp"
#include "fuseloc/channel.hpp"
#include "fuseloc/config.hpp"
#include "fuseloc/error.hpp"
#include "fuseloc/estimator.hpp"
#include "fuseloc/geometry.hpp"
#include "fuseloc/io.hpp"
#include "fuseloc/pointproc.hpp"
#include "fuseloc/random.hpp"

namespace {

using namespace fuseloc;
using json = nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Invocation {
  std::string command;
  RunConfig cfg;
  std::string in;
  std::string fit_path;
  std::string meta;
  std::string data_out;
  std::string mode = "cmse";
  bool empirical = false;
  bool quiet = false;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

// Data goes to cfg.out ("-" is stdout).
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw Error("write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

void progress(const Invocation& inv, const std::string& message) {
  if (!inv.quiet) std::cerr << inv.command << ": " << message << '\n';
}

// Sidecar: the resolved configuration minus the fields that may differ
// between otherwise identical runs (thread count, output path).
json base_sidecar(const Invocation& inv) {
  json j;
  j["command"] = inv.command;
  json cfg = json::object();
  for (const auto& [k, v] : config_map(inv.cfg)) {
    if (k == "threads" || k == "out") continue;
    cfg[k] = v;
  }
  j["config"] = cfg;
  j["seed"] = inv.cfg.seed;
  j["dim"] = inv.cfg.dim;
  j["radius"] = inv.cfg.radius;
  return j;
}

void write_sidecar(const Invocation& inv, json j) {
  if (!inv.cfg.deterministic) {
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - inv.start;
    j["wall_time_s"] = wall.count();
  }
  const std::string text = j.dump(2) + "\n";
  std::string path = inv.meta;
  if (path.empty() && inv.cfg.out != "-") path = inv.cfg.out + ".json";
  if (path.empty()) {
    std::cerr << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open sidecar file '" + path + "'");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(std::string("cannot open ") + what + " '" + path + "'");
  return f;
}

CalibrationFit resolve_fit(const Invocation& inv, const ChannelParams& params) {
  if (!inv.fit_path.empty()) {
    std::ifstream f = open_input(inv.fit_path, "fit file");
    json j;
    try {
      f >> j;
    } catch (const json::exception& e) {
      throw ConfigError(inv.fit_path + ": " + e.what());
    }
    return fit_from_json(j);
  }
  if (inv.cfg.cal_samples == 0) return exact_fit(params);
  Rng rng = make_stream(inv.cfg.seed, {stream_tag("calibration")});
  const auto samples =
      generate_calibration_data(inv.cfg.cal_samples, inv.cfg.radius, inv.cfg.dim, params, rng);
  return calibrate(samples);
}

MomentEstimates resolve_moments(const Invocation& inv, const ChannelParams& params,
                                const CalibrationFit& fit) {
  Rng rng = make_stream(inv.cfg.seed, {stream_tag("moments")});
  return rhat_moments(params, fit, inv.cfg.radius, inv.cfg.dim, inv.cfg.moment_samples, rng);
}

PointPattern sample_from_config(const Invocation& inv) {
  const ProcessModel model = resolve_model(inv.cfg);
  Rng rng = make_stream(inv.cfg.seed, {stream_tag("sample")});
  PointPattern p = sample_pattern(model, inv.cfg.radius, inv.cfg.dim, rng,
                                  resolve_ginibre_method(inv.cfg));
  p.set_seed(inv.cfg.seed);
  return p;
}

void cmd_sample(const Invocation& inv) {
  const PointPattern pattern = sample_from_config(inv);
  Output out(inv.cfg.out);
  write_pattern_csv(out.stream(), pattern);
  out.finish();
  json j = base_sidecar(inv);
  j["model"] = to_json(pattern.model());
  j["count"] = pattern.size();
  j["effective_intensity"] = effective_intensity(pattern.model(), pattern.dim());
  write_sidecar(inv, j);
}

void cmd_observe(const Invocation& inv) {
  const ChannelParams params = resolve_channel(inv.cfg);
  const ProcessModel model = resolve_model(inv.cfg);
  PointPattern pattern = [&] {
    if (inv.in.empty()) return sample_from_config(inv);
    std::ifstream f = open_input(inv.in, "pattern file");
    return read_pattern_csv(f, inv.cfg.radius, model);
  }();
  Rng rng = make_stream(inv.cfg.seed, {stream_tag("observe")});
  const ObservationSet obs = observe(pattern, params, rng);
  Output out(inv.cfg.out);
  write_observations_csv(out.stream(), obs);
  out.finish();
  json j = base_sidecar(inv);
  j["channel"] = to_json(params);
  j["count"] = obs.size();
  if (inv.in.empty()) {
    j["model"] = to_json(model);
  } else {
    j["pattern_file"] = inv.in;
  }
  write_sidecar(inv, j);
}

void cmd_calibrate(const Invocation& inv) {
  const ChannelParams params = resolve_channel(inv.cfg);
  std::vector<CalibrationSample> samples;
  if (!inv.in.empty()) {
    std::ifstream f = open_input(inv.in, "calibration file");
    samples = read_calibration_csv(f);
  } else if (inv.cfg.cal_samples > 0) {
    Rng rng = make_stream(inv.cfg.seed, {stream_tag("calibration")});
    samples =
        generate_calibration_data(inv.cfg.cal_samples, inv.cfg.radius, inv.cfg.dim, params, rng);
    if (!inv.data_out.empty()) {
      std::ofstream f(inv.data_out, std::ios::binary);
      if (!f) throw ConfigError("cannot open data output '" + inv.data_out + "'");
      write_calibration_csv(f, samples);
    }
  }
  const CalibrationFit fit = samples.empty() ? exact_fit(params) : calibrate(samples);
  Output out(inv.cfg.out);
  out.stream() << to_json(fit).dump(2) << '\n';
  out.finish();
  json j = base_sidecar(inv);
  j["channel"] = to_json(params);
  j["fit"] = to_json(fit);
  if (!inv.in.empty()) j["data_file"] = inv.in;
  write_sidecar(inv, j);
}

void cmd_localize(const Invocation& inv) {
  if (inv.in.empty()) throw ConfigError("localize needs --in <observations.csv>");
  std::ifstream f = open_input(inv.in, "observation file");
  const ObservationSet obs = read_observations_csv(f);
  const ChannelParams params = resolve_channel(inv.cfg);
  const CalibrationFit fit = resolve_fit(inv, params);
  const TargetEstimate est = localize(obs, fit);
  Output out(inv.cfg.out);
  std::vector<std::string> header;
  for (std::size_t k = 1; k <= est.coords.dim(); ++k) header.push_back(fmt::format("x{}", k));
  out.stream() << fmt::format("{}\n{}\n", fmt::join(header, ","), fmt::join(est.coords.coords, ","));
  out.finish();
  json j = base_sidecar(inv);
  j["fit"] = to_json(fit);
  j["n_used"] = est.n_used;
  j["observation_file"] = inv.in;
  write_sidecar(inv, j);
}

void emit_result(const Invocation& inv, const ExperimentResult& result, const ChannelParams& params,
                 const CalibrationFit& fit) {
  Output out(inv.cfg.out);
  write_result_csv(out.stream(), result);
  out.finish();
  json j = base_sidecar(inv);
  j["result"] = to_json(result);
  j["channel"] = to_json(params);
  j["fit"] = to_json(fit);
  write_sidecar(inv, j);
}

void cmd_cmse(const Invocation& inv) {
  if (inv.cfg.model != "ppp") {
    throw ConfigError(
        "cmse requires model=ppp: conditioning on the sensor count has an exact sampler only "
        "for the Poisson process");
  }
  const ChannelParams params = resolve_channel(inv.cfg);
  const CalibrationFit fit = resolve_fit(inv, params);
  const MomentEstimates moments = resolve_moments(inv, params, fit);
  std::vector<std::size_t> grid;
  for (double n : inv.cfg.n_grid) grid.push_back(static_cast<std::size_t>(n));
  progress(inv, fmt::format("{} grid points x {} replicas", grid.size(), inv.cfg.reps));
  const ExperimentResult result = run_cmse_experiment(grid, inv.cfg.radius, inv.cfg.dim, params,
                                                      fit, moments, resolve_run_options(inv.cfg));
  emit_result(inv, result, params, fit);
}

void cmd_mse(const Invocation& inv) {
  const ChannelParams params = resolve_channel(inv.cfg);
  const CalibrationFit fit = resolve_fit(inv, params);
  const MomentEstimates moments = resolve_moments(inv, params, fit);
  const ProcessModel family = model_family(inv.cfg);
  progress(inv, fmt::format("{} grid points x {} replicas", inv.cfg.lambda_grid.size(),
                            inv.cfg.reps));
  ExperimentResult result =
      run_mse_experiment(family, inv.cfg.lambda_grid, inv.cfg.radius, inv.cfg.dim, params, fit,
                         moments, resolve_run_options(inv.cfg));
  emit_result(inv, result, params, fit);
}

void cmd_bound(const Invocation& inv) {
  const ChannelParams params = resolve_channel(inv.cfg);
  const CalibrationFit fit = resolve_fit(inv, params);
  const MomentEstimates m = resolve_moments(inv, params, fit);
  const double var_r = aoa_variance(inv.cfg.radius, params.aoa);
  if (inv.mode != "cmse" && inv.mode != "mse") throw ConfigError("--mode must be cmse or mse");
  const std::vector<double>& grid = inv.mode == "cmse" ? inv.cfg.n_grid : inv.cfg.lambda_grid;
  Output out(inv.cfg.out);
  out.stream() << "grid,bound,bound_stderr,m1,m1_stderr,m2,m2_stderr\n";
  for (double g : grid) {
    const BoundValue b =
        inv.mode == "cmse"
            ? cmse_bound(static_cast<std::size_t>(g), inv.cfg.dim, inv.cfg.radius, var_r, m)
            : mse_bound(g, inv.cfg.dim, inv.cfg.radius, var_r, m);
    out.stream() << fmt::format("{},{},{},{},{},{},{}\n", g, b.value, b.stderr_value, m.m1,
                                m.m1_stderr, m.m2, m.m2_stderr);
  }
  out.finish();
  json j = base_sidecar(inv);
  j["mode"] = inv.mode;
  j["moments"] = to_json(m);
  j["fit"] = to_json(fit);
  j["channel"] = to_json(params);
  j["aoa_variance_at_radius"] = var_r;
  write_sidecar(inv, j);
}

std::vector<double> default_r_grid(const ProcessModel& model) {
  double rmax = std::visit(
      [](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MaternI> || std::is_same_v<M, MaternII>) {
          return 3.0 * m.hardcore_radius;
        } else if constexpr (std::is_same_v<M, MaternCluster>) {
          return 3.0 * m.cluster_radius;
        } else if constexpr (std::is_same_v<M, ThomasCluster>) {
          return 6.0 * m.scatter_sd;
        } else if constexpr (std::is_same_v<M, AlphaGinibre>) {
          return 3.0 * std::sqrt(m.alpha / (std::numbers::pi * m.intensity));
        } else {
          return 1.0;
        }
      },
      model);
  std::vector<double> grid;
  for (int k = 1; k <= 10; ++k) grid.push_back(rmax * k / 10.0);
  return grid;
}

void cmd_paircorr(const Invocation& inv) {
  const ProcessModel model = resolve_model(inv.cfg);
  const int d = inv.cfg.dim;
  const std::vector<double> grid = inv.cfg.r_grid.empty() ? default_r_grid(model) : inv.cfg.r_grid;
  json j = base_sidecar(inv);
  j["model"] = to_json(model);
  Output out(inv.cfg.out);
  if (!inv.empirical) {
    out.stream() << "r,h\n";
    for (double r : grid) out.stream() << fmt::format("{},{}\n", r, pair_correlation(model, d, r));
    out.finish();
    write_sidecar(inv, j);
    return;
  }
  const RunOptions opts = resolve_run_options(inv.cfg);
  const GinibreMethod method = resolve_ginibre_method(inv.cfg);
  progress(inv, fmt::format("sampling {} patterns", opts.reps));
  std::vector<PointPattern> patterns;
  patterns.reserve(opts.reps);
  for (std::size_t k = 0; k < opts.reps; ++k) {
    Rng rng = make_stream(opts.seed, {stream_tag("paircorr"), k});
    patterns.push_back(sample_pattern(model, inv.cfg.radius, d, rng, method));
  }
  const PairCorrelationEstimate est = estimate_pair_correlation(patterns, grid);
  out.stream() << "r,h,ring_average,empirical,stderr\n";
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double ring = ring_average_pair_correlation(model, d, grid[g] - est.half_width,
                                                      grid[g] + est.half_width);
    out.stream() << fmt::format("{},{},{},{},{}\n", grid[g], pair_correlation(model, d, grid[g]),
                                ring, est.h[g], est.stderr_h[g]);
  }
  out.finish();
  j["reps"] = opts.reps;
  j["half_width"] = est.half_width;
  write_sidecar(inv, j);
}

void cmd_srd(const Invocation& inv) {
  const ProcessModel model = resolve_model(inv.cfg);
  const double value = srd_integral(model, inv.cfg.dim);
  Output out(inv.cfg.out);
  out.stream() << fmt::format("model,srd\n{},{}\n", model_tag(model), value);
  out.finish();
  json j = base_sidecar(inv);
  j["model"] = to_json(model);
  j["srd"] = value;
  write_sidecar(inv, j);
}

void cmd_converge(const Invocation& inv) {
  const ProcessModel model = resolve_model(inv.cfg);
  const int d = inv.cfg.dim;
  const ProcessModel reference = Ppp{effective_intensity(model, d)};
  const ChannelParams params = resolve_channel(inv.cfg);
  const LaplaceProbe probe = resolve_probe(inv.cfg);
  progress(inv, fmt::format("{} shadowing levels x {} replicas per model",
                            inv.cfg.sigma_db_grid.size(), inv.cfg.reps));
  const auto rows = run_convergence(reference, model, inv.cfg.sigma_db_grid, probe, inv.cfg.radius,
                                    d, params, resolve_run_options(inv.cfg));
  Output out(inv.cfg.out);
  out.stream() << "sigma_db,laplace_ppp,stderr_ppp,laplace_model,stderr_model,gap,gap_stderr,ks,"
                  "ks_critical\n";
  for (const ConvergenceRow& r : rows) {
    out.stream() << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.sigma_db, r.laplace_a.mean,
                                r.laplace_a.stderr_mean, r.laplace_b.mean, r.laplace_b.stderr_mean,
                                r.gap, r.gap_se, r.ks, r.ks_critical);
  }
  out.finish();
  json j = base_sidecar(inv);
  j["model"] = to_json(model);
  j["reference"] = to_json(reference);
  j["probe"] = to_json(probe);
  j["reps"] = inv.cfg.reps;
  write_sidecar(inv, j);
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return "--" + s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuseloc: RSS/AOA fusion localization over random sensor deployments"};
  app.require_subcommand(1);
  app.fallthrough();

  Invocation inv;
  std::string config_path;
  std::map<std::string, std::string> overrides;
  bool deterministic_flag = false;

  app.add_option("--config", config_path, "key=value configuration file");
  for (const std::string& key : config_keys()) {
    if (key == "deterministic") continue;
    app.add_option(flag_name(key), overrides[key], "config key " + key);
  }
  app.add_flag("--deterministic", deterministic_flag,
               "omit timing from sidecars so repeated runs are byte-identical");
  app.add_option("--meta", inv.meta, "sidecar JSON path (default <out>.json, stderr for -)");
  app.add_flag("--quiet", inv.quiet, "suppress progress messages");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sample", "draw a sensor pattern"},
      {"observe", "generate RSS/AOA observations for a pattern"},
      {"calibrate", "fit the log-linear RSS/distance model"},
      {"localize", "fuse observations into a target estimate"},
      {"cmse", "Monte Carlo conditional MSE over an n grid (PPP only)"},
      {"mse", "Monte Carlo MSE over an intensity grid"},
      {"bound", "MSE / CMSE upper bounds"},
      {"paircorr", "pair correlation on an r grid"},
      {"srd", "short-range dependence integral"},
      {"converge", "Laplace functional and KS gaps against a matched PPP"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) subs[name] = app.add_subcommand(name, help);
  for (const char* name : {"observe", "calibrate", "localize"}) {
    subs[name]->add_option("--in", inv.in, "input CSV");
  }
  subs["localize"]->add_option("--fit", inv.fit_path, "calibration fit JSON");
  for (const char* name : {"cmse", "mse", "bound"}) {
    subs[name]->add_option("--fit", inv.fit_path, "calibration fit JSON");
  }
  subs["calibrate"]->add_option("--data-out", inv.data_out, "write generated P,R pairs here");
  subs["bound"]->add_option("--mode", inv.mode, "cmse or mse")->check(CLI::IsMember({"cmse", "mse"}));
  subs["paircorr"]->add_flag("--empirical", inv.empirical,
                             "add ring-estimator values from reps sampled patterns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) inv.command = name;
  }

  try {
    if (!config_path.empty()) load_config_file(inv.cfg, config_path);
    for (const std::string& key : config_keys()) {
      if (key == "deterministic") continue;
      if (app.count(flag_name(key)) > 0) {
        set_config_value(inv.cfg, key, overrides[key], flag_name(key));
      }
    }
    if (deterministic_flag) inv.cfg.deterministic = true;
    validate(inv.cfg);

    static const std::map<std::string, std::function<void(const Invocation&)>> dispatch = {
        {"sample", cmd_sample},   {"observe", cmd_observe},   {"calibrate", cmd_calibrate},
        {"localize", cmd_localize}, {"cmse", cmd_cmse},       {"mse", cmd_mse},
        {"bound", cmd_bound},     {"paircorr", cmd_paircorr}, {"srd", cmd_srd},
        {"converge", cmd_converge},
    };
    dispatch.at(inv.command)(inv);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
