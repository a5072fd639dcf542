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

#include "fuseloc/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "fuseloc/error.hpp"
#include "fuseloc/geometry.hpp"
#include "fuseloc/parallel.hpp"

namespace fuseloc {

namespace {

constexpr std::uint64_t kMomentsTag = stream_tag("moments");
constexpr std::uint64_t kCmseTag = stream_tag("cmse");
constexpr std::uint64_t kMseTag = stream_tag("mse");
constexpr std::uint64_t kLaplaceTag = stream_tag("laplace");
constexpr std::uint64_t kKsTag = stream_tag("ks");
constexpr std::uint64_t kConvergeTag = stream_tag("converge");

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

void require_reps(const RunOptions& opts, std::size_t minimum, const char* what) {
  if (opts.reps < minimum) {
    throw InvalidArgument(std::string(what) + ": need at least " + std::to_string(minimum) +
                          " replicas");
  }
}

CalibrationFit replica_fit(const CalibrationFit& shared, double radius, int d,
                           const ChannelParams& params, const RunOptions& opts, Rng& rng) {
  if (!opts.refit_samples) return shared;
  const auto samples = generate_calibration_data(*opts.refit_samples, radius, d, params, rng);
  return calibrate(samples);
}

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double trapezoid(double x, double lo, double hi, double shoulder) {
  if (x <= lo || x >= hi) return 0.0;
  return std::min({1.0, (x - lo) / shoulder, (hi - x) / shoulder});
}

double wrap_pi(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = theta - two_pi * std::floor((theta + std::numbers::pi) / two_pi);
  if (w >= std::numbers::pi) w -= two_pi;
  return w;
}

struct ObservableStats {
  double laplace;
  double min_inverse_rss;
};

ObservableStats observable_stats(const ProcessModel& model, const LaplaceProbe* probe,
                                 double radius, int d, const ChannelParams& params, Rng& rng) {
  const PointPattern pattern = sample_pattern(model, radius, d, rng);
  const ObservationSet obs = observe(pattern, params, rng);
  double sum_q = 0.0;
  double min_n = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const ObservationView v = obs.at(i);
    min_n = std::min(min_n, v.inverse_rss);
    if (probe != nullptr) sum_q += probe_value(*probe, v.inverse_rss, v.angles);
  }
  return {std::exp(-sum_q), min_n};
}

}  // namespace

MomentEstimates rhat_moments(const ChannelParams& params, const CalibrationFit& fit, double radius,
                             int d, std::size_t n_mc, Rng& rng) {
  if (n_mc < 1000) throw InvalidArgument("rhat_moments: need n_mc >= 1000");
  if (!(radius > 0.0)) throw InvalidArgument("rhat_moments: radius must be > 0");
  validate(params);
  std::vector<double> r1(n_mc);
  std::vector<double> r2(n_mc);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s2_over_beta = params.sigma * params.sigma / params.beta;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double r = radius * std::pow(1.0 - unit(rng), 1.0 / d);
    double shadow = 1.0;
    if (params.sigma > 0.0) shadow = std::exp(-s2_over_beta + params.sigma * normal(rng));
    const double rhat = estimate_distance(path_loss(r, params) * shadow, fit);
    r1[i] = rhat;
    r2[i] = rhat * rhat;
  }
  const Summary s1 = summarize(r1);
  const Summary s2 = summarize(r2);
  MomentEstimates m;
  m.m1 = s1.mean;
  m.m2 = s2.mean;
  m.m1_stderr = s1.stderr_mean;
  m.m2_stderr = s2.stderr_mean;
  m.cov12 = covariance_of_means(r1, r2);
  m.n_mc = n_mc;
  return m;
}

BoundValue bound_bracket(int d, double radius, double aoa_var_at_r, const MomentEstimates& m) {
  if (d < 2) throw UnsupportedDimension("need d >= 2, got " + std::to_string(d));
  if (!(radius > 0.0)) throw InvalidArgument("bound: radius must be > 0");
  if (!(aoa_var_at_r >= 0.0)) throw InvalidArgument("bound: AOA variance must be >= 0");
  const double dd = static_cast<double>(d);
  const double c1 = 2.0 * dd * radius / (dd + 1.0) * std::exp(-(dd - 1.0) * aoa_var_at_r / 2.0);
  const double value = dd * radius * radius / (dd + 2.0) + m.m2 - c1 * m.m1;
  const double var = m.m2_stderr * m.m2_stderr + c1 * c1 * m.m1_stderr * m.m1_stderr -
                     2.0 * c1 * m.cov12;
  return {value, std::sqrt(std::max(var, 0.0))};
}

BoundValue cmse_bound(std::size_t n, int d, double radius, double aoa_var_at_r,
                      const MomentEstimates& m) {
  if (n == 0) throw InvalidArgument("cmse_bound: n must be >= 1");
  const BoundValue b = bound_bracket(d, radius, aoa_var_at_r, m);
  const double scale = 1.0 / static_cast<double>(n);
  return {b.value * scale, b.stderr_value * scale};
}

BoundValue mse_bound(double intensity, int d, double radius, double aoa_var_at_r,
                     const MomentEstimates& m) {
  if (!(intensity > 0.0)) throw InvalidArgument("mse_bound: lambda must be > 0");
  const BoundValue b = bound_bracket(d, radius, aoa_var_at_r, m);
  const double scale = 2.0 / (intensity * ball_volume(d, radius));
  return {b.value * scale, b.stderr_value * scale};
}

std::vector<std::vector<double>> mc_cmse_estimates(std::size_t n, double radius, int d,
                                                   const ChannelParams& params,
                                                   const CalibrationFit& fit,
                                                   const RunOptions& opts) {
  if (n == 0) throw InvalidArgument("mc_cmse: n must be >= 1");
  require_reps(opts, 2, "mc_cmse");
  validate(params);
  return run_indexed<std::vector<double>>(opts.reps, opts.threads, [&](std::size_t k) {
    Rng rng = make_stream(opts.seed, {kCmseTag, n, k});
    const CalibrationFit f = replica_fit(fit, radius, d, params, opts, rng);
    const PointPattern pattern = sample_ppp_conditional(n, radius, d, rng);
    return localize(observe(pattern, params, rng), f).coords.coords;
  });
}

Summary mc_cmse(std::size_t n, double radius, int d, const ChannelParams& params,
                const CalibrationFit& fit, const RunOptions& opts) {
  const auto estimates = mc_cmse_estimates(n, radius, d, params, fit, opts);
  std::vector<double> sq(estimates.size());
  std::transform(estimates.begin(), estimates.end(), sq.begin(), squared_norm);
  return summarize(sq);
}

Summary mc_mse(const ProcessModel& model, double radius, int d, const ChannelParams& params,
               const CalibrationFit& fit, const RunOptions& opts) {
  require_reps(opts, 2, "mc_mse");
  validate(model, d);
  validate(params);
  const std::uint64_t model_key = stream_tag(model_tag(model).c_str());
  const std::uint64_t lambda_key = bits(effective_intensity(model, d));
  const auto sq = run_indexed<double>(opts.reps, opts.threads, [&](std::size_t k) {
    Rng rng = make_stream(opts.seed, {kMseTag, model_key, lambda_key, k});
    const CalibrationFit f = replica_fit(fit, radius, d, params, opts, rng);
    const PointPattern pattern = sample_pattern(model, radius, d, rng);
    if (pattern.empty()) return 0.0;
    return squared_norm(localize(observe(pattern, params, rng), f).coords.coords);
  });
  return summarize(sq);
}

ExperimentResult run_cmse_experiment(std::span<const std::size_t> n_grid, double radius, int d,
                                     const ChannelParams& params, const CalibrationFit& fit,
                                     const MomentEstimates& moments, const RunOptions& opts) {
  if (n_grid.empty()) throw InvalidArgument("cmse experiment: empty n grid");
  ExperimentResult res;
  res.mode = "cmse";
  res.model = "ppp";
  res.reps = opts.reps;
  res.seed = opts.seed;
  res.moments = moments;
  const double var_r = aoa_variance(radius, params.aoa);
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    if (g > 0 && n_grid[g] <= n_grid[g - 1]) {
      throw InvalidArgument("cmse experiment: n grid must be strictly increasing");
    }
    const Summary s = mc_cmse(n_grid[g], radius, d, params, fit, opts);
    const BoundValue b = cmse_bound(n_grid[g], d, radius, var_r, moments);
    res.grid.push_back(static_cast<double>(n_grid[g]));
    res.empirical.push_back(s.mean);
    res.stderr_empirical.push_back(s.stderr_mean);
    res.bound.push_back(b.value);
    res.bound_stderr.push_back(b.stderr_value);
  }
  return res;
}

ExperimentResult run_mse_experiment(const ProcessModel& family, std::span<const double> lambda_grid,
                                    double radius, int d, const ChannelParams& params,
                                    const CalibrationFit& fit, const MomentEstimates& moments,
                                    const RunOptions& opts) {
  if (lambda_grid.empty()) throw InvalidArgument("mse experiment: empty lambda grid");
  ExperimentResult res;
  res.mode = "mse";
  res.model = model_tag(family);
  res.reps = opts.reps;
  res.seed = opts.seed;
  res.moments = moments;
  const double var_r = aoa_variance(radius, params.aoa);
  for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
    if (g > 0 && lambda_grid[g] <= lambda_grid[g - 1]) {
      throw InvalidArgument("mse experiment: lambda grid must be strictly increasing");
    }
    const ProcessModel model = with_intensity(family, lambda_grid[g], d);
    const Summary s = mc_mse(model, radius, d, params, fit, opts);
    const BoundValue b = mse_bound(lambda_grid[g], d, radius, var_r, moments);
    res.grid.push_back(lambda_grid[g]);
    res.empirical.push_back(s.mean);
    res.stderr_empirical.push_back(s.stderr_mean);
    res.bound.push_back(b.value);
    res.bound_stderr.push_back(b.stderr_value);
  }
  return res;
}

LaplaceProbe default_probe(const ChannelParams& params, int d) {
  if (d < 2) throw UnsupportedDimension("need d >= 2, got " + std::to_string(d));
  LaplaceProbe p;
  p.n_lo = inverse_path_loss(0.2, params);
  p.n_hi = inverse_path_loss(0.6, params);
  p.angle_lo.assign(static_cast<std::size_t>(d - 1), 0.0);
  p.angle_hi.assign(static_cast<std::size_t>(d - 1), std::numbers::pi);
  p.angle_lo.back() = -std::numbers::pi;
  p.angle_hi.back() = 0.0;
  p.log_shoulder = 0.2 * std::log(p.n_hi / p.n_lo);
  p.angle_shoulder = 0.3;
  p.weight = 1.0;
  return p;
}

void validate(const LaplaceProbe& probe, int d) {
  if (!(probe.n_lo > 0.0 && probe.n_lo < probe.n_hi && std::isfinite(probe.n_hi))) {
    throw InvalidArgument("probe: need 0 < n_lo < n_hi");
  }
  const auto m = static_cast<std::size_t>(d - 1);
  if (probe.angle_lo.size() != m || probe.angle_hi.size() != m) {
    throw InvalidArgument("probe: need d - 1 angle intervals");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(probe.angle_lo[j] < probe.angle_hi[j])) {
      throw InvalidArgument("probe: angle interval " + std::to_string(j + 1) + " is empty");
    }
    if (!(2.0 * probe.angle_shoulder <= probe.angle_hi[j] - probe.angle_lo[j])) {
      throw InvalidArgument("probe: angle shoulder wider than half the interval");
    }
  }
  if (!(probe.angle_shoulder > 0.0)) throw InvalidArgument("probe: angle shoulder must be > 0");
  if (!(probe.log_shoulder > 0.0 &&
        2.0 * probe.log_shoulder <= std::log(probe.n_hi / probe.n_lo))) {
    throw InvalidArgument("probe: log shoulder must be in (0, half the log box width]");
  }
  if (!(probe.weight >= 0.0) || !std::isfinite(probe.weight)) {
    throw InvalidArgument("probe: weight must be >= 0");
  }
}

double probe_value(const LaplaceProbe& probe, double inverse_rss, std::span<const double> angles) {
  if (probe.weight == 0.0 || !(inverse_rss > 0.0)) return 0.0;
  double q = probe.weight * trapezoid(std::log(inverse_rss), std::log(probe.n_lo),
                                      std::log(probe.n_hi), probe.log_shoulder);
  const std::size_t m = angles.size();
  for (std::size_t j = 0; j < m && q > 0.0; ++j) {
    const double theta = j + 1 == m ? wrap_pi(angles[j]) : angles[j];
    q *= trapezoid(theta, probe.angle_lo[j], probe.angle_hi[j], probe.angle_shoulder);
  }
  return q;
}

Summary empirical_laplace(const ProcessModel& model, const LaplaceProbe& probe, double radius,
                          int d, const ChannelParams& params, const RunOptions& opts,
                          std::uint64_t stream) {
  require_reps(opts, 2, "empirical_laplace");
  validate(model, d);
  validate(params);
  validate(probe, d);
  const auto values = run_indexed<double>(opts.reps, opts.threads, [&](std::size_t k) {
    Rng rng = make_stream(opts.seed, {kLaplaceTag, stream, k});
    return observable_stats(model, &probe, radius, d, params, rng).laplace;
  });
  return summarize(values);
}

double ks_min_inverse_rss(const ProcessModel& a, const ProcessModel& b, double radius, int d,
                          const ChannelParams& params, const RunOptions& opts) {
  require_reps(opts, 2, "ks_min_inverse_rss");
  validate(a, d);
  validate(b, d);
  validate(params);
  auto minima = [&](const ProcessModel& model, std::uint64_t side) {
    return run_indexed<double>(opts.reps, opts.threads, [&](std::size_t k) {
      Rng rng = make_stream(opts.seed, {kKsTag, side, k});
      return observable_stats(model, nullptr, radius, d, params, rng).min_inverse_rss;
    });
  };
  return ks_statistic(minima(a, 0), minima(b, 1));
}

std::vector<ConvergenceRow> run_convergence(const ProcessModel& a, const ProcessModel& b,
                                            std::span<const double> sigma_db_grid,
                                            const LaplaceProbe& probe, double radius, int d,
                                            const ChannelParams& params, const RunOptions& opts) {
  require_reps(opts, 2, "run_convergence");
  validate(a, d);
  validate(b, d);
  validate(probe, d);
  std::vector<ConvergenceRow> rows;
  for (double sigma_db : sigma_db_grid) {
    ChannelParams p = params;
    p.sigma = sigma_from_db(sigma_db);
    validate(p);
    auto run_side = [&](const ProcessModel& model, std::uint64_t side) {
      return run_indexed<ObservableStats>(opts.reps, opts.threads, [&](std::size_t k) {
        Rng rng = make_stream(opts.seed, {kConvergeTag, side, bits(sigma_db), k});
        return observable_stats(model, &probe, radius, d, p, rng);
      });
    };
    const auto sa = run_side(a, 0);
    const auto sb = run_side(b, 1);
    std::vector<double> la(sa.size()), lb(sb.size()), ma(sa.size()), mb(sb.size());
    for (std::size_t k = 0; k < sa.size(); ++k) {
      la[k] = sa[k].laplace;
      ma[k] = sa[k].min_inverse_rss;
      lb[k] = sb[k].laplace;
      mb[k] = sb[k].min_inverse_rss;
    }
    ConvergenceRow row;
    row.sigma_db = sigma_db;
    row.laplace_a = summarize(la);
    row.laplace_b = summarize(lb);
    row.gap = std::abs(row.laplace_a.mean - row.laplace_b.mean);
    row.gap_se = std::hypot(row.laplace_a.stderr_mean, row.laplace_b.stderr_mean);
    row.ks = ks_statistic(std::move(ma), std::move(mb));
    row.ks_critical = ks_critical_value(0.01, opts.reps, opts.reps);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fuseloc
