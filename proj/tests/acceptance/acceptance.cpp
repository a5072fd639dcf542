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

// Acceptance suite. Each criterion prints one PASS/FAIL verdict line; detail
// lines are indented. Exit status is 1 when any selected criterion fails.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fuseloc/analysis.hpp"
#include "fuseloc/channel.hpp"
#include "fuseloc/error.hpp"
#include "fuseloc/estimator.hpp"
#include "fuseloc/geometry.hpp"
#include "fuseloc/io.hpp"
#include "fuseloc/pointproc.hpp"
#include "fuseloc/random.hpp"
#include "fuseloc/stats.hpp"

using namespace fuseloc;
using std::numbers::pi;

namespace {

// Stochastic comparisons: |difference| within kSigmas standard errors.
constexpr double kSigmas = 4.0;
// Quadrature against closed forms.
constexpr double kSrdRelTol = 1e-6;
// Below this |h - 1| counts as numerically zero.
constexpr double kZeroIntegrand = 1e-15;

constexpr std::uint64_t kSeed = 1;
constexpr int kDim = 2;
constexpr double kRadius = 30.0;
constexpr double kSigmaDb = 12.0;
constexpr std::size_t kCalSamples = 10000;
constexpr std::size_t kMomentSamples = 1000000;
constexpr double kHardcore = 0.3;

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, std::string line) {
    if (!ok) pass = false;
    details.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", line));
  }
  void note(std::string line) { details.push_back("     " + std::move(line)); }
};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// Shared fixture: the 12 dB reference channel with its calibrated fit and
// bound moments.
struct Setup {
  ChannelParams params = default_channel_params(kSigmaDb);
  CalibrationFit fit{};
  MomentEstimates moments;
  double aoa_var = 0.0;

  Setup() {
    Rng cal = make_stream(kSeed, {stream_tag("calibration")});
    fit = calibrate(generate_calibration_data(kCalSamples, kRadius, kDim, params, cal));
    Rng mom = make_stream(kSeed, {stream_tag("moments")});
    moments = rhat_moments(params, fit, kRadius, kDim, kMomentSamples, mom);
    aoa_var = aoa_variance(kRadius, params.aoa);
  }

  RunOptions options(std::size_t reps) const {
    RunOptions o;
    o.seed = kSeed;
    o.reps = reps;
    o.threads = worker_count();
    return o;
  }

  BoundValue mse_bound_at(double lambda) const {
    return mse_bound(lambda, kDim, kRadius, aoa_var, moments);
  }
};

double joint(double a, double b) { return std::hypot(a, b); }

// Empirical value may exceed the bound only by noise in either estimate.
void check_dominance(Verdict& v, const std::string& label, double empirical, double se,
                     const BoundValue& bound) {
  const double slack = kSigmas * joint(se, bound.stderr_value);
  v.check(empirical <= bound.value + slack,
          fmt::format("{}: empirical {:.6g} (se {:.3g}) <= bound {:.6g} (se {:.3g}) + {:.3g}", label,
                      empirical, se, bound.value, bound.stderr_value, slack));
}

Verdict criterion_1() {
  Verdict v;
  const Setup s;
  const std::size_t n = 1000;
  const auto est = mc_cmse_estimates(n, kRadius, kDim, s.params, s.fit, s.options(2000));
  for (int c = 0; c < kDim; ++c) {
    std::vector<double> x(est.size());
    for (std::size_t k = 0; k < est.size(); ++k) x[k] = est[k][static_cast<std::size_t>(c)];
    const Summary m = summarize(x);
    v.check(std::abs(m.mean) < kSigmas * m.stderr_mean,
            fmt::format("coordinate {}: mean {:.4g}, se {:.3g}", c + 1, m.mean, m.stderr_mean));
  }
  return v;
}

Verdict criterion_2() {
  Verdict v;
  const Setup s;
  const std::vector<std::size_t> grid = {1000, 2000, 3000, 4000, 5000};
  const ExperimentResult r =
      run_cmse_experiment(grid, kRadius, kDim, s.params, s.fit, s.moments, s.options(1000));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    check_dominance(v, fmt::format("n={}", grid[g]), r.empirical[g], r.stderr_empirical[g],
                    {r.bound[g], r.bound_stderr[g]});
  }
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = a + 1; b < grid.size(); ++b) {
      const double na = r.grid[a] * r.empirical[a];
      const double nb = r.grid[b] * r.empirical[b];
      const double se = joint(r.grid[a] * r.stderr_empirical[a], r.grid[b] * r.stderr_empirical[b]);
      v.check(std::abs(na - nb) < kSigmas * se,
              fmt::format("n*CMSE at n={} vs n={}: {:.5g} vs {:.5g} (joint se {:.3g})", grid[a],
                          grid[b], na, nb, se));
    }
  }
  return v;
}

Verdict criterion_3() {
  Verdict v;
  const Setup s;
  const std::vector<double> grid = {1, 2, 3, 4, 5};
  const ExperimentResult r = run_mse_experiment(Ppp{1.0}, grid, kRadius, kDim, s.params, s.fit,
                                                s.moments, s.options(1000));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    check_dominance(v, fmt::format("lambda={}", grid[g]), r.empirical[g], r.stderr_empirical[g],
                    {r.bound[g], r.bound_stderr[g]});
  }
  const double ratio = r.empirical[0] / r.empirical[3];
  const double ratio_se =
      ratio * std::hypot(r.stderr_empirical[0] / r.empirical[0], r.stderr_empirical[3] / r.empirical[3]);
  v.check(std::abs(ratio - 4.0) < kSigmas * ratio_se,
          fmt::format("MSE(1)/MSE(4) = {:.4g} (se {:.3g}), expected 4", ratio, ratio_se));
  return v;
}

// Compares a model's MSE to the PPP at the same intensity, plus the PPP bound.
void compare_to_ppp(Verdict& v, const Setup& s, const ProcessModel& model, double lambda,
                    std::size_t reps, bool require_close, bool require_not_below) {
  const Summary ppp = mc_mse(Ppp{lambda}, kRadius, kDim, s.params, s.fit, s.options(reps));
  const Summary other = mc_mse(model, kRadius, kDim, s.params, s.fit, s.options(reps));
  const double se = joint(ppp.stderr_mean, other.stderr_mean);
  const std::string tag = model_tag(model);
  v.note(fmt::format("lambda={}: PPP {:.6g} (se {:.3g}), {} {:.6g} (se {:.3g})", lambda, ppp.mean,
                     ppp.stderr_mean, tag, other.mean, other.stderr_mean));
  if (require_close) {
    v.check(std::abs(other.mean - ppp.mean) < kSigmas * se,
            fmt::format("lambda={}: |{} - PPP| = {:.3g} < {:.3g}", lambda, tag,
                        std::abs(other.mean - ppp.mean), kSigmas * se));
  }
  if (require_not_below) {
    v.check(other.mean >= ppp.mean - kSigmas * se,
            fmt::format("lambda={}: {} {:.6g} >= PPP - {:.3g}", lambda, tag, other.mean, kSigmas * se));
  }
  const BoundValue b = s.mse_bound_at(lambda);
  if (!require_not_below) check_dominance(v, fmt::format("lambda={} PPP", lambda), ppp.mean, ppp.stderr_mean, b);
  check_dominance(v, fmt::format("lambda={} {}", lambda, tag), other.mean, other.stderr_mean, b);
}

Verdict criterion_4() {
  Verdict v;
  const Setup s;
  for (double lambda : {1.0, 3.0, 5.0}) {
    try {
      const double parent = match_matern_ii_parent(lambda, kHardcore, kDim);
      v.note(fmt::format("lambda={}: matched parent intensity {:.10g}", lambda, parent));
      compare_to_ppp(v, s, MaternII{parent, kHardcore}, lambda, 1000, true, false);
    } catch (const InfeasibleDensity& e) {
      v.check(false, fmt::format("lambda={}: {}", lambda, e.what()));
    }
  }
  return v;
}

Verdict criterion_5() {
  Verdict v;
  const Setup s;
  for (double lambda : {1.0, 3.0}) {
    compare_to_ppp(v, s, AlphaGinibre{0.8, lambda}, lambda, 500, true, false);
  }
  return v;
}

Verdict criterion_6() {
  Verdict v;
  const Setup s;
  const double parent = 0.4;
  for (double lambda : {1.0, 3.0, 5.0}) {
    compare_to_ppp(v, s, MaternCluster{parent, lambda / parent, kHardcore}, lambda, 1000, false, true);
  }
  return v;
}

struct SamplerCase {
  ProcessModel model;
  int d;
  double radius;
  double r_max;  // pair-correlation grid reaches this distance
  GinibreMethod method = GinibreMethod::kostlan;
  bool check_pcf = true;
  const char* label;
};

Verdict criterion_7() {
  Verdict v;
  constexpr std::size_t reps = 500;
  const double ginibre_scale = std::sqrt(0.8 / pi);
  const std::vector<SamplerCase> cases = {
      {MaternI{2.0, kHardcore}, 2, 6.0, 2.5 * kHardcore, GinibreMethod::kostlan, true, "matern1 d=2"},
      {MaternII{2.0, kHardcore}, 2, 6.0, 2.5 * kHardcore, GinibreMethod::kostlan, true, "matern2 d=2"},
      {MaternI{4.0, kHardcore}, 3, 2.5, 2.5 * kHardcore, GinibreMethod::kostlan, true, "matern1 d=3"},
      {MaternII{4.0, kHardcore}, 3, 2.5, 2.5 * kHardcore, GinibreMethod::kostlan, true, "matern2 d=3"},
      {MaternCluster{0.4, 2.5, kHardcore}, 2, 6.0, 2.5 * kHardcore, GinibreMethod::kostlan, true, "mcp d=2"},
      {ThomasCluster{0.4, 2.5, kHardcore}, 2, 6.0, 5.0 * kHardcore, GinibreMethod::kostlan, true, "tcp d=2"},
      {AlphaGinibre{0.8, 1.0}, 2, 5.0, 3.0 * ginibre_scale, GinibreMethod::spectral, true, "ginibre spectral"},
      {AlphaGinibre{0.8, 1.0}, 2, 30.0, 0.0, GinibreMethod::kostlan, false, "ginibre kostlan"},
  };
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const SamplerCase& sc = cases[c];
    std::vector<PointPattern> patterns;
    patterns.reserve(reps);
    std::vector<double> counts(reps);
    double min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < reps; ++k) {
      Rng rng = make_stream(kSeed, {stream_tag("sampler"), c, k});
      patterns.push_back(sample_pattern(sc.model, sc.radius, sc.d, rng, sc.method));
      counts[k] = static_cast<double>(patterns.back().size());
      if (std::holds_alternative<MaternI>(sc.model) || std::holds_alternative<MaternII>(sc.model)) {
        min_dist = std::min(min_dist, patterns.back().min_pairwise_distance());
      }
    }
    const double volume = ball_volume(sc.d, sc.radius);
    const Summary n = summarize(counts);
    const double expected = effective_intensity(sc.model, sc.d);
    const double got = n.mean / volume;
    const double se = n.stderr_mean / volume;
    v.check(std::abs(got - expected) < kSigmas * se,
            fmt::format("{}: intensity {:.6g} vs {:.6g} (se {:.3g})", sc.label, got, expected, se));
    if (std::isfinite(min_dist)) {
      v.check(min_dist >= kHardcore,
              fmt::format("{}: minimum pairwise distance {:.6g} >= {}", sc.label, min_dist, kHardcore));
    }
    if (!sc.check_pcf) continue;
    std::vector<double> grid(10);
    for (std::size_t g = 0; g < grid.size(); ++g) grid[g] = sc.r_max * static_cast<double>(g + 1) / 10.0;
    const PairCorrelationEstimate est = estimate_pair_correlation(patterns, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double lo = grid[g] - est.half_width;
      const double hi = grid[g] + est.half_width;
      const double want = ring_average_pair_correlation(sc.model, sc.d, lo, hi);
      const double diff = std::abs(est.h[g] - want);
      // Rings inside the hardcore gap hold no pairs: both sides are exactly 0.
      const bool ok = diff == 0.0 || diff < kSigmas * est.stderr_h[g];
      v.check(ok, fmt::format("{}: h({:.4g}) = {:.4g} vs {:.4g} (se {:.3g})", sc.label, grid[g],
                              est.h[g], want, est.stderr_h[g]));
    }
  }
  return v;
}

Verdict criterion_8() {
  Verdict v;
  constexpr std::size_t samples = 100000;
  for (int d : {2, 3}) {
    Rng rng = make_stream(kSeed, {stream_tag("radial"), static_cast<std::uint64_t>(d)});
    const PointPattern p = sample_ppp_conditional(samples, kRadius, d, rng);
    std::vector<double> r1(samples);
    std::vector<double> r2(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      const auto x = p.point(i);
      double s2 = 0.0;
      for (double c : x) s2 += c * c;
      r2[i] = s2;
      r1[i] = std::sqrt(s2);
    }
    const Summary m1 = summarize(r1);
    const Summary m2 = summarize(r2);
    const double dd = d;
    const double e1 = dd * kRadius / (dd + 1.0);
    const double e2 = dd * kRadius * kRadius / (dd + 2.0);
    v.check(std::abs(m1.mean - e1) < kSigmas * m1.stderr_mean,
            fmt::format("d={}: E[R] {:.6g} vs {:.6g} (se {:.3g})", d, m1.mean, e1, m1.stderr_mean));
    v.check(std::abs(m2.mean - e2) < kSigmas * m2.stderr_mean,
            fmt::format("d={}: E[R^2] {:.6g} vs {:.6g} (se {:.3g})", d, m2.mean, e2, m2.stderr_mean));
  }
  return v;
}

Verdict criterion_9() {
  Verdict v;
  constexpr std::size_t draws = 1000000;
  Rng pick = make_stream(kSeed, {stream_tag("trig-pairs")});
  for (std::uint64_t pair = 0; pair < 5; ++pair) {
    // psi is used as the elevation (in [0, pi]) and the azimuth (in [0, 2 pi)).
    const double psi = pi * uniform01(pick);
    const double var = 0.05 + 1.95 * uniform01(pick);
    HypersphericalCoord h;
    h.r = 1.0;
    h.elevations = {psi};
    h.azimuth = psi;
    Rng rng = make_stream(kSeed, {stream_tag("trig"), pair});
    std::vector<double> ce(draws), se(draws), ca(draws), sa(draws);
    std::vector<double> angles(2);
    for (std::size_t k = 0; k < draws; ++k) {
      sample_aoa(h, var, rng, angles);
      ce[k] = std::cos(angles[0]);
      se[k] = std::sin(angles[0]);
      ca[k] = std::cos(angles[1]);
      sa[k] = std::sin(angles[1]);
    }
    const double damp = std::exp(-var / 2.0);
    const struct {
      const char* name;
      const std::vector<double>& x;
      double want;
    } rows[] = {
        {"E[cos elevation]", ce, -damp * std::cos(psi)},
        {"E[sin elevation]", se, damp * std::sin(psi)},
        {"E[cos azimuth]", ca, -damp * std::cos(psi)},
        {"E[sin azimuth]", sa, -damp * std::sin(psi)},
    };
    for (const auto& row : rows) {
      const Summary m = summarize(row.x);
      v.check(std::abs(m.mean - row.want) < kSigmas * m.stderr_mean,
              fmt::format("psi={:.4f} E={:.4f}: {} {:.6f} vs {:.6f} (se {:.2g})", psi, var, row.name,
                          m.mean, row.want, m.stderr_mean));
    }
  }
  return v;
}

Verdict criterion_10() {
  Verdict v;
  const double ppp = srd_integral(Ppp{1.0}, 2);
  v.check(ppp == 0.0, fmt::format("SRD(PPP) = {}", ppp));
  for (int d : {2, 3}) {
    const double lp = 0.4;
    const double got = srd_integral(ThomasCluster{lp, 2.5, kHardcore}, d);
    const double want = d == 2 ? 1.0 / (2.0 * pi * lp) : 1.0 / (4.0 * pi * lp);
    const double rel = std::abs(got - want) / want;
    v.check(rel < kSrdRelTol,
            fmt::format("d={}: SRD(TCP) {:.15g} vs {:.15g}, relative error {:.2g}", d, got, want, rel));
  }
  const std::vector<std::pair<const char*, ProcessModel>> hard = {
      {"matern1", MaternI{2.0, kHardcore}},
      {"matern2", MaternII{2.0, kHardcore}},
      {"mcp", MaternCluster{0.4, 2.5, kHardcore}},
  };
  for (int d : {2, 3}) {
    for (const auto& [name, model] : hard) {
      const double srd = srd_integral(model, d);
      v.check(std::isfinite(srd) && srd > 0.0, fmt::format("d={}: SRD({}) = {:.10g}", d, name, srd));
      double worst = 0.0;
      for (int k = 1; k <= 200; ++k) {
        const double r = 2.0 * kHardcore * (1.0 + 0.05 * k);
        worst = std::max(worst, std::abs(pair_correlation(model, d, r) - 1.0));
      }
      v.check(worst <= kZeroIntegrand,
              fmt::format("d={}: max |h-1| beyond 2*rc for {} = {:.3g}", d, name, worst));
    }
  }
  return v;
}

Verdict criterion_11() {
  Verdict v;
  const ChannelParams params = default_channel_params(kSigmaDb);
  RunOptions opts;
  opts.seed = kSeed;
  opts.reps = 2000;
  opts.threads = worker_count();
  const MaternCluster mcp{0.4, 2.5, kHardcore};
  const Ppp ppp{effective_intensity(mcp, kDim)};
  const std::vector<double> sigmas = {4, 8, 12};
  const auto rows = run_convergence(ppp, mcp, sigmas, default_probe(params, kDim), kRadius, kDim,
                                    params, opts);
  for (const ConvergenceRow& r : rows) {
    v.note(fmt::format("sigma_dB={}: L_ppp {:.5f} L_mcp {:.5f} gap {:.5f} (se {:.3g}) KS {:.4f} (crit {:.4f})",
                       r.sigma_db, r.laplace_a.mean, r.laplace_b.mean, r.gap, r.gap_se, r.ks,
                       r.ks_critical));
  }
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const double slack = kSigmas * joint(rows[k].gap_se, rows[k + 1].gap_se);
    v.check(rows[k + 1].gap <= rows[k].gap + slack,
            fmt::format("gap {} dB -> {} dB: {:.5f} <= {:.5f} + {:.3g}", rows[k].sigma_db,
                        rows[k + 1].sigma_db, rows[k + 1].gap, rows[k].gap, slack));
    v.check(rows[k + 1].ks <= rows[k].ks + rows[k + 1].ks_critical,
            fmt::format("KS {} dB -> {} dB: {:.4f} <= {:.4f} + {:.4f}", rows[k].sigma_db,
                        rows[k + 1].sigma_db, rows[k + 1].ks, rows[k].ks, rows[k + 1].ks_critical));
  }
  return v;
}

Verdict criterion_12() {
  Verdict v;
  const Setup s;
  const std::vector<std::size_t> n_grid = {1000, 2000};
  const std::vector<double> lambda_grid = {1, 2};
  auto render = [&](unsigned threads) {
    RunOptions o = s.options(200);
    o.threads = threads;
    std::ostringstream out;
    write_result_csv(out, run_cmse_experiment(n_grid, kRadius, kDim, s.params, s.fit, s.moments, o));
    write_result_csv(out, run_mse_experiment(MaternII{1.2, kHardcore}, lambda_grid, kRadius, kDim,
                                             s.params, s.fit, s.moments, o));
    const auto rows = run_convergence(Ppp{1.0}, MaternCluster{0.4, 2.5, kHardcore},
                                      std::vector<double>{4, 12}, default_probe(s.params, kDim),
                                      kRadius, kDim, s.params, o);
    for (const auto& r : rows) {
      out << format_double(r.laplace_a.mean) << ',' << format_double(r.laplace_b.mean) << ','
          << format_double(r.ks) << '\n';
    }
    return out.str();
  };
  const std::string reference = render(1);
  for (unsigned threads : {2u, 8u}) {
    const std::string other = render(threads);
    v.check(other == reference,
            fmt::format("threads=1 vs threads={}: {} bytes, {}", threads, reference.size(),
                        other == reference ? "identical" : "different"));
  }
  return v;
}

const std::vector<std::pair<std::string, std::function<Verdict()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Verdict()>>> list = {
      {"fused estimate is unbiased", criterion_1},
      {"CMSE bound dominance and 1/n scaling", criterion_2},
      {"MSE bound dominance and 1/lambda scaling", criterion_3},
      {"PPP and Matern II indistinguishable", criterion_4},
      {"PPP and alpha-Ginibre indistinguishable", criterion_5},
      {"MCP MSE at or above PPP and below the bound", criterion_6},
      {"sampler intensities, hardcore distances and pair correlations", criterion_7},
      {"conditional PPP radial moments", criterion_8},
      {"bearing trigonometric moments", criterion_9},
      {"SRD integrals", criterion_10},
      {"Laplace gap and KS trend over shadowing", criterion_11},
      {"thread-count determinism", criterion_12},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuseloc acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  const auto& list = criteria();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = list[i].second();
    } catch (const std::exception& e) {
      v.check(false, fmt::format("error: {}", e.what()));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const std::string& line : v.details) fmt::print("  {}\n", line);
    fmt::print("{} criterion {}: {} ({:.1f} s)\n", v.pass ? "PASS" : "FAIL", id, list[i].first, secs);
    all_pass = all_pass && v.pass;
  }
  return all_pass ? 0 : 1;
}
