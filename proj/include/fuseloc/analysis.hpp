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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fuseloc/channel.hpp"
#include "fuseloc/estimator.hpp"
#include "fuseloc/pointproc.hpp"
#include "fuseloc/random.hpp"
#include "fuseloc/stats.hpp"

namespace fuseloc {

// Monte Carlo moments of the range estimate for a sensor drawn uniformly in
// B_0(R): m1 = E[R_hat], m2 = E[R_hat^2].
struct MomentEstimates {
  double m1 = 0.0;
  double m2 = 0.0;
  double m1_stderr = 0.0;
  double m2_stderr = 0.0;
  double cov12 = 0.0;  // covariance of the two sample means
  std::size_t n_mc = 0;
};

MomentEstimates rhat_moments(const ChannelParams& params, const CalibrationFit& fit, double radius,
                             int d, std::size_t n_mc, Rng& rng);

struct BoundValue {
  double value;
  double stderr_value;  // propagated from the moment estimates
};

// d R^2/(d+2) + m2 - (2 d R/(d+1)) e^{-(d-1) E(R)/2} m1.
BoundValue bound_bracket(int d, double radius, double aoa_var_at_r, const MomentEstimates& m);

// bracket / n. Throws InvalidArgument for n == 0.
BoundValue cmse_bound(std::size_t n, int d, double radius, double aoa_var_at_r,
                      const MomentEstimates& m);

// 2 bracket / (lambda V_d(R)).
BoundValue mse_bound(double intensity, int d, double radius, double aoa_var_at_r,
                     const MomentEstimates& m);

struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t reps = 5000;
  unsigned threads = 1;
  // When set, every replica fits its own calibration from this many samples
  // instead of using the shared fit.
  std::optional<std::size_t> refit_samples;
};

// Per-replica fused estimates for n sensors placed uniformly in B_0(R).
std::vector<std::vector<double>> mc_cmse_estimates(std::size_t n, double radius, int d,
                                                   const ChannelParams& params,
                                                   const CalibrationFit& fit,
                                                   const RunOptions& opts);

// Mean squared norm of the fused estimate over opts.reps replicas.
Summary mc_cmse(std::size_t n, double radius, int d, const ChannelParams& params,
                const CalibrationFit& fit, const RunOptions& opts);

// As mc_cmse with the sensor pattern drawn from `model`; empty patterns
// contribute a squared error of 0.
Summary mc_mse(const ProcessModel& model, double radius, int d, const ChannelParams& params,
               const CalibrationFit& fit, const RunOptions& opts);

struct ExperimentResult {
  std::string mode;       // "cmse" or "mse"
  std::string model;      // model tag
  std::vector<double> grid;  // n or lambda
  std::vector<double> empirical;
  std::vector<double> stderr_empirical;
  std::vector<double> bound;
  std::vector<double> bound_stderr;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  MomentEstimates moments;
};

ExperimentResult run_cmse_experiment(std::span<const std::size_t> n_grid, double radius, int d,
                                     const ChannelParams& params, const CalibrationFit& fit,
                                     const MomentEstimates& moments, const RunOptions& opts);

// For each lambda the model is with_intensity(family, lambda, d).
ExperimentResult run_mse_experiment(const ProcessModel& family, std::span<const double> lambda_grid,
                                    double radius, int d, const ChannelParams& params,
                                    const CalibrationFit& fit, const MomentEstimates& moments,
                                    const RunOptions& opts);

// Test function q(N, Theta) = weight * T(ln N) * prod_j T_j(Theta_j), each T a
// trapezoid supported on its interval that rises linearly over `shoulder`
// at both ends. The azimuth is wrapped to [-pi, pi) before evaluation.
struct LaplaceProbe {
  double n_lo;  // inverse-RSS box [n_lo, n_hi]
  double n_hi;
  std::vector<double> angle_lo;  // d - 1 entries, elevations then azimuth
  std::vector<double> angle_hi;
  double log_shoulder;    // shoulder width on the ln N axis
  double angle_shoulder;  // shoulder width on every angle axis, rad
  double weight = 1.0;
};

// N in [g(0.2 km), g(0.6 km)], azimuth in [-pi, 0], elevations unrestricted;
// shoulders of 20% of the log box width and 0.3 rad.
LaplaceProbe default_probe(const ChannelParams& params, int d);

void validate(const LaplaceProbe& probe, int d);

double probe_value(const LaplaceProbe& probe, double inverse_rss, std::span<const double> angles);

// Mean of exp(-sum_i q(N_i, Theta_i)) over replicas of `model`.
Summary empirical_laplace(const ProcessModel& model, const LaplaceProbe& probe, double radius,
                          int d, const ChannelParams& params, const RunOptions& opts,
                          std::uint64_t stream = 0);

// Two-sample KS statistic between per-replica minima of N under the two
// models (+inf for an empty pattern).
double ks_min_inverse_rss(const ProcessModel& a, const ProcessModel& b, double radius, int d,
                          const ChannelParams& params, const RunOptions& opts);

struct ConvergenceRow {
  double sigma_db;
  Summary laplace_a;
  Summary laplace_b;
  double gap;     // |L_a - L_b|
  double gap_se;  // sqrt(se_a^2 + se_b^2)
  double ks;
  double ks_critical;  // 1% level
};

// For each shadowing level: Laplace functionals of both models and the KS
// statistic of the minimum inverse RSS, all from the same replica draws.
std::vector<ConvergenceRow> run_convergence(const ProcessModel& a, const ProcessModel& b,
                                            std::span<const double> sigma_db_grid,
                                            const LaplaceProbe& probe, double radius, int d,
                                            const ChannelParams& params, const RunOptions& opts);

}  // namespace fuseloc
