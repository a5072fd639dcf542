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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fuseloc/random.hpp"

namespace fuseloc {

// Deployment models. Intensities are points per km^d, lengths in km.
struct Ppp {
  double intensity;
};

struct MaternI {
  double parent_intensity;
  double hardcore_radius;
};

struct MaternII {
  double parent_intensity;
  double hardcore_radius;
};

struct MaternCluster {
  double parent_intensity;
  double mean_cluster_size;
  double cluster_radius;
};

struct ThomasCluster {
  double parent_intensity;
  double mean_cluster_size;
  double scatter_sd;
};

// Planar only.
struct AlphaGinibre {
  double alpha;
  double intensity;
};

using ProcessModel =
    std::variant<Ppp, MaternI, MaternII, MaternCluster, ThomasCluster, AlphaGinibre>;

// Short tag used in file formats: ppp, matern1, matern2, mcp, tcp, ginibre.
std::string model_tag(const ProcessModel& model);

// Throws InvalidArgument / UnsupportedDimension if the parameters are out of
// range for dimension d.
void validate(const ProcessModel& model, int d);

// A finite pattern inside the observation ball B_0(R), stored row-major.
class PointPattern {
 public:
  PointPattern(int dim, double window_radius, ProcessModel model);

  int dim() const { return dim_; }
  double window_radius() const { return window_radius_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& coords() const { return coords_; }
  const ProcessModel& model() const { return model_; }

  std::optional<std::uint64_t> seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  // Appends a point; throws if it lies outside the window.
  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { coords_.reserve(n * static_cast<std::size_t>(dim_)); }

  // +inf for fewer than two points.
  double min_pairwise_distance() const;

 private:
  int dim_;
  double window_radius_;
  ProcessModel model_;
  std::vector<double> coords_;
  std::optional<std::uint64_t> seed_;
};

PointPattern sample_ppp(double intensity, double radius, int d, Rng& rng);

// Exactly n i.i.d. uniform points in the ball (PPP conditioned on its count).
PointPattern sample_ppp_conditional(std::size_t n, double radius, int d, Rng& rng);

// Matérn hardcore thinnings. Parents are drawn in B_0(R + rc) so decisions
// near the boundary see every relevant neighbour, then clipped to B_0(R).
PointPattern sample_matern_i(double parent_intensity, double hardcore_radius, double radius, int d,
                             Rng& rng);
PointPattern sample_matern_ii(double parent_intensity, double hardcore_radius, double radius,
                              int d, Rng& rng);

// Neyman-Scott processes with Poisson(mean_cluster_size) daughters per parent.
// Matérn parents live in B_0(R + rc), Thomas parents in B_0(R + 6 sigma).
PointPattern sample_matern_cluster(double parent_intensity, double mean_cluster_size,
                                   double cluster_radius, double radius, int d, Rng& rng);
PointPattern sample_thomas(double parent_intensity, double mean_cluster_size, double scatter_sd,
                           double radius, int d, Rng& rng);

enum class GinibreMethod {
  // Independent Gamma(i, alpha/(pi lambda)) squared moduli with independent
  // uniform angles. Exact moduli and window counts; the angular coupling of
  // the true process is not reproduced, so its pair correlation is near 1.
  kostlan,
  // Eigenvalues of a truncated complex Ginibre matrix; reproduces the full
  // determinantal law inside the window. Cost is cubic in the truncation size.
  spectral,
};

// Truncation size M: smallest index with P(Gamma(i, alpha/(pi lambda)) <= R^2)
// < 1e-8 for every i > M.
std::size_t ginibre_truncation(double alpha, double intensity, double radius);

PointPattern sample_alpha_ginibre(double alpha, double intensity, double radius, Rng& rng,
                                  GinibreMethod method = GinibreMethod::kostlan);

// Dispatches on the model. Ginibre uses `ginibre_method`.
PointPattern sample_pattern(const ProcessModel& model, double radius, int d, Rng& rng,
                            GinibreMethod ginibre_method = GinibreMethod::kostlan);

double effective_intensity(const ProcessModel& model, int d);

// Parent intensity giving a Matérn II process of the requested intensity:
// lambda_p = -ln(1 - target V_d(rc)) / V_d(rc). Throws InfeasibleDensity when
// target >= 1 / V_d(rc).
double match_matern_ii_parent(double target_intensity, double hardcore_radius, int d);

// Lower-branch inversion of lambda_p exp(-lambda_p V_d(rc)); feasible only for
// target <= 1 / (e V_d(rc)).
double match_matern_i_parent(double target_intensity, double hardcore_radius, int d);

// Model of the given family with overall intensity `target`, keeping the other
// parameters of `family` (cluster models keep lambda_p and rescale c̄).
ProcessModel with_intensity(const ProcessModel& family, double target, int d);

// Stationary isotropic pair correlation function h(r).
double pair_correlation(const ProcessModel& model, int d, double r);

// Integral of |h(r) - 1| r^{d-1} over (0, inf). Zero for PPP.
double srd_integral(const ProcessModel& model, int d);

struct PairCorrelationEstimate {
  std::vector<double> r;
  std::vector<double> h;
  std::vector<double> stderr_h;
  double half_width = 0.0;
};

// Ring estimator with minus-sampling edge correction: reference points are
// restricted to B_0(R - r - half_width) so every ring lies inside the window.
// Each value estimates the r^{d-1}-weighted average of h over
// [r - half_width, r + half_width]. Standard errors come from the replica
// spread via the delta method. half_width <= 0 selects half the smallest
// grid spacing.
PairCorrelationEstimate estimate_pair_correlation(std::span<const PointPattern> patterns,
                                                  std::span<const double> r_grid,
                                                  double half_width = 0.0);

// r^{d-1}-weighted average of the closed-form h over [lo, hi].
double ring_average_pair_correlation(const ProcessModel& model, int d, double lo, double hi);

}  // namespace fuseloc
