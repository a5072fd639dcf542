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
#include <span>
#include <vector>

#include "fuseloc/geometry.hpp"
#include "fuseloc/pointproc.hpp"
#include "fuseloc/random.hpp"

namespace fuseloc {

// Logistic AOA variance E(r) = tau_min + (tau_max - tau_min) / (1 + e^{-a (r - r0)}).
struct AoaVarianceParams {
  double tau_min;   // rad^2
  double tau_max;   // rad^2
  double slope;     // a, 1/km
  double midpoint;  // r0, km
};

// Power-law path loss (K r)^{-beta} with log-normal shadowing of linear
// standard deviation sigma.
struct ChannelParams {
  double K;
  double beta;
  double sigma;
  AoaVarianceParams aoa;
};

// Urban macro-cell defaults: K = 4250 /km, beta = 3.52,
// tau in [pi/90, pi/12], a = 0.05 /km, r0 = 25 km.
AoaVarianceParams default_aoa_params();
ChannelParams default_channel_params(double sigma_db);

// Throws InvalidArgument unless K > 0, beta > 2, sigma >= 0 and
// 0 < tau_min < tau_max < inf, a > 0.
void validate(const ChannelParams& params);

double path_loss(double r, const ChannelParams& params);

// g = 1 / path_loss, the noiseless inverse RSS at distance r.
double inverse_path_loss(double r, const ChannelParams& params);

double sigma_from_db(double sigma_db);

// S = exp(-sigma^2 / beta + sigma Z). Exactly 1 when sigma == 0.
double sample_shadowing(double sigma, double beta, Rng& rng);

double aoa_variance(double r, const AoaVarianceParams& aoa);

// Elevation angles are N(pi - psi_j, E), the azimuth N(psi_{d-1} - pi, E).
// Draws are not wrapped. Output holds d - 1 angles, elevations first.
void sample_aoa(const HypersphericalCoord& h, double variance, Rng& rng, std::span<double> out);
std::vector<double> sample_aoa(const HypersphericalCoord& h, double variance, Rng& rng);

// One row per sensor: location, RSS P, inverse RSS N = 1/P and d - 1 angles.
struct ObservationView {
  std::span<const double> sensor;
  double rss;
  double inverse_rss;
  std::span<const double> angles;
};

class ObservationSet {
 public:
  explicit ObservationSet(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return rss_.size(); }
  bool empty() const { return rss_.empty(); }
  void reserve(std::size_t n);

  // Throws unless rss > 0 and the spans have d and d - 1 entries.
  void push_back(std::span<const double> sensor, double rss, std::span<const double> angles);

  ObservationView at(std::size_t i) const;
  const std::vector<double>& inverse_rss() const { return inverse_rss_; }

 private:
  int dim_;
  std::vector<double> sensors_;
  std::vector<double> rss_;
  std::vector<double> inverse_rss_;
  std::vector<double> angles_;
};

// Per sensor: one shadowing draw, then d - 1 AOA draws with variance E at
// the true range. Throws InvalidArgument for a sensor at the origin.
ObservationSet observe(const PointPattern& pattern, const ChannelParams& params, Rng& rng);

}  // namespace fuseloc
