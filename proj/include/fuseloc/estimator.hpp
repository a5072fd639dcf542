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
#include <optional>
#include <span>
#include <vector>

#include "fuseloc/channel.hpp"
#include "fuseloc/geometry.hpp"
#include "fuseloc/random.hpp"

namespace fuseloc {

struct CalibrationSample {
  double rss;
  double distance;
};

// ln P = alpha_hat + gamma_hat ln R. gamma_hat < 0 for every accepted fit.
struct CalibrationFit {
  double alpha_hat;
  double gamma_hat;
  std::size_t n_cal;
  double residual_var;  // SSR / (m - 2); 0 when m == 2, sigma^2 for exact_fit
};

// Population values alpha = -beta ln K - sigma^2 / beta, gamma = -beta: the
// limit of the least-squares fit as the calibration set grows.
CalibrationFit exact_fit(const ChannelParams& params);

// m pairs with distances from the density d r^{d-1} / R^d on (0, R].
std::vector<CalibrationSample> generate_calibration_data(std::size_t m, double radius, int d,
                                                         const ChannelParams& params, Rng& rng);

// Ordinary least squares of ln P on ln R. Throws CalibrationError when all
// distances coincide or the fitted slope is not negative.
CalibrationFit calibrate(std::span<const CalibrationSample> samples);

// R_hat = exp((ln P - alpha_hat) / gamma_hat). Unclamped.
double estimate_distance(double rss, const CalibrationFit& fit);

// Projects r_hat along the measured bearing from the sensor:
// X_k + r_hat cos(Theta_k) prod_{j<k} sin(Theta_j) for k < d, and
// X_d + r_hat sin(Theta_{d-1}) prod_{j<d-1} sin(Theta_j).
void individual_estimate(std::span<const double> sensor, double r_hat,
                         std::span<const double> angles, std::span<double> out);
CartesianPoint individual_estimate(std::span<const double> sensor, double r_hat,
                                   std::span<const double> angles);

struct TargetEstimate {
  CartesianPoint coords;
  std::size_t n_used = 0;
  std::optional<std::vector<CartesianPoint>> per_sensor;
};

// Coordinate-wise mean. Throws InvalidArgument on an empty list.
TargetEstimate fuse(std::span<const CartesianPoint> individual);

// Distance estimate, individual estimate and mean over all observations.
// Throws InvalidArgument when there are none.
TargetEstimate localize(const ObservationSet& observations, const CalibrationFit& fit,
                        bool keep_per_sensor = false);

}  // namespace fuseloc
