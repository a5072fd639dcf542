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

#include "fuseloc/estimator.hpp"

#include <cmath>

#include "fuseloc/error.hpp"

namespace fuseloc {

CalibrationFit exact_fit(const ChannelParams& params) {
  validate(params);
  return {-params.beta * std::log(params.K) - params.sigma * params.sigma / params.beta, -params.beta,
          0, params.sigma * params.sigma};
}

std::vector<CalibrationSample> generate_calibration_data(std::size_t m, double radius, int d,
                                                         const ChannelParams& params, Rng& rng) {
  if (m < 2) throw InvalidArgument("calibration needs at least 2 samples");
  if (!(radius > 0.0)) throw InvalidArgument("calibration radius must be > 0");
  if (d < 2) throw UnsupportedDimension("need d >= 2, got " + std::to_string(d));
  validate(params);
  std::vector<CalibrationSample> out(m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s2_over_beta = params.sigma * params.sigma / params.beta;
  for (CalibrationSample& s : out) {
    // 1 - U lies in (0, 1], so the distance is never 0.
    s.distance = radius * std::pow(1.0 - unit(rng), 1.0 / d);
    double shadow = 1.0;
    if (params.sigma > 0.0) shadow = std::exp(-s2_over_beta + params.sigma * normal(rng));
    s.rss = path_loss(s.distance, params) * shadow;
  }
  return out;
}

CalibrationFit calibrate(std::span<const CalibrationSample> samples) {
  const std::size_t m = samples.size();
  if (m < 2) throw InvalidArgument("calibrate: need at least 2 samples");
  double mx = 0.0;
  double my = 0.0;
  for (const CalibrationSample& s : samples) {
    if (!(s.rss > 0.0) || !(s.distance > 0.0)) {
      throw InvalidArgument("calibrate: RSS and distance must be > 0");
    }
    mx += std::log(s.distance);
    my += std::log(s.rss);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0;
  double sxy = 0.0;
  for (const CalibrationSample& s : samples) {
    const double dx = std::log(s.distance) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(s.rss) - my);
  }
  if (!(sxx > 0.0)) throw CalibrationError("calibrate: singular fit, all distances are equal");
  CalibrationFit fit;
  fit.gamma_hat = sxy / sxx;
  fit.alpha_hat = my - fit.gamma_hat * mx;
  fit.n_cal = m;
  if (!(fit.gamma_hat < 0.0)) {
    throw CalibrationError("calibrate: fitted slope " + std::to_string(fit.gamma_hat) +
                           " is not negative");
  }
  double ssr = 0.0;
  for (const CalibrationSample& s : samples) {
    const double e = std::log(s.rss) - fit.alpha_hat - fit.gamma_hat * std::log(s.distance);
    ssr += e * e;
  }
  fit.residual_var = m > 2 ? ssr / static_cast<double>(m - 2) : 0.0;
  return fit;
}

double estimate_distance(double rss, const CalibrationFit& fit) {
  if (!(rss > 0.0)) throw InvalidArgument("estimate_distance: RSS must be > 0");
  return std::exp((std::log(rss) - fit.alpha_hat) / fit.gamma_hat);
}

void individual_estimate(std::span<const double> sensor, double r_hat,
                         std::span<const double> angles, std::span<double> out) {
  const std::size_t d = sensor.size();
  if (d < 2 || angles.size() != d - 1 || out.size() != d) {
    throw InvalidArgument("individual_estimate: dimension mismatch");
  }
  double sin_prod = r_hat;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    out[k] = sensor[k] + sin_prod * std::cos(angles[k]);
    if (k + 2 < d) sin_prod *= std::sin(angles[k]);
  }
  out[d - 1] = sensor[d - 1] + sin_prod * std::sin(angles[d - 2]);
}

CartesianPoint individual_estimate(std::span<const double> sensor, double r_hat,
                                   std::span<const double> angles) {
  CartesianPoint p;
  p.coords.resize(sensor.size());
  individual_estimate(sensor, r_hat, angles, p.coords);
  return p;
}

TargetEstimate fuse(std::span<const CartesianPoint> individual) {
  if (individual.empty()) throw InvalidArgument("fuse: no sensors");
  const std::size_t d = individual.front().dim();
  TargetEstimate out;
  out.coords.coords.assign(d, 0.0);
  for (const CartesianPoint& p : individual) {
    if (p.dim() != d) throw InvalidArgument("fuse: dimension mismatch");
    for (std::size_t k = 0; k < d; ++k) out.coords.coords[k] += p.coords[k];
  }
  for (double& x : out.coords.coords) x /= static_cast<double>(individual.size());
  out.n_used = individual.size();
  return out;
}

TargetEstimate localize(const ObservationSet& observations, const CalibrationFit& fit,
                        bool keep_per_sensor) {
  if (observations.empty()) throw InvalidArgument("localize: no observations");
  const auto d = static_cast<std::size_t>(observations.dim());
  const std::size_t n = observations.size();
  TargetEstimate out;
  out.coords.coords.assign(d, 0.0);
  out.n_used = n;
  if (keep_per_sensor) out.per_sensor.emplace().reserve(n);
  std::vector<double> est(d);
  for (std::size_t i = 0; i < n; ++i) {
    const ObservationView obs = observations.at(i);
    individual_estimate(obs.sensor, estimate_distance(obs.rss, fit), obs.angles, est);
    for (std::size_t k = 0; k < d; ++k) out.coords.coords[k] += est[k];
    if (keep_per_sensor) out.per_sensor->push_back(CartesianPoint{est});
  }
  for (double& x : out.coords.coords) x /= static_cast<double>(n);
  return out;
}

}  // namespace fuseloc
