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

#include "fuseloc/channel.hpp"

#include <cmath>
#include <numbers>

#include "fuseloc/error.hpp"

namespace fuseloc {

AoaVarianceParams default_aoa_params() {
  return {std::numbers::pi / 90.0, std::numbers::pi / 12.0, 0.05, 25.0};
}

ChannelParams default_channel_params(double sigma_db) {
  return {4250.0, 3.52, sigma_from_db(sigma_db), default_aoa_params()};
}

void validate(const ChannelParams& params) {
  if (!(params.K > 0.0) || !std::isfinite(params.K)) throw InvalidArgument("K must be > 0");
  if (!(params.beta > 2.0) || !std::isfinite(params.beta)) {
    throw InvalidArgument("beta must be > 2");
  }
  if (!(params.sigma >= 0.0) || !std::isfinite(params.sigma)) {
    throw InvalidArgument("shadowing sigma must be >= 0");
  }
  const AoaVarianceParams& a = params.aoa;
  if (!(a.tau_min > 0.0 && a.tau_min < a.tau_max && std::isfinite(a.tau_max))) {
    throw InvalidArgument("AOA variance bounds need 0 < tau_min < tau_max < inf");
  }
  if (!(a.slope > 0.0) || !std::isfinite(a.slope)) {
    throw InvalidArgument("AOA variance slope must be > 0");
  }
  if (!std::isfinite(a.midpoint)) throw InvalidArgument("AOA variance midpoint must be finite");
}

double path_loss(double r, const ChannelParams& params) {
  if (!(r > 0.0)) throw InvalidArgument("path_loss: distance must be > 0");
  return std::pow(params.K * r, -params.beta);
}

double inverse_path_loss(double r, const ChannelParams& params) {
  if (!(r > 0.0)) throw InvalidArgument("inverse_path_loss: distance must be > 0");
  return std::pow(params.K * r, params.beta);
}

double sigma_from_db(double sigma_db) {
  if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db)) {
    throw InvalidArgument("sigma_db must be >= 0");
  }
  return sigma_db / 10.0 * std::numbers::ln10;
}

double sample_shadowing(double sigma, double beta, Rng& rng) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sample_shadowing: sigma must be >= 0");
  if (sigma == 0.0) return 1.0;
  return std::exp(-sigma * sigma / beta + sigma * standard_normal(rng));
}

double aoa_variance(double r, const AoaVarianceParams& aoa) {
  if (!(r >= 0.0)) throw InvalidArgument("aoa_variance: distance must be >= 0");
  return aoa.tau_min + (aoa.tau_max - aoa.tau_min) / (1.0 + std::exp(-aoa.slope * (r - aoa.midpoint)));
}

void sample_aoa(const HypersphericalCoord& h, double variance, Rng& rng, std::span<double> out) {
  if (!(variance >= 0.0)) throw InvalidArgument("sample_aoa: variance must be >= 0");
  const std::size_t d = h.dim();
  if (out.size() != d - 1) throw InvalidArgument("sample_aoa: output needs d - 1 entries");
  for (std::size_t j = 0; j + 2 < d; ++j) out[j] = std::numbers::pi - h.elevations[j];
  out[d - 2] = h.azimuth - std::numbers::pi;
  if (variance == 0.0) return;
  std::normal_distribution<double> noise(0.0, std::sqrt(variance));
  for (double& theta : out) theta += noise(rng);
}

std::vector<double> sample_aoa(const HypersphericalCoord& h, double variance, Rng& rng) {
  std::vector<double> out(h.dim() - 1);
  sample_aoa(h, variance, rng, out);
  return out;
}

void ObservationSet::reserve(std::size_t n) {
  const auto d = static_cast<std::size_t>(dim_);
  sensors_.reserve(n * d);
  rss_.reserve(n);
  inverse_rss_.reserve(n);
  angles_.reserve(n * (d - 1));
}

void ObservationSet::push_back(std::span<const double> sensor, double rss,
                               std::span<const double> angles) {
  const auto d = static_cast<std::size_t>(dim_);
  if (sensor.size() != d || angles.size() != d - 1) {
    throw InvalidArgument("ObservationSet: dimension mismatch");
  }
  if (!(rss > 0.0) || !std::isfinite(rss)) throw InvalidArgument("ObservationSet: RSS must be > 0");
  sensors_.insert(sensors_.end(), sensor.begin(), sensor.end());
  rss_.push_back(rss);
  inverse_rss_.push_back(1.0 / rss);
  angles_.insert(angles_.end(), angles.begin(), angles.end());
}

ObservationView ObservationSet::at(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dim_);
  return {std::span<const double>(sensors_).subspan(i * d, d), rss_[i], inverse_rss_[i],
          std::span<const double>(angles_).subspan(i * (d - 1), d - 1)};
}

ObservationSet observe(const PointPattern& pattern, const ChannelParams& params, Rng& rng) {
  validate(params);
  const int d = pattern.dim();
  ObservationSet out(d);
  out.reserve(pattern.size());
  HypersphericalCoord h;
  std::vector<double> angles(static_cast<std::size_t>(d - 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s2_over_beta = params.sigma * params.sigma / params.beta;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    std::span<const double> x = pattern.point(i);
    cart_to_hyper(x, h);
    double shadow = 1.0;
    if (params.sigma > 0.0) shadow = std::exp(-s2_over_beta + params.sigma * normal(rng));
    const double p = path_loss(h.r, params) * shadow;
    sample_aoa(h, aoa_variance(h.r, params.aoa), rng, angles);
    out.push_back(x, p, angles);
  }
  return out;
}

}  // namespace fuseloc
