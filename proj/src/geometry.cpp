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

#include "fuseloc/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fuseloc/error.hpp"

namespace fuseloc {

double euclidean_norm(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return std::sqrt(s);
}

void cart_to_hyper(std::span<const double> p, HypersphericalCoord& out) {
  const std::size_t d = p.size();
  if (d < 2) throw InvalidArgument("cart_to_hyper: dimension must be >= 2");
  for (double x : p) {
    if (!std::isfinite(x)) throw InvalidArgument("cart_to_hyper: non-finite coordinate");
  }
  const double r = euclidean_norm(p);
  if (r == 0.0) throw InvalidArgument("cart_to_hyper: angles undefined at the origin");

  out.r = r;
  out.elevations.resize(d - 2);
  // tail2 holds sum_{k > j} x_k^2, accumulated from the back.
  double tail2 = p[d - 1] * p[d - 1] + p[d - 2] * p[d - 2];
  for (std::size_t j = d - 2; j-- > 0;) {
    out.elevations[j] = std::atan2(std::sqrt(tail2), p[j]);
    tail2 += p[j] * p[j];
  }
  double az = std::atan2(p[d - 1], p[d - 2]);
  if (az < 0.0) az += 2.0 * std::numbers::pi;
  if (az >= 2.0 * std::numbers::pi) az = 0.0;
  out.azimuth = az;
}

HypersphericalCoord cart_to_hyper(std::span<const double> p) {
  HypersphericalCoord h;
  cart_to_hyper(p, h);
  return h;
}

void hyper_to_cart(const HypersphericalCoord& h, std::span<double> out) {
  const std::size_t d = h.dim();
  if (out.size() != d) throw InvalidArgument("hyper_to_cart: output size mismatch");
  if (!(h.r > 0.0) || !std::isfinite(h.r)) throw InvalidArgument("hyper_to_cart: r must be > 0");
  double sin_prod = h.r;
  for (std::size_t k = 0; k + 2 < d; ++k) {
    const double psi = h.elevations[k];
    if (!(psi >= 0.0 && psi <= std::numbers::pi)) {
      throw InvalidArgument("hyper_to_cart: elevation outside [0, pi]");
    }
    out[k] = sin_prod * std::cos(psi);
    sin_prod *= std::sin(psi);
  }
  if (!(h.azimuth >= 0.0 && h.azimuth < 2.0 * std::numbers::pi)) {
    throw InvalidArgument("hyper_to_cart: azimuth outside [0, 2pi)");
  }
  out[d - 2] = sin_prod * std::cos(h.azimuth);
  out[d - 1] = sin_prod * std::sin(h.azimuth);
}

CartesianPoint hyper_to_cart(const HypersphericalCoord& h) {
  CartesianPoint p;
  p.coords.resize(h.dim());
  hyper_to_cart(h, p.coords);
  return p;
}

double ball_volume(int d, double r) {
  if (d < 1) throw UnsupportedDimension(std::to_string(d));
  if (!(r >= 0.0)) throw InvalidArgument("ball_volume: radius must be >= 0");
  const double half = 0.5 * static_cast<double>(d);
  return std::pow(std::numbers::pi, half) * std::pow(r, d) / std::tgamma(half + 1.0);
}

double lens_volume(int d, double rc, double rho) {
  if (d != 2 && d != 3) {
    throw UnsupportedDimension("lens volume closed form needs d in {2,3}, got " +
                               std::to_string(d));
  }
  if (!(rc > 0.0)) throw InvalidArgument("lens_volume: radius must be > 0");
  if (!(rho >= 0.0)) throw InvalidArgument("lens_volume: distance must be >= 0");
  if (rho >= 2.0 * rc) return 0.0;
  if (d == 2) {
    return 2.0 * rc * rc * std::acos(rho / (2.0 * rc)) -
           0.5 * rho * std::sqrt(4.0 * rc * rc - rho * rho);
  }
  const double u = rho / rc;
  return 4.0 * std::numbers::pi * rc * rc * rc / 3.0 *
         (1.0 - 0.75 * u + u * u * u / 16.0);
}

double union_volume(int d, double rc, double rho) {
  const double lens = lens_volume(d, rc, rho);
  return 2.0 * ball_volume(d, rc) - lens;
}

}  // namespace fuseloc
