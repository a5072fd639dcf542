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

#include <span>
#include <vector>

namespace fuseloc {

// Cartesian location in km. Dimension is coords.size() (>= 2).
struct CartesianPoint {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
  std::span<const double> view() const { return coords; }
};

// Hyperspherical coordinates (r, psi_1..psi_{d-2}, psi_{d-1}).
// Elevations lie in [0, pi], the azimuth in [0, 2pi).
struct HypersphericalCoord {
  double r = 0.0;
  std::vector<double> elevations;
  double azimuth = 0.0;

  std::size_t dim() const { return elevations.size() + 2; }
};

// Uses two-argument arctangents so every angle lands in its stated range.
// When all trailing coordinates vanish the corresponding angle is 0.
// Throws InvalidArgument for the zero vector or d < 2.
HypersphericalCoord cart_to_hyper(std::span<const double> p);
void cart_to_hyper(std::span<const double> p, HypersphericalCoord& out);

CartesianPoint hyper_to_cart(const HypersphericalCoord& h);
void hyper_to_cart(const HypersphericalCoord& h, std::span<double> out);

double euclidean_norm(std::span<const double> p);

// pi^{d/2} r^d / Gamma(d/2 + 1).
double ball_volume(int d, double r);

// Volume of the intersection of two radius-rc balls whose centres are rho
// apart. Closed forms exist for d in {2, 3} only.
double lens_volume(int d, double rc, double rho);

// 2 * ball_volume(d, rc) - lens_volume(d, rc, rho).
double union_volume(int d, double rc, double rho);

}  // namespace fuseloc
