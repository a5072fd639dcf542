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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fuseloc/error.hpp"
#include "fuseloc/geometry.hpp"
#include "fuseloc/random.hpp"
#include "test_util.hpp"

using namespace fuseloc;
using std::numbers::pi;

TEST_SUITE("geometry") {
  TEST_CASE("planar axis points") {
    const double e1[] = {1.0, 0.0};
    auto h = cart_to_hyper(e1);
    CHECK(h.r == 1.0);
    CHECK(h.azimuth == 0.0);
    const double e2[] = {0.0, 1.0};
    h = cart_to_hyper(e2);
    CHECK(h.r == 1.0);
    CHECK(h.azimuth == doctest::Approx(pi / 2).epsilon(1e-15));
    const double neg[] = {0.0, -2.0};
    CHECK(cart_to_hyper(neg).azimuth == doctest::Approx(3 * pi / 2).epsilon(1e-15));
  }

  TEST_CASE("inverse transform examples") {
    HypersphericalCoord h{1.0, {}, pi / 2};
    auto p = hyper_to_cart(h);
    CHECK(p.coords[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p.coords[1] == doctest::Approx(1.0));

    HypersphericalCoord eq{2.0, {pi / 2}, 0.0};
    p = hyper_to_cart(eq);
    CHECK(std::abs(p.coords[0]) < 1e-15);
    CHECK(p.coords[1] == doctest::Approx(2.0));
    CHECK(p.coords[2] == 0.0);

    for (double psi : {0.3, 1.9, 4.0, 6.1}) {
      p = hyper_to_cart(HypersphericalCoord{30.0, {}, psi});
      CHECK(p.coords[0] == doctest::Approx(30.0 * std::cos(psi)).epsilon(1e-14));
      CHECK(p.coords[1] == doctest::Approx(30.0 * std::sin(psi)).epsilon(1e-14));
    }
  }

  TEST_CASE("zero trailing coordinates take angle 0") {
    const double p[] = {1.0, 0.0, 0.0};
    const auto h = cart_to_hyper(p);
    CHECK(h.elevations[0] == 0.0);
    CHECK(h.azimuth == 0.0);
    const double q[] = {-1.0, 0.0, 0.0};
    CHECK(cart_to_hyper(q).elevations[0] == doctest::Approx(pi));
  }

  TEST_CASE("invalid inputs") {
    const double zero[] = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(cart_to_hyper(zero), InvalidArgument);
    const double one[] = {1.0};
    CHECK_THROWS_AS(cart_to_hyper(one), InvalidArgument);
    CHECK_THROWS_AS(hyper_to_cart(HypersphericalCoord{1.0, {4.0}, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(hyper_to_cart(HypersphericalCoord{1.0, {}, 2 * pi}), InvalidArgument);
    CHECK_THROWS_AS(hyper_to_cart(HypersphericalCoord{-1.0, {}, 0.0}), InvalidArgument);
  }

  TEST_CASE("round trip over random points") {
    for (int d : {2, 3, 5}) {
      Rng rng = make_stream(11, {static_cast<std::uint64_t>(d)});
      std::normal_distribution<double> normal(0.0, 10.0);
      std::vector<double> p(d), back(d);
      double worst_cart = 0.0;
      double worst_angle = 0.0;
      for (int i = 0; i < 10000; ++i) {
        for (double& x : p) x = normal(rng);
        const auto h = cart_to_hyper(p);
        CHECK(h.azimuth >= 0.0);
        CHECK(h.azimuth < 2 * pi);
        for (double e : h.elevations) {
          CHECK(e >= 0.0);
          CHECK(e <= pi);
        }
        hyper_to_cart(h, back);
        const double r = euclidean_norm(p);
        for (int k = 0; k < d; ++k) worst_cart = std::max(worst_cart, std::abs(back[k] - p[k]) / r);
        const auto h2 = cart_to_hyper(back);
        worst_angle = std::max(worst_angle, std::abs(h2.r - h.r) / h.r);
        for (std::size_t k = 0; k < h.elevations.size(); ++k) {
          worst_angle = std::max(worst_angle, std::abs(h2.elevations[k] - h.elevations[k]));
        }
        double daz = std::abs(h2.azimuth - h.azimuth);
        daz = std::min(daz, 2 * pi - daz);
        worst_angle = std::max(worst_angle, daz);
        CHECK(euclidean_norm(back) == doctest::Approx(h.r).epsilon(1e-14));
      }
      INFO("d = " << d);
      CHECK(worst_cart < 1e-12);
      CHECK(worst_angle < 1e-10);
    }
  }

  TEST_CASE("ball volumes") {
    CHECK(ball_volume(2, 30.0) == doctest::Approx(900 * pi).epsilon(1e-15));
    CHECK(ball_volume(3, 1.0) == doctest::Approx(4 * pi / 3).epsilon(1e-15));
    CHECK(ball_volume(2, 0.0) == 0.0);
    CHECK(ball_volume(2, 0.3) == doctest::Approx(0.28274333882308139).epsilon(1e-15));
    CHECK(ball_volume(5, 2.0) == doctest::Approx(8 * pi * pi / 15 * 32).epsilon(1e-14));
    CHECK_THROWS_AS(ball_volume(2, -1.0), InvalidArgument);
  }

  TEST_CASE("lens volumes against independent quadrature") {
    CHECK(lens_volume(2, 1.0, 0.0) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(lens_volume(2, 1.0, 2.5) == 0.0);
    CHECK(lens_volume(3, 1.0, 1.0) == doctest::Approx(5 * pi / 12).epsilon(1e-14));
    CHECK(lens_volume(3, 1.0, 1.0) == doctest::Approx(1.3089969389957472).epsilon(1e-14));
    CHECK(lens_volume(2, 1.0, 0.5) == doctest::Approx(2.1521092250297088).epsilon(1e-14));
    CHECK(lens_volume(2, 0.3, 0.45) == doctest::Approx(0.040798057857984878).epsilon(1e-13));
    CHECK(lens_volume(3, 0.3, 0.45) == doctest::Approx(0.0097193022720434228).epsilon(1e-13));
    CHECK_THROWS_AS(lens_volume(4, 1.0, 0.5), UnsupportedDimension);
    CHECK_THROWS_AS(union_volume(5, 1.0, 0.5), UnsupportedDimension);
  }

  TEST_CASE("three-dimensional lens by Monte Carlo") {
    Rng rng = make_stream(5, {});
    const int n = 400000;
    std::vector<double> p(3);
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      uniform_in_ball(1.0, rng, p);
      const double dx = p[0] - 1.0;
      if (dx * dx + p[1] * p[1] + p[2] * p[2] <= 1.0) ++hits;
    }
    const double frac = static_cast<double>(hits) / n;
    const double v = ball_volume(3, 1.0);
    const double se = v * std::sqrt(frac * (1 - frac) / n);
    CHECK(std::abs(frac * v - 5 * pi / 12) < kSigmas * se);
  }

  TEST_CASE("lens and union properties") {
    for (int d : {2, 3}) {
      const double rc = 0.7;
      double prev = lens_volume(d, rc, 0.0);
      CHECK(prev == doctest::Approx(ball_volume(d, rc)).epsilon(1e-14));
      for (int i = 1; i <= 400; ++i) {
        const double rho = 3.0 * rc * i / 400.0;
        const double a = lens_volume(d, rc, rho);
        CHECK(a <= prev + 1e-15);
        CHECK(a >= 0.0);
        if (rho >= 2 * rc) CHECK(a == 0.0);
        CHECK(union_volume(d, rc, rho) + a == doctest::Approx(2 * ball_volume(d, rc)).epsilon(1e-14));
        prev = a;
      }
    }
    CHECK(union_volume(2, 1.0, 0.0) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(union_volume(2, 1.0, 3.0) == doctest::Approx(2 * pi).epsilon(1e-15));
    CHECK(union_volume(3, 1.0, 1.0) == doctest::Approx(27 * pi / 12).epsilon(1e-14));
  }
}
