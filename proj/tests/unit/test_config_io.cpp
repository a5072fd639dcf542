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
#include <cstdlib>
#include <limits>
#include <sstream>

#include "fuseloc/config.hpp"
#include "fuseloc/io.hpp"
#include "test_util.hpp"

using namespace fuseloc;

TEST_SUITE("config_io") {
  TEST_CASE("canonical dump round trip") {
    RunConfig cfg;
    cfg.model = "matern2";
    cfg.target_lambda = 1.0;
    cfg.sigma_db_grid = {2, 4.5, 12};
    cfg.seed = 77;
    const std::string dump = canonical_dump(cfg);
    CHECK(dump.find("lambda_p") == std::string::npos);
    RunConfig back;
    std::istringstream is(dump);
    load_config(back, is, "dump");
    CHECK(canonical_dump(back) == dump);
    CHECK(back.target_lambda.has_value());
    CHECK(*back.target_lambda == 1.0);
    CHECK(back.seed == 77);

    std::string prev;
    std::istringstream lines(dump);
    for (std::string line; std::getline(lines, line);) {
      const std::string key = line.substr(0, line.find('='));
      CHECK(prev < key);
      prev = key;
    }
  }

  TEST_CASE("config errors carry the line") {
    RunConfig cfg;
    std::istringstream is("# comment\n\ndim=2\nbogus=1\n");
    try {
      load_config(cfg, is, "run.cfg");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("run.cfg:4:") == 0);
    }
    std::istringstream bad_value("radius=abc\n");
    CHECK_THROWS_AS(load_config(cfg, bad_value, "x"), ConfigError);
    std::istringstream no_eq("radius\n");
    CHECK_THROWS_AS(load_config(cfg, no_eq, "x"), ConfigError);
    CHECK_THROWS_AS(set_config_value(cfg, "reps", "-3"), ConfigError);
    CHECK_THROWS_AS(set_config_value(cfg, "reps", "0"), ConfigError);
    CHECK_THROWS_AS(set_config_value(cfg, "model", "poisson"), ConfigError);
    CHECK_THROWS_AS(set_config_value(cfg, "n_grid", "2000,1000"), ConfigError);
    std::istringstream range("dim=2\nradius=-4\n");
    try {
      load_config(cfg, range, "range.cfg");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()) == "range.cfg:2: radius: must be > 0");
    }
  }

  TEST_CASE("cross-field validation") {
    RunConfig cfg;
    cfg.beta = 2.0;
    CHECK_THROWS_AS(validate(cfg), InvalidArgument);
    cfg = RunConfig{};
    cfg.dim = 0;
    CHECK_THROWS_AS(validate(cfg), InvalidArgument);
    cfg = RunConfig{};
    cfg.model = "ginibre";
    cfg.dim = 3;
    CHECK_THROWS_AS(validate(cfg), UnsupportedDimension);
    cfg = RunConfig{};
    cfg.model = "nonsense";
    CHECK_THROWS_AS(validate(cfg), InvalidArgument);
    CHECK_NOTHROW(validate(RunConfig{}));
  }

  TEST_CASE("seed from the environment") {
    ::setenv("FUSELOC_SEED", "4242", 1);
    CHECK(default_seed() == 4242);
    CHECK(RunConfig{}.seed == 4242);
    ::unsetenv("FUSELOC_SEED");
    CHECK(default_seed() == 1);
  }

  TEST_CASE("model resolution") {
    RunConfig cfg;
    cfg.model = "matern2";
    cfg.target_lambda = 1.0;
    const auto m = std::get<MaternII>(resolve_model(cfg));
    CHECK(rel_err(m.parent_intensity, 1.1753470070802736) < 1e-10);
    cfg.lambda_p = 2.0;
    CHECK(std::get<MaternII>(resolve_model(cfg)).parent_intensity == 2.0);

    cfg = RunConfig{};
    cfg.model = "tcp";
    cfg.lambda_p = 0.5;
    cfg.target_lambda = 2.0;
    const auto t = std::get<ThomasCluster>(resolve_model(cfg));
    CHECK(t.mean_cluster_size == doctest::Approx(4.0));

    cfg = RunConfig{};
    cfg.model = "ginibre";
    cfg.lambda = 3.0;
    CHECK(std::get<AlphaGinibre>(resolve_model(cfg)).intensity == 3.0);
  }

  TEST_CASE("double formatting round trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 2.5}) {
      CHECK(std::stod(format_double(x)) == x);
    }
  }

  TEST_CASE("observation CSV round trip") {
    ObservationSet obs(3);
    const double s1[] = {1.0, -2.0, 0.5};
    const double a1[] = {0.3, -1.2};
    obs.push_back(s1, 1e-9, a1);
    const double s2[] = {0.1, 0.2, 0.3};
    const double a2[] = {2.0, 0.1};
    obs.push_back(s2, 3.5e-12, a2);
    std::ostringstream os;
    write_observations_csv(os, obs);
    std::istringstream is(os.str());
    const ObservationSet back = read_observations_csv(is);
    REQUIRE(back.size() == 2);
    CHECK(back.dim() == 3);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto a = obs.at(i);
      const auto b = back.at(i);
      CHECK(a.rss == b.rss);
      CHECK(std::equal(a.sensor.begin(), a.sensor.end(), b.sensor.begin()));
      CHECK(std::equal(a.angles.begin(), a.angles.end(), b.angles.begin()));
    }
  }

  TEST_CASE("calibration CSV and fit JSON") {
    std::vector<CalibrationSample> s = {{1e-10, 2.0}, {3e-12, 7.5}, {1.25e-13, 19.0}};
    std::ostringstream os;
    write_calibration_csv(os, s);
    std::istringstream is(os.str());
    const auto back = read_calibration_csv(is);
    REQUIRE(back.size() == 3);
    CHECK(back[2].rss == s[2].rss);
    CHECK(back[1].distance == s[1].distance);

    std::istringstream broken("P,R\n1e-10,2\nfoo,3\n");
    try {
      read_calibration_csv(broken);
      FAIL("no error");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    const CalibrationFit fit{-29.4, -3.51, 10000, 7.4};
    const CalibrationFit f2 = fit_from_json(nlohmann::json::parse(to_json(fit).dump()));
    CHECK(f2.alpha_hat == fit.alpha_hat);
    CHECK(f2.gamma_hat == fit.gamma_hat);
    CHECK(f2.n_cal == fit.n_cal);
    CHECK_THROWS_AS(fit_from_json(nlohmann::json::parse(R"({"alpha_hat":1})")), InvalidArgument);
  }

  TEST_CASE("pattern CSV round trip") {
    PointPattern p(2, 5.0, Ppp{1.0});
    const double a[] = {1.0, 2.0};
    const double b[] = {-3.0, 0.25};
    p.push_back(a);
    p.push_back(b);
    std::ostringstream os;
    write_pattern_csv(os, p);
    std::istringstream is(os.str());
    const PointPattern q = read_pattern_csv(is, 5.0, Ppp{1.0});
    CHECK(q.coords() == p.coords());
    std::istringstream outside("x1,x2\n6,0\n");
    CHECK_THROWS_AS(read_pattern_csv(outside, 5.0, Ppp{1.0}), InvalidArgument);
  }
}
