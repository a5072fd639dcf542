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

#include "fuseloc/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "fuseloc/error.hpp"

namespace fuseloc {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_field(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("line {}: '{}' is not a finite number", line_no, s));
  }
  return v;
}

// Reads the header, checks it, then hands every data row to fn.
template <class Fn>
void read_csv(std::istream& is, const std::vector<std::string>& expected, Fn fn) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("CSV input is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_csv(line) != expected) {
    throw InvalidArgument(fmt::format("line 1: expected header '{}', got '{}'",
                                      fmt::join(expected, ","), line));
  }
  std::size_t line_no = 1;
  std::vector<double> row(expected.size());
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != expected.size()) {
      throw InvalidArgument(fmt::format("line {}: expected {} fields, got {}", line_no,
                                        expected.size(), fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) row[c] = parse_field(fields[c], line_no);
    fn(row, line_no);
  }
}

std::vector<std::string> coord_header(std::size_t d) {
  std::vector<std::string> h;
  for (std::size_t k = 1; k <= d; ++k) h.push_back(fmt::format("x{}", k));
  return h;
}

std::size_t dimension_from_header(const std::string& line) {
  const auto fields = split_csv(line);
  std::size_t d = 0;
  while (d < fields.size() && fields[d] == fmt::format("x{}", d + 1)) ++d;
  return d;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{}", x); }

void write_pattern_csv(std::ostream& os, const PointPattern& pattern) {
  os << fmt::format("{}\n", fmt::join(coord_header(static_cast<std::size_t>(pattern.dim())), ","));
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    os << fmt::format("{}\n", fmt::join(pattern.point(i), ","));
  }
}

PointPattern read_pattern_csv(std::istream& is, double window_radius, const ProcessModel& model) {
  std::string header;
  if (!std::getline(is, header)) throw InvalidArgument("pattern CSV is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const std::size_t d = dimension_from_header(header);
  if (d < 2 || d != split_csv(header).size()) {
    throw InvalidArgument("line 1: pattern header must be x1,...,xd with d >= 2");
  }
  PointPattern out(static_cast<int>(d), window_radius, model);
  std::stringstream rest;
  rest << header << '\n' << is.rdbuf();
  read_csv(rest, coord_header(d), [&](const std::vector<double>& row, std::size_t line_no) {
    try {
      out.push_back(row);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(fmt::format("line {}: {}", line_no, e.what()));
    }
  });
  return out;
}

void write_observations_csv(std::ostream& os, const ObservationSet& obs) {
  const auto d = static_cast<std::size_t>(obs.dim());
  std::vector<std::string> header = coord_header(d);
  header.emplace_back("P");
  header.emplace_back("N");
  for (std::size_t j = 1; j < d; ++j) header.push_back(fmt::format("theta{}", j));
  os << fmt::format("{}\n", fmt::join(header, ","));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const ObservationView v = obs.at(i);
    os << fmt::format("{},{},{},{}\n", fmt::join(v.sensor, ","), v.rss, v.inverse_rss,
                      fmt::join(v.angles, ","));
  }
}

ObservationSet read_observations_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw InvalidArgument("observation CSV is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const std::size_t d = dimension_from_header(header);
  if (d < 2) throw InvalidArgument("line 1: observation header must start with x1,...,xd");
  std::vector<std::string> expected = coord_header(d);
  expected.emplace_back("P");
  expected.emplace_back("N");
  for (std::size_t j = 1; j < d; ++j) expected.push_back(fmt::format("theta{}", j));
  ObservationSet out(static_cast<int>(d));
  std::stringstream rest;
  rest << header << '\n' << is.rdbuf();
  read_csv(rest, expected, [&](const std::vector<double>& row, std::size_t line_no) {
    std::span<const double> r(row);
    try {
      out.push_back(r.subspan(0, d), row[d], r.subspan(d + 2, d - 1));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(fmt::format("line {}: {}", line_no, e.what()));
    }
  });
  return out;
}

void write_calibration_csv(std::ostream& os, const std::vector<CalibrationSample>& samples) {
  os << "P,R\n";
  for (const CalibrationSample& s : samples) os << fmt::format("{},{}\n", s.rss, s.distance);
}

std::vector<CalibrationSample> read_calibration_csv(std::istream& is) {
  std::vector<CalibrationSample> out;
  read_csv(is, {"P", "R"}, [&](const std::vector<double>& row, std::size_t line_no) {
    if (!(row[0] > 0.0) || !(row[1] > 0.0)) {
      throw InvalidArgument(fmt::format("line {}: P and R must be > 0", line_no));
    }
    out.push_back({row[0], row[1]});
  });
  return out;
}

void write_result_csv(std::ostream& os, const ExperimentResult& r) {
  os << "grid,empirical,stderr,bound,bound_stderr\n";
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    os << fmt::format("{},{},{},{},{}\n", r.grid[g], r.empirical[g], r.stderr_empirical[g],
                      r.bound[g], r.bound_stderr[g]);
  }
}

nlohmann::json to_json(const ProcessModel& model) {
  nlohmann::json j;
  j["type"] = model_tag(model);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Ppp>) {
          j["lambda"] = m.intensity;
        } else if constexpr (std::is_same_v<M, MaternI> || std::is_same_v<M, MaternII>) {
          j["lambda_p"] = m.parent_intensity;
          j["rc"] = m.hardcore_radius;
        } else if constexpr (std::is_same_v<M, MaternCluster>) {
          j["lambda_p"] = m.parent_intensity;
          j["cbar"] = m.mean_cluster_size;
          j["rc"] = m.cluster_radius;
        } else if constexpr (std::is_same_v<M, ThomasCluster>) {
          j["lambda_p"] = m.parent_intensity;
          j["cbar"] = m.mean_cluster_size;
          j["sigma_c"] = m.scatter_sd;
        } else {
          j["alpha"] = m.alpha;
          j["lambda"] = m.intensity;
        }
      },
      model);
  return j;
}

nlohmann::json to_json(const ChannelParams& p) {
  return {{"K", p.K},
          {"beta", p.beta},
          {"sigma", p.sigma},
          {"aoa",
           {{"tau_min", p.aoa.tau_min},
            {"tau_max", p.aoa.tau_max},
            {"slope", p.aoa.slope},
            {"midpoint", p.aoa.midpoint}}}};
}

nlohmann::json to_json(const CalibrationFit& fit) {
  return {{"alpha_hat", fit.alpha_hat},
          {"gamma_hat", fit.gamma_hat},
          {"n_cal", fit.n_cal},
          {"residual_var", fit.residual_var}};
}

nlohmann::json to_json(const MomentEstimates& m) {
  return {{"m1", m.m1},           {"m2", m.m2},       {"m1_stderr", m.m1_stderr},
          {"m2_stderr", m.m2_stderr}, {"cov12", m.cov12}, {"n_mc", m.n_mc}};
}

nlohmann::json to_json(const LaplaceProbe& p) {
  return {{"n_lo", p.n_lo},
          {"n_hi", p.n_hi},
          {"angle_lo", p.angle_lo},
          {"angle_hi", p.angle_hi},
          {"log_shoulder", p.log_shoulder},
          {"angle_shoulder", p.angle_shoulder},
          {"weight", p.weight}};
}

nlohmann::json to_json(const ExperimentResult& r) {
  return {{"mode", r.mode},           {"model", r.model}, {"reps", r.reps},
          {"seed", r.seed},           {"grid", r.grid},   {"empirical", r.empirical},
          {"stderr", r.stderr_empirical}, {"bound", r.bound}, {"bound_stderr", r.bound_stderr},
          {"moments", to_json(r.moments)}};
}

CalibrationFit fit_from_json(const nlohmann::json& j) {
  CalibrationFit fit{};
  try {
    fit.alpha_hat = j.at("alpha_hat").get<double>();
    fit.gamma_hat = j.at("gamma_hat").get<double>();
    fit.n_cal = j.at("n_cal").get<std::size_t>();
    fit.residual_var = j.at("residual_var").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("calibration fit JSON: ") + e.what());
  }
  if (!(fit.gamma_hat < 0.0)) throw InvalidArgument("calibration fit JSON: gamma_hat must be < 0");
  return fit;
}

}  // namespace fuseloc
