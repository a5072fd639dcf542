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

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "fuseloc/analysis.hpp"
#include "fuseloc/channel.hpp"
#include "fuseloc/estimator.hpp"
#include "fuseloc/pointproc.hpp"

namespace fuseloc {

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

// Header x1..xd, one point per row.
void write_pattern_csv(std::ostream& os, const PointPattern& pattern);
PointPattern read_pattern_csv(std::istream& is, double window_radius, const ProcessModel& model);

// Header x1..xd,P,N,theta1..theta_{d-1}.
void write_observations_csv(std::ostream& os, const ObservationSet& obs);
ObservationSet read_observations_csv(std::istream& is);

// Header P,R.
void write_calibration_csv(std::ostream& os, const std::vector<CalibrationSample>& samples);
std::vector<CalibrationSample> read_calibration_csv(std::istream& is);

// Header grid,empirical,stderr,bound,bound_stderr.
void write_result_csv(std::ostream& os, const ExperimentResult& result);

nlohmann::json to_json(const ProcessModel& model);
nlohmann::json to_json(const ChannelParams& params);
nlohmann::json to_json(const CalibrationFit& fit);
nlohmann::json to_json(const MomentEstimates& moments);
nlohmann::json to_json(const LaplaceProbe& probe);
nlohmann::json to_json(const ExperimentResult& result);

// Reads {alpha_hat, gamma_hat, n_cal, residual_var}; throws InvalidArgument
// on missing fields or a non-negative slope.
CalibrationFit fit_from_json(const nlohmann::json& j);

}  // namespace fuseloc
