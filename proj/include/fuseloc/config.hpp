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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fuseloc/analysis.hpp"
#include "fuseloc/channel.hpp"
#include "fuseloc/error.hpp"
#include "fuseloc/pointproc.hpp"

namespace fuseloc {

// Bad configuration text or values. Messages carry "source:line: " when the
// value came from a file.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Flat run configuration. Distances in km, angles in rad, shadowing in dB.
struct RunConfig {
  int dim = 2;
  double radius = 30.0;

  std::string model = "ppp";
  double lambda = 1.0;
  std::optional<double> lambda_p;
  std::optional<double> target_lambda;
  double rc = 0.3;
  double cbar = 2.5;
  double sigma_c = 0.3;
  double alpha = 0.8;
  std::string ginibre_method = "kostlan";

  double K = 4250.0;
  double beta = 3.52;
  double sigma_db = 12.0;
  double tau_min;
  double tau_max;
  double aoa_slope;
  double aoa_midpoint;

  std::size_t reps = 5000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool deterministic = false;
  std::size_t cal_samples = 10000;  // 0 selects the noiseless fit
  std::size_t moment_samples = 1000000;
  std::size_t refit = 0;  // per-replica calibration sample count, 0 = off

  std::vector<double> n_grid{1000, 2000, 3000, 4000, 5000};
  std::vector<double> lambda_grid{1, 2, 3, 4, 5};
  std::vector<double> sigma_db_grid{4, 8, 12};
  std::vector<double> r_grid;  // empty selects a model-dependent default

  std::optional<double> probe_n_lo;
  std::optional<double> probe_n_hi;
  std::optional<double> probe_log_shoulder;
  std::optional<double> probe_angle_shoulder;
  std::optional<double> probe_weight;

  std::string out = "-";

  RunConfig();
};

// Every recognised key, sorted.
const std::vector<std::string>& config_keys();

// Sets one key from text. `where` prefixes error messages.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& where = "");

// key=value lines; blank lines and lines starting with '#' are skipped.
void load_config(RunConfig& cfg, std::istream& is, const std::string& source);
void load_config_file(RunConfig& cfg, const std::string& path);

// Cross-field checks (model parameters, channel, grids).
void validate(const RunConfig& cfg);

// Sorted key=value lines; unset optional keys are omitted. Parsing the dump
// reproduces it exactly.
std::string canonical_dump(const RunConfig& cfg);
std::map<std::string, std::string> config_map(const RunConfig& cfg);

// Model of the configured family. Matérn models take lambda_p directly or
// match target_lambda; cluster models take cbar or target_lambda / lambda_p.
ProcessModel resolve_model(const RunConfig& cfg);

// Family used for intensity grids; the grid value replaces the intensity.
ProcessModel model_family(const RunConfig& cfg);

GinibreMethod resolve_ginibre_method(const RunConfig& cfg);
ChannelParams resolve_channel(const RunConfig& cfg);
RunOptions resolve_run_options(const RunConfig& cfg);
LaplaceProbe resolve_probe(const RunConfig& cfg);

// Default seed: FUSELOC_SEED if set and valid, else 1.
std::uint64_t default_seed();

}  // namespace fuseloc
