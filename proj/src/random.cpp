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

#include "fuseloc/random.hpp"

#include <cmath>

namespace fuseloc {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master_seed);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p));
  const std::uint64_t lo = mix64(h);
  const std::uint64_t hi = mix64(lo);
  std::seed_seq seq{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                    static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)};
  return Rng(seq);
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

void uniform_in_ball(double radius, Rng& rng, std::span<double> out,
                     std::span<const double> center) {
  const std::size_t d = out.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : out) {
      x = normal(rng);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double r = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(d));
  const double scale = r / std::sqrt(norm2);
  for (std::size_t k = 0; k < d; ++k) {
    out[k] *= scale;
    if (!center.empty()) out[k] += center[k];
  }
}

}  // namespace fuseloc
