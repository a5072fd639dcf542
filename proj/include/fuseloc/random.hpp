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
#include <initializer_list>
#include <random>
#include <span>

namespace fuseloc {

using Rng = std::mt19937_64;

// splitmix64 finalizer; also used to mix stream identifiers.
std::uint64_t mix64(std::uint64_t x);

// Independent stream for a (master seed, path...) tuple, e.g.
// make_stream(seed, {experiment_tag, grid_index, replica}). The same tuple
// always yields the same engine state regardless of which thread asks.
Rng make_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path);

// Stable 64-bit tag for a short ASCII label (FNV-1a).
constexpr std::uint64_t stream_tag(const char* label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* c = label; *c != '\0'; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

double uniform01(Rng& rng);
double standard_normal(Rng& rng);

// Uniform point in the ball of radius `radius` centred at `center` (or the
// origin when `center` is empty): r = radius * U^{1/d} along a normalised
// Gaussian direction. Writes d coordinates into `out`.
void uniform_in_ball(double radius, Rng& rng, std::span<double> out,
                     std::span<const double> center = {});

}  // namespace fuseloc
