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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fuseloc/error.hpp"
#include "fuseloc/geometry.hpp"
#include "fuseloc/pointproc.hpp"
#include "neighbor_grid.hpp"

namespace fuseloc {

namespace {

// Per-replica tallies for one ring: ordered pair count and the number of
// admissible reference points.
struct RingTally {
  std::vector<double> pairs;
  std::vector<double> refs;
};

}  // namespace

PairCorrelationEstimate estimate_pair_correlation(std::span<const PointPattern> patterns,
                                                  std::span<const double> r_grid,
                                                  double half_width) {
  if (patterns.empty()) throw InvalidArgument("estimate_pair_correlation: no patterns");
  if (r_grid.empty()) throw InvalidArgument("estimate_pair_correlation: empty r grid");
  const int d = patterns.front().dim();
  const double radius = patterns.front().window_radius();
  for (const PointPattern& p : patterns) {
    if (p.dim() != d || p.window_radius() != radius) {
      throw InvalidArgument("estimate_pair_correlation: patterns differ in window or dimension");
    }
  }
  for (std::size_t g = 0; g < r_grid.size(); ++g) {
    if (!(r_grid[g] > 0.0 && r_grid[g] < 0.5 * radius)) {
      throw InvalidArgument("estimate_pair_correlation: grid values must lie in (0, R/2)");
    }
    if (g > 0 && !(r_grid[g] > r_grid[g - 1])) {
      throw InvalidArgument("estimate_pair_correlation: grid must be strictly increasing");
    }
  }
  if (half_width <= 0.0) {
    double gap = r_grid.front();
    for (std::size_t g = 1; g < r_grid.size(); ++g) gap = std::min(gap, r_grid[g] - r_grid[g - 1]);
    half_width = 0.5 * gap;
  }
  if (r_grid.front() - half_width < 0.0 || r_grid.back() + half_width >= radius) {
    throw InvalidArgument("estimate_pair_correlation: rings must fit inside [0, R)");
  }

  const std::size_t ng = r_grid.size();
  const std::size_t reps = patterns.size();
  const double reach = r_grid.back() + half_width;
  std::vector<double> inner2(ng);
  std::vector<double> lo2(ng);
  std::vector<double> hi2(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    const double inner = radius - r_grid[g] - half_width;
    inner2[g] = inner * inner;
    const double lo = r_grid[g] - half_width;
    lo2[g] = lo * lo;
    hi2[g] = (r_grid[g] + half_width) * (r_grid[g] + half_width);
  }

  std::vector<RingTally> tally(ng, RingTally{std::vector<double>(reps, 0.0),
                                             std::vector<double>(reps, 0.0)});
  std::vector<double> counts(reps);
  const auto dd = static_cast<std::size_t>(d);
  for (std::size_t k = 0; k < reps; ++k) {
    const PointPattern& pat = patterns[k];
    counts[k] = static_cast<double>(pat.size());
    detail::NeighborGrid grid(pat.coords(), d, radius, reach);
    for (std::size_t i = 0; i < pat.size(); ++i) {
      std::span<const double> p = pat.point(i);
      double n2 = 0.0;
      for (std::size_t c = 0; c < dd; ++c) n2 += p[c] * p[c];
      bool any = false;
      for (std::size_t g = 0; g < ng; ++g) {
        if (n2 <= inner2[g]) {
          tally[g].refs[k] += 1.0;
          any = true;
        }
      }
      if (!any) continue;
      grid.for_each_neighbor(i, [&](std::size_t, double d2) {
        for (std::size_t g = 0; g < ng; ++g) {
          if (d2 >= lo2[g] && d2 < hi2[g] && n2 <= inner2[g]) tally[g].pairs[k] += 1.0;
        }
      });
    }
  }

  PairCorrelationEstimate out;
  out.half_width = half_width;
  out.r.assign(r_grid.begin(), r_grid.end());
  out.h.resize(ng);
  out.stderr_h.resize(ng);
  const double window = ball_volume(d, radius);
  const double n_reps = static_cast<double>(reps);
  const double mean_count = std::accumulate(counts.begin(), counts.end(), 0.0) / n_reps;
  for (std::size_t g = 0; g < ng; ++g) {
    const double shell =
        ball_volume(d, r_grid[g] + half_width) - ball_volume(d, r_grid[g] - half_width);
    const double mean_pairs =
        std::accumulate(tally[g].pairs.begin(), tally[g].pairs.end(), 0.0) / n_reps;
    const double mean_refs =
        std::accumulate(tally[g].refs.begin(), tally[g].refs.end(), 0.0) / n_reps;
    if (mean_refs == 0.0 || mean_count == 0.0) {
      throw NumericError("estimate_pair_correlation: no reference points at r = " +
                         std::to_string(r_grid[g]));
    }
    // Ratio of means: E[pairs] = lambda^2 V(inner) hbar shell,
    // E[refs] = lambda V(inner), E[count] = lambda V(R).
    const double h = mean_pairs * window / (mean_refs * mean_count * shell);
    out.h[g] = h;
    if (reps < 2) {
      out.stderr_h[g] = 0.0;
      continue;
    }
    // Delta method on log h: z_k = pairs_k/E[pairs] - refs_k/E[refs] - count_k/E[count].
    std::vector<double> z(reps);
    for (std::size_t k = 0; k < reps; ++k) {
      const double a = mean_pairs > 0.0 ? tally[g].pairs[k] / mean_pairs : 0.0;
      z[k] = a - tally[g].refs[k] / mean_refs - counts[k] / mean_count;
    }
    const double zbar = std::accumulate(z.begin(), z.end(), 0.0) / n_reps;
    double ss = 0.0;
    for (double v : z) ss += (v - zbar) * (v - zbar);
    out.stderr_h[g] = std::abs(h) * std::sqrt(ss / (n_reps - 1.0) / n_reps);
  }
  return out;
}

}  // namespace fuseloc
