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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fuseloc::detail {

// Uniform cell list over the cube [-extent, extent]^d with cells at least
// `radius` wide, so all neighbours within `radius` sit in the 3^d block
// around a point's cell.
class NeighborGrid {
 public:
  NeighborGrid(std::span<const double> coords, int d, double extent, double radius)
      : coords_(coords), d_(static_cast<std::size_t>(d)), extent_(extent), radius2_(radius * radius) {
    const std::size_t n = coords.size() / d_;
    if (d_ > kMaxGridDim) {
      // Single cell: queries degrade to a linear scan.
      cells_per_dim_ = 1;
      cell_width_ = 2.0 * extent;
      start_ = {0, n};
      cell_of_.assign(n, 0);
      members_.resize(n);
      for (std::size_t i = 0; i < n; ++i) members_[i] = i;
      return;
    }
    const double max_cells = 4.0 * static_cast<double>(n) + 64.0;
    double per_dim = std::max(1.0, std::floor(2.0 * extent / radius));
    per_dim = std::min(per_dim, std::max(1.0, std::floor(std::pow(max_cells, 1.0 / static_cast<double>(d_)))));
    cells_per_dim_ = static_cast<std::size_t>(per_dim);
    cell_width_ = 2.0 * extent / per_dim;

    std::size_t total = 1;
    for (std::size_t k = 0; k < d_; ++k) total *= cells_per_dim_;
    start_.assign(total + 1, 0);
    cell_of_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      cell_of_[i] = linear_cell(coords.subspan(i * d_, d_));
      ++start_[cell_of_[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
    members_.resize(n);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) members_[fill[cell_of_[i]]++] = i;
  }

  // fn(j, squared_distance) for every stored point j with
  // |p - x_j|^2 <= radius^2 (including p itself if stored).
  template <class Fn>
  void for_each_near(std::span<const double> p, Fn&& fn) const {
    if (cells_per_dim_ == 1) {
      scan_cell(0, p, fn);
      return;
    }
    std::array<std::ptrdiff_t, kMaxGridDim> base{};
    for (std::size_t k = 0; k < d_; ++k) base[k] = cell_coord(p[k]);
    std::array<int, kMaxGridDim> offset{};
    std::fill_n(offset.begin(), d_, -1);
    for (;;) {
      bool inside = true;
      std::size_t lin = 0;
      for (std::size_t k = 0; k < d_; ++k) {
        const std::ptrdiff_t c = base[k] + offset[k];
        if (c < 0 || c >= static_cast<std::ptrdiff_t>(cells_per_dim_)) {
          inside = false;
          break;
        }
        lin = lin * cells_per_dim_ + static_cast<std::size_t>(c);
      }
      if (inside) scan_cell(lin, p, fn);
      std::size_t k = 0;
      while (k < d_ && offset[k] == 1) offset[k++] = -1;
      if (k == d_) break;
      ++offset[k];
    }
  }

  template <class Fn>
  void for_each_neighbor(std::size_t i, Fn&& fn) const {
    for_each_near(coords_.subspan(i * d_, d_), [&](std::size_t j, double d2) {
      if (j != i) fn(j, d2);
    });
  }

 private:
  static constexpr std::size_t kMaxGridDim = 8;

  template <class Fn>
  void scan_cell(std::size_t lin, std::span<const double> p, Fn& fn) const {
    for (std::size_t m = start_[lin]; m < start_[lin + 1]; ++m) {
      const std::size_t j = members_[m];
      double d2 = 0.0;
      for (std::size_t k = 0; k < d_; ++k) {
        const double diff = p[k] - coords_[j * d_ + k];
        d2 += diff * diff;
      }
      if (d2 <= radius2_) fn(j, d2);
    }
  }

  std::ptrdiff_t cell_coord(double x) const {
    auto c = static_cast<std::ptrdiff_t>(std::floor((x + extent_) / cell_width_));
    return std::clamp<std::ptrdiff_t>(c, 0, static_cast<std::ptrdiff_t>(cells_per_dim_) - 1);
  }

  std::size_t linear_cell(std::span<const double> p) const {
    std::size_t lin = 0;
    for (std::size_t k = 0; k < d_; ++k) {
      lin = lin * cells_per_dim_ + static_cast<std::size_t>(cell_coord(p[k]));
    }
    return lin;
  }

  std::span<const double> coords_;
  std::size_t d_;
  double extent_;
  double radius2_;
  std::size_t cells_per_dim_ = 1;
  double cell_width_ = 1.0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> cell_of_;
  std::vector<std::size_t> members_;
};

}  // namespace fuseloc::detail
