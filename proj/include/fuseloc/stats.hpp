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

#include <cstddef>
#include <span>
#include <vector>

namespace fuseloc {

// Sample mean with its standard error.
struct Summary {
  double mean = 0.0;
  double stderr_mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  std::size_t count = 0;
};

// Compensated (Neumaier) sum over a value-sorted copy, so the result does not
// depend on the order in which replicas were produced.
double stable_sum(std::span<const double> values);

Summary summarize(std::span<const double> values);

// Sample covariance of the means of two paired samples, cov(x̄, ȳ).
double covariance_of_means(std::span<const double> x, std::span<const double> y);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Asymptotic critical value c(alpha) * sqrt((n + m) / (n m)).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

}  // namespace fuseloc
