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

#include "fuseloc/pointproc.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fuseloc/error.hpp"
#include "fuseloc/geometry.hpp"
#include "neighbor_grid.hpp"

namespace fuseloc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

void require_window(double radius, int d) {
  if (d < 2) throw UnsupportedDimension("need d >= 2, got " + std::to_string(d));
  require_positive(radius, "window radius");
}

// Poisson number of uniform points in B_0(radius), appended row-major.
std::vector<double> poisson_ball(double intensity, double radius, int d, Rng& rng) {
  const double mean = intensity * ball_volume(d, radius);
  const auto n = static_cast<std::size_t>(std::poisson_distribution<long long>(mean)(rng));
  std::vector<double> coords(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    uniform_in_ball(radius, rng,
                    std::span<double>(coords).subspan(i * static_cast<std::size_t>(d),
                                                      static_cast<std::size_t>(d)));
  }
  return coords;
}

double squared_norm(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return s;
}

}  // namespace

std::string model_tag(const ProcessModel& model) {
  return std::visit(Overloaded{
                        [](const Ppp&) { return std::string("ppp"); },
                        [](const MaternI&) { return std::string("matern1"); },
                        [](const MaternII&) { return std::string("matern2"); },
                        [](const MaternCluster&) { return std::string("mcp"); },
                        [](const ThomasCluster&) { return std::string("tcp"); },
                        [](const AlphaGinibre&) { return std::string("ginibre"); },
                    },
                    model);
}

void validate(const ProcessModel& model, int d) {
  if (d < 2) throw UnsupportedDimension("need d >= 2, got " + std::to_string(d));
  std::visit(Overloaded{
                 [](const Ppp& m) { require_positive(m.intensity, "lambda"); },
                 [](const MaternI& m) {
                   require_positive(m.parent_intensity, "lambda_p");
                   require_positive(m.hardcore_radius, "rc");
                 },
                 [](const MaternII& m) {
                   require_positive(m.parent_intensity, "lambda_p");
                   require_positive(m.hardcore_radius, "rc");
                 },
                 [](const MaternCluster& m) {
                   require_positive(m.parent_intensity, "lambda_p");
                   require_positive(m.mean_cluster_size, "cbar");
                   require_positive(m.cluster_radius, "rc");
                 },
                 [](const ThomasCluster& m) {
                   require_positive(m.parent_intensity, "lambda_p");
                   require_positive(m.mean_cluster_size, "cbar");
                   require_positive(m.scatter_sd, "sigma_c");
                 },
                 [d](const AlphaGinibre& m) {
                   if (d != 2) {
                     throw UnsupportedDimension("alpha-Ginibre is planar, got d=" +
                                                std::to_string(d));
                   }
                   require_positive(m.intensity, "lambda");
                   if (!(m.alpha > 0.0 && m.alpha <= 1.0)) {
                     throw InvalidArgument("alpha must lie in (0, 1]");
                   }
                 },
             },
             model);
}

PointPattern::PointPattern(int dim, double window_radius, ProcessModel model)
    : dim_(dim), window_radius_(window_radius), model_(std::move(model)) {
  require_window(window_radius, dim);
}

void PointPattern::push_back(std::span<const double> p) {
  if (p.size() != static_cast<std::size_t>(dim_)) {
    throw InvalidArgument("PointPattern: point dimension mismatch");
  }
  for (double x : p) {
    if (!std::isfinite(x)) throw InvalidArgument("PointPattern: non-finite coordinate");
  }
  if (euclidean_norm(p) > window_radius_) {
    throw InvalidArgument("PointPattern: point outside the observation window");
  }
  coords_.insert(coords_.end(), p.begin(), p.end());
}

double PointPattern::min_pairwise_distance() const {
  const std::size_t n = size();
  double best2 = std::numeric_limits<double>::infinity();
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = coords_[i * d + k] - coords_[j * d + k];
        s += diff * diff;
      }
      best2 = std::min(best2, s);
    }
  }
  return std::sqrt(best2);
}

PointPattern sample_ppp(double intensity, double radius, int d, Rng& rng) {
  PointPattern out(d, radius, Ppp{intensity});
  require_positive(intensity, "lambda");
  const std::vector<double> coords = poisson_ball(intensity, radius, d, rng);
  const std::size_t n = coords.size() / static_cast<std::size_t>(d);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::span<const double>(coords).subspan(i * d, d));
  }
  return out;
}

PointPattern sample_ppp_conditional(std::size_t n, double radius, int d, Rng& rng) {
  if (n == 0) throw InvalidArgument("sample_ppp_conditional: n must be >= 1");
  PointPattern out(d, radius, Ppp{static_cast<double>(n) / ball_volume(d, radius)});
  out.reserve(n);
  std::vector<double> p(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    uniform_in_ball(radius, rng, p);
    out.push_back(p);
  }
  return out;
}

namespace {

enum class HardcoreRule { type_i, type_ii };

PointPattern sample_hardcore(HardcoreRule rule, double parent_intensity, double rc,
                             double radius, int d, Rng& rng) {
  require_positive(parent_intensity, "lambda_p");
  require_positive(rc, "rc");
  ProcessModel model = rule == HardcoreRule::type_i
                           ? ProcessModel{MaternI{parent_intensity, rc}}
                           : ProcessModel{MaternII{parent_intensity, rc}};
  PointPattern out(d, radius, model);

  const double outer = radius + rc;
  const std::vector<double> parents = poisson_ball(parent_intensity, outer, d, rng);
  const auto dd = static_cast<std::size_t>(d);
  const std::size_t n = parents.size() / dd;
  std::vector<double> age;
  if (rule == HardcoreRule::type_ii) {
    age.resize(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& a : age) a = unit(rng);
  }

  detail::NeighborGrid grid(parents, d, outer, rc);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> p(parents.data() + i * dd, dd);
    if (squared_norm(p) > r2) continue;
    bool keep = true;
    grid.for_each_neighbor(i, [&](std::size_t j, double) {
      if (!keep) return;
      if (rule == HardcoreRule::type_i) {
        keep = false;
      } else if (age[j] < age[i] || (age[j] == age[i] && j < i)) {
        keep = false;
      }
    });
    if (keep) out.push_back(p);
  }
  return out;
}

template <class Scatter>
PointPattern sample_neyman_scott(ProcessModel model, double parent_intensity,
                                 double mean_cluster_size, double buffer, double radius, int d,
                                 Rng& rng, Scatter scatter) {
  PointPattern out(d, radius, std::move(model));
  const std::vector<double> parents = poisson_ball(parent_intensity, radius + buffer, d, rng);
  const auto dd = static_cast<std::size_t>(d);
  const std::size_t n = parents.size() / dd;
  std::poisson_distribution<long long> cluster_size(mean_cluster_size);
  std::vector<double> y(dd);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> parent(parents.data() + i * dd, dd);
    const long long k = cluster_size(rng);
    for (long long m = 0; m < k; ++m) {
      scatter(parent, y);
      if (squared_norm(y) <= r2) out.push_back(y);
    }
  }
  return out;
}

}  // namespace

PointPattern sample_matern_i(double parent_intensity, double hardcore_radius, double radius, int d,
                             Rng& rng) {
  return sample_hardcore(HardcoreRule::type_i, parent_intensity, hardcore_radius, radius, d, rng);
}

PointPattern sample_matern_ii(double parent_intensity, double hardcore_radius, double radius,
                              int d, Rng& rng) {
  return sample_hardcore(HardcoreRule::type_ii, parent_intensity, hardcore_radius, radius, d, rng);
}

PointPattern sample_matern_cluster(double parent_intensity, double mean_cluster_size,
                                   double cluster_radius, double radius, int d, Rng& rng) {
  const MaternCluster model{parent_intensity, mean_cluster_size, cluster_radius};
  validate(model, d);
  return sample_neyman_scott(model, parent_intensity, mean_cluster_size, cluster_radius, radius, d,
                             rng, [&](std::span<const double> parent, std::span<double> y) {
                               uniform_in_ball(cluster_radius, rng, y, parent);
                             });
}

PointPattern sample_thomas(double parent_intensity, double mean_cluster_size, double scatter_sd,
                           double radius, int d, Rng& rng) {
  const ThomasCluster model{parent_intensity, mean_cluster_size, scatter_sd};
  validate(model, d);
  std::normal_distribution<double> normal(0.0, scatter_sd);
  // 6 sigma buffer: daughters of parents further out reach the window with
  // probability below 1e-8.
  return sample_neyman_scott(model, parent_intensity, mean_cluster_size, 6.0 * scatter_sd, radius,
                             d, rng, [&](std::span<const double> parent, std::span<double> y) {
                               for (std::size_t k = 0; k < y.size(); ++k) {
                                 y[k] = parent[k] + normal(rng);
                               }
                             });
}

std::size_t ginibre_truncation(double alpha, double intensity, double radius) {
  require_positive(intensity, "lambda");
  require_positive(radius, "window radius");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  constexpr double kTail = 1e-8;
  // In units of the Gamma scale alpha/(pi lambda), R^2 becomes mu.
  const double mu = std::numbers::pi * intensity * radius * radius / alpha;
  auto tail_ok = [&](std::size_t m) {
    return boost::math::gamma_p(static_cast<double>(m + 1), mu) < kTail;
  };
  auto hi = static_cast<std::size_t>(std::ceil(mu + 10.0 * std::sqrt(mu)));
  while (!tail_ok(hi)) hi = hi * 2 + 1;
  std::size_t lo = 0;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (tail_ok(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::max<std::size_t>(lo, 1);
}

PointPattern sample_alpha_ginibre(double alpha, double intensity, double radius, Rng& rng,
                                  GinibreMethod method) {
  const AlphaGinibre model{alpha, intensity};
  validate(model, 2);
  PointPattern out(2, radius, model);
  const std::size_t m = ginibre_truncation(alpha, intensity, radius);
  const double scale2 = alpha / (std::numbers::pi * intensity);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r2 = radius * radius;
  double p[2];

  if (method == GinibreMethod::kostlan) {
    for (std::size_t i = 1; i <= m; ++i) {
      const double mod2 = std::gamma_distribution<double>(static_cast<double>(i), scale2)(rng);
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const bool retained = unit(rng) < alpha;
      if (!retained || mod2 > r2) continue;
      const double mod = std::sqrt(mod2);
      p[0] = mod * std::cos(angle);
      p[1] = mod * std::sin(angle);
      out.push_back(p);
    }
    return out;
  }

  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXcd g(n, n);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = {re, im};
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(g, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sample_alpha_ginibre: eigenvalue iteration did not converge");
  }
  const double scale = std::sqrt(scale2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> z = solver.eigenvalues()[i] * scale;
    const bool retained = unit(rng) < alpha;
    if (!retained || std::norm(z) > r2) continue;
    p[0] = z.real();
    p[1] = z.imag();
    out.push_back(p);
  }
  return out;
}

PointPattern sample_pattern(const ProcessModel& model, double radius, int d, Rng& rng,
                            GinibreMethod ginibre_method) {
  validate(model, d);
  return std::visit(
      Overloaded{
          [&](const Ppp& m) { return sample_ppp(m.intensity, radius, d, rng); },
          [&](const MaternI& m) {
            return sample_matern_i(m.parent_intensity, m.hardcore_radius, radius, d, rng);
          },
          [&](const MaternII& m) {
            return sample_matern_ii(m.parent_intensity, m.hardcore_radius, radius, d, rng);
          },
          [&](const MaternCluster& m) {
            return sample_matern_cluster(m.parent_intensity, m.mean_cluster_size,
                                         m.cluster_radius, radius, d, rng);
          },
          [&](const ThomasCluster& m) {
            return sample_thomas(m.parent_intensity, m.mean_cluster_size, m.scatter_sd, radius, d,
                                 rng);
          },
          [&](const AlphaGinibre& m) {
            return sample_alpha_ginibre(m.alpha, m.intensity, radius, rng, ginibre_method);
          },
      },
      model);
}

double effective_intensity(const ProcessModel& model, int d) {
  validate(model, d);
  return std::visit(
      Overloaded{
          [](const Ppp& m) { return m.intensity; },
          [d](const MaternI& m) {
            const double v = ball_volume(d, m.hardcore_radius);
            return m.parent_intensity * std::exp(-m.parent_intensity * v);
          },
          [d](const MaternII& m) {
            const double v = ball_volume(d, m.hardcore_radius);
            return -std::expm1(-m.parent_intensity * v) / v;
          },
          [](const MaternCluster& m) { return m.parent_intensity * m.mean_cluster_size; },
          [](const ThomasCluster& m) { return m.parent_intensity * m.mean_cluster_size; },
          [](const AlphaGinibre& m) { return m.intensity; },
      },
      model);
}

double match_matern_ii_parent(double target_intensity, double hardcore_radius, int d) {
  require_positive(target_intensity, "target lambda");
  require_positive(hardcore_radius, "rc");
  const double v = ball_volume(d, hardcore_radius);
  if (target_intensity * v >= 1.0) {
    throw InfeasibleDensity("Matern II intensity saturates at 1/V_d(rc) = " +
                            std::to_string(1.0 / v) + "; target " +
                            std::to_string(target_intensity) + " is infeasible");
  }
  return -std::log1p(-target_intensity * v) / v;
}

double match_matern_i_parent(double target_intensity, double hardcore_radius, int d) {
  require_positive(target_intensity, "target lambda");
  require_positive(hardcore_radius, "rc");
  const double v = ball_volume(d, hardcore_radius);
  // lambda_p e^{-lambda_p v} peaks at lambda_p = 1/v.
  const double peak = 1.0 / (std::numbers::e * v);
  if (target_intensity > peak) {
    throw InfeasibleDensity("Matern I intensity peaks at 1/(e V_d(rc)) = " +
                            std::to_string(peak) + "; target " +
                            std::to_string(target_intensity) + " is infeasible");
  }
  double lo = 0.0;
  double hi = 1.0 / v;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(-mid * v) < target_intensity) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ProcessModel with_intensity(const ProcessModel& family, double target, int d) {
  require_positive(target, "target lambda");
  return std::visit(
      Overloaded{
          [&](const Ppp&) -> ProcessModel { return Ppp{target}; },
          [&](const MaternI& m) -> ProcessModel {
            return MaternI{match_matern_i_parent(target, m.hardcore_radius, d), m.hardcore_radius};
          },
          [&](const MaternII& m) -> ProcessModel {
            return MaternII{match_matern_ii_parent(target, m.hardcore_radius, d),
                            m.hardcore_radius};
          },
          [&](const MaternCluster& m) -> ProcessModel {
            return MaternCluster{m.parent_intensity, target / m.parent_intensity,
                                 m.cluster_radius};
          },
          [&](const ThomasCluster& m) -> ProcessModel {
            return ThomasCluster{m.parent_intensity, target / m.parent_intensity, m.scatter_sd};
          },
          [&](const AlphaGinibre& m) -> ProcessModel { return AlphaGinibre{m.alpha, target}; },
      },
      family);
}

double pair_correlation(const ProcessModel& model, int d, double r) {
  validate(model, d);
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("pair_correlation: need r >= 0");
  return std::visit(
      Overloaded{
          [](const Ppp&) { return 1.0; },
          [&](const MaternI& m) {
            const double rc = m.hardcore_radius;
            if (r <= rc) return 0.0;
            if (r >= 2.0 * rc) return 1.0;
            return std::exp(m.parent_intensity * lens_volume(d, rc, r));
          },
          [&](const MaternII& m) {
            const double rc = m.hardcore_radius;
            if (r <= rc) return 0.0;
            if (r >= 2.0 * rc) return 1.0;
            const double v = ball_volume(d, rc);
            const double vu = union_volume(d, rc, r);
            const double lp = m.parent_intensity;
            const double lam = -std::expm1(-lp * v) / v;
            const double num = 2.0 * vu * (-std::expm1(-lp * v)) - 2.0 * v * (-std::expm1(-lp * vu));
            return num / (lam * lam * v * vu * (vu - v));
          },
          [&](const MaternCluster& m) {
            const double v = ball_volume(d, m.cluster_radius);
            return 1.0 + lens_volume(d, m.cluster_radius, r) / (m.parent_intensity * v * v);
          },
          [&](const ThomasCluster& m) {
            const double s2 = m.scatter_sd * m.scatter_sd;
            const double norm =
                m.parent_intensity * std::pow(4.0 * std::numbers::pi * s2, 0.5 * d);
            return 1.0 + std::exp(-r * r / (4.0 * s2)) / norm;
          },
          [&](const AlphaGinibre& m) {
            return -std::expm1(-std::numbers::pi * m.intensity * r * r / m.alpha);
          },
      },
      model);
}

namespace {

// Points where h is discontinuous or changes formula, plus the end of its
// interaction range (inf when h - 1 never vanishes identically).
struct Support {
  std::vector<double> breaks;
  double end;
};

Support support_of(const ProcessModel& model) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{
                        [](const Ppp&) { return Support{{}, 0.0}; },
                        [](const MaternI& m) {
                          return Support{{m.hardcore_radius}, 2.0 * m.hardcore_radius};
                        },
                        [](const MaternII& m) {
                          return Support{{m.hardcore_radius}, 2.0 * m.hardcore_radius};
                        },
                        [](const MaternCluster& m) {
                          return Support{{}, 2.0 * m.cluster_radius};
                        },
                        [](const ThomasCluster&) { return Support{{}, inf}; },
                        [](const AlphaGinibre&) { return Support{{}, inf}; },
                    },
                    model);
}

template <class F>
double integrate_checked(F f, double a, double b, const char* what) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  double l1 = 0.0;
  // Requested tolerances near round-off make the summed error estimate grow
  // with depth, so ask for 1e-10 and reject anything worse than 1e-8.
  const double value = gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-10, &error, &l1);
  if (!std::isfinite(value) || error > 1e-8 * std::max(l1, 1e-300)) {
    throw NumericError(fmt::format("{}: quadrature did not converge on [{}, {}], value={} error estimate={} L1={}",
                                   what, a, b, value, error, l1));
  }
  return value;
}

// Integrates f over [lo, hi] split at the given break points.
template <class F>
double integrate_pieces(F f, double lo, double hi, const std::vector<double>& breaks,
                        const char* what) {
  double total = 0.0;
  double a = lo;
  for (double b : breaks) {
    if (b <= a || b >= hi) continue;
    total += integrate_checked(f, a, b, what);
    a = b;
  }
  if (hi > a) total += integrate_checked(f, a, hi, what);
  return total;
}

}  // namespace

double srd_integral(const ProcessModel& model, int d) {
  validate(model, d);
  const Support sup = support_of(model);
  if (sup.end == 0.0) return 0.0;
  auto integrand = [&](double r) {
    return std::abs(pair_correlation(model, d, r) - 1.0) * std::pow(r, d - 1);
  };
  return integrate_pieces(integrand, 0.0, sup.end, sup.breaks, "srd_integral");
}

double ring_average_pair_correlation(const ProcessModel& model, int d, double lo, double hi) {
  if (!(lo >= 0.0 && hi > lo)) throw InvalidArgument("ring average needs 0 <= lo < hi");
  Support sup = support_of(model);
  if (std::isfinite(sup.end)) sup.breaks.push_back(sup.end);
  auto weighted = [&](double r) { return pair_correlation(model, d, r) * std::pow(r, d - 1); };
  const double num = integrate_pieces(weighted, lo, hi, sup.breaks, "ring average");
  const double den = (std::pow(hi, d) - std::pow(lo, d)) / static_cast<double>(d);
  return num / den;
}

}  // namespace fuseloc
