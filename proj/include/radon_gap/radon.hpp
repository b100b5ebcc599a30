#pragma once

// Second-order Radon-domain total variation (RTV^2) of Gaussian kernel
// machines in odd dimension d.
//
// For f = sum_i alpha_i k(x_i, .) with M_eff = L^T L,
//
//   RTV^2(f) = 1 / (|det L| sqrt(2 pi)) int_{S^{d-1}} I(beta) / s(beta)^{d+1} dbeta,
//   I(beta)  = int_R | sum_i alpha_i He_{d+1}(y + D_i) e^{-(y + D_i)^2/2} | dy,
//
// where s(beta) = ||L^{-T} beta|| and D_i = (x_1 - x_i)^T beta / s(beta).
// The inner integral is computed by adaptive Gauss-Kronrod quadrature on
// panels split at the sign changes of the mixture, with an exact Gaussian tail
// certificate; the sphere integral by an exact rule (d = 1), a product rule
// (d = 3) or seeded Monte Carlo (d >= 5).

#include "radon_gap/geometry.hpp"
#include "radon_gap/hermite.hpp"
#include "radon_gap/kernel.hpp"
#include "radon_gap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace radon_gap {

enum class SphereRuleKind { exact_s0, product, monte_carlo };

struct SphereRule {
  int dim = 1;
  std::vector<Vector> nodes;
  std::vector<double> weights;
  SphereRuleKind kind = SphereRuleKind::exact_s0;
  int resolution = 0;
  std::uint64_t seed = 0;
};

/// Quadrature on S^{d-1}, d odd.
///   d = 1: nodes {-1, +1}, unit weights (exact).
///   d = 3: Gauss-Legendre in cos(polar angle) with `resolution` nodes times
///          2 * resolution equispaced azimuths.
///   d >= 5: `resolution` uniform samples (normalized Gaussians) from a
///          mt19937_64 seeded with `seed`, weights |S^{d-1}| / N.
inline SphereRule sphere_rule(int d, int resolution, std::uint64_t seed = 0) {
  detail::require_odd_dimension(d, "sphere_rule");
  SphereRule rule;
  rule.dim = d;
  rule.seed = seed;
  rule.resolution = resolution;
  if (d == 1) {
    rule.kind = SphereRuleKind::exact_s0;
    rule.nodes = {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
    rule.weights = {1.0, 1.0};
    return rule;
  }
  if (resolution < 1) throw std::invalid_argument("sphere_rule: resolution must be >= 1");
  if (d == 3) {
    rule.kind = SphereRuleKind::product;
    const auto polar = gauss_legendre(static_cast<std::size_t>(resolution));
    const int n_azimuth = 2 * resolution;
    const double az_weight = 2.0 * std::numbers::pi / n_azimuth;
    for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
      const double z = polar.nodes[i];
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int j = 0; j < n_azimuth; ++j) {
        const double phi = 2.0 * std::numbers::pi * (j + 0.5) / n_azimuth;
        Vector b(3);
        b << r * std::cos(phi), r * std::sin(phi), z;
        rule.nodes.push_back(b);
        rule.weights.push_back(polar.weights[i] * az_weight);
      }
    }
    return rule;
  }
  rule.kind = SphereRuleKind::monte_carlo;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double w = sphere_measure(d) / resolution;
  for (int k = 0; k < resolution; ++k) {
    Vector b(d);
    do {
      for (int i = 0; i < d; ++i) b(i) = normal(rng);
    } while (b.norm() == 0.0);
    rule.nodes.push_back(b.normalized());
    rule.weights.push_back(w);
  }
  return rule;
}

inline double sigma_beta(const MahalanobisMetric& metric, const Vector& beta) {
  return metric.sigma_beta(beta);
}

/// D_i = (x_1^T beta - x_i^T beta) / ||L^{-T} beta||, D_1 = 0 exactly.
inline std::vector<double> deltas(const KernelMachine& f, const Vector& beta) {
  f.metric().check_dim(beta);
  const double s = f.metric().sigma_beta(beta);
  const double a1 = f.centers().front().dot(beta);
  std::vector<double> out(f.size());
  out[0] = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = (a1 - f.centers()[i].dot(beta)) / s;
  return out;
}

struct IntegralEstimate {
  double value = 0.0;
  double error_bound = 0.0;
};

namespace detail {

// Beyond |u| = 40 the Gaussian factor underflows in double precision.
inline constexpr double kGaussianCutoff = 40.0;

// sum_i a_i He_m(y - p_i) e^{-(y - p_i)^2/2} with terms sorted by position p.
class HermiteMixture {
 public:
  HermiteMixture(unsigned order, const std::vector<double>& positions,
                 const std::vector<double>& coeffs)
      : order_(order) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < positions.size(); ++i)
      if (coeffs[i] != 0.0) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
    for (auto i : idx) {
      pos_.push_back(positions[i]);
      coeff_.push_back(coeffs[i]);
    }
  }

  bool empty() const { return pos_.empty(); }
  double lo() const { return pos_.front(); }
  double hi() const { return pos_.back(); }
  double abs_coeff_sum() const {
    double s = 0.0;
    for (double a : coeff_) s += std::abs(a);
    return s;
  }

  double operator()(double y) const {
    auto first = std::lower_bound(pos_.begin(), pos_.end(), y - kGaussianCutoff);
    auto last = std::upper_bound(first, pos_.end(), y + kGaussianCutoff);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) {
      const auto k = static_cast<std::size_t>(it - pos_.begin());
      sum += coeff_[k] * weighted_hermite(order_, y - *it);
    }
    return sum;
  }

 private:
  unsigned order_;
  std::vector<double> pos_;
  std::vector<double> coeff_;
};

// Partition [a, b] on a unit-spaced grid (scaled by `unit`) refined at the
// sign changes of g found by sampling at spacing `sample`.
template <class G>
std::vector<double> sign_split_partition(const G& g, double a, double b, double unit,
                                         double sample) {
  std::vector<double> pts;
  const auto cells = static_cast<std::size_t>(std::ceil((b - a) / unit));
  for (std::size_t i = 0; i <= cells; ++i)
    pts.push_back(i == cells ? b : a + unit * static_cast<double>(i));
  for (double r : bracket_sign_changes(g, a, b, sample)) pts.push_back(r);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

inline int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RADON_GAP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

}  // namespace detail

/// int_R |sum_i a_i He_{d+1}(y + D_i) e^{-(y+D_i)^2/2}| dy for the given
/// shifts, any order m = d + 1 >= 1. The window extends R beyond the extreme
/// centers, where R exceeds the largest root of He_m and the exact tail
/// 2 |He_{m-1}(R)| e^{-R^2/2} sum |a_i| is below tol/2.
inline IntegralEstimate inner_integral_shifts(unsigned order, const std::vector<double>& shifts,
                                              const std::vector<double>& coeffs, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("inner_integral: tol must be > 0");
  if (order == 0) throw std::invalid_argument("inner_integral: order must be >= 1");
  std::vector<double> positions(shifts.size());
  for (std::size_t i = 0; i < shifts.size(); ++i) positions[i] = -shifts[i];
  const detail::HermiteMixture mix(order, positions, coeffs);
  if (mix.empty()) return {};

  const double mass = mix.abs_coeff_sum();
  double radius = std::max(hermite_roots(order).back(), 1.0) + 0.25;
  auto tail = [&](double r) { return 2.0 * mass * std::abs(weighted_hermite(order - 1, r)); };
  while (tail(radius) >= 0.5 * tol) radius += 0.25;

  const double a = mix.lo() - radius;
  const double b = mix.hi() + radius;
  auto integrand = [&mix](double y) { return std::abs(mix(y)); };
  const auto partition = detail::sign_split_partition(mix, a, b, 1.0, 0.05);
  const auto q = integrate_adaptive(integrand, partition, 0.5 * tol);
  return {q.value, q.error + tail(radius)};
}

inline IntegralEstimate inner_integral(const KernelMachine& f, const Vector& beta, double tol) {
  detail::require_odd_dimension(f.dim(), "inner_integral");
  return inner_integral_shifts(static_cast<unsigned>(f.dim()) + 1, deltas(f, beta), f.coeffs(),
                               tol);
}

enum class Normalization { paper, unit_amplitude };

/// Multiplier applied on top of the verbatim formula: 1 for `paper`,
/// (2 pi)^{d/2} for `unit_amplitude`.
inline double normalization_factor(Normalization n, int d) {
  return n == Normalization::paper ? 1.0
                                   : std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d));
}

struct RtvEstimate {
  double value = 0.0;
  double quadrature_error = 0.0;
  std::size_t n_nodes = 0;
  Normalization normalization = Normalization::paper;
  double inner_error = 0.0;   // part of quadrature_error from the inner integrals
  double sphere_error = 0.0;  // part from the sphere rule
};

struct RtvOptions {
  int threads = 0;  // 0: RADON_GAP_THREADS or 1
  bool estimate_sphere_error = true;
};

namespace detail {

struct NodeTerms {
  std::vector<double> value;  // w_k I_k / s_k^{d+1}
  std::vector<double> error;
  std::vector<double> sample; // I_k / s_k^{d+1}
};

inline NodeTerms evaluate_nodes(const KernelMachine& f, const SphereRule& rule, double tol,
                                int threads) {
  const std::size_t n = rule.nodes.size();
  NodeTerms t{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  const double power = static_cast<double>(f.dim() + 1);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double s = f.metric().sigma_beta(rule.nodes[k]);
      const auto inner = inner_integral(f, rule.nodes[k], tol);
      const double scale = std::pow(s, -power);
      t.sample[k] = inner.value * scale;
      t.value[k] = rule.weights[k] * t.sample[k];
      t.error[k] = rule.weights[k] * inner.error_bound * scale;
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(threads, static_cast<int>(n))));
  if (workers <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }
  return t;
}

inline double ordered_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace detail

/// RTV^2 of f on the given sphere rule. quadrature_error combines the
/// certified inner-integral bounds with a sphere-rule estimate: zero for the
/// exact S^0 rule, |Q_r - Q_{r/2}| for the product rule, and three standard
/// errors for Monte Carlo. Node sums are accumulated in node order.
inline RtvEstimate rtv2(const KernelMachine& f, const SphereRule& rule, double tol,
                        Normalization normalization = Normalization::paper,
                        const RtvOptions& options = {}) {
  const int d = f.dim();
  detail::require_odd_dimension(d, "rtv2");
  if (rule.dim != d)
    throw std::invalid_argument("rtv2: machine dimension " + std::to_string(d) +
                                " does not match sphere rule dimension " +
                                std::to_string(rule.dim));
  if (!(tol > 0.0)) throw std::invalid_argument("rtv2: tol must be > 0");

  const int threads = detail::thread_count(options.threads);
  const double prefactor = normalization_factor(normalization, d) /
                           (f.metric().det_factor() * kSqrtTwoPi);
  const auto terms = detail::evaluate_nodes(f, rule, tol, threads);

  RtvEstimate est;
  est.normalization = normalization;
  est.n_nodes = rule.nodes.size();
  const double q = detail::ordered_sum(terms.value);
  est.value = prefactor * q;
  est.inner_error = prefactor * detail::ordered_sum(terms.error);

  if (options.estimate_sphere_error) {
    if (rule.kind == SphereRuleKind::product && rule.resolution >= 2) {
      const auto coarse = sphere_rule(d, rule.resolution / 2, rule.seed);
      const auto coarse_terms = detail::evaluate_nodes(f, coarse, tol, threads);
      est.sphere_error = prefactor * std::abs(q - detail::ordered_sum(coarse_terms.value));
      est.inner_error += prefactor * detail::ordered_sum(coarse_terms.error);
    } else if (rule.kind == SphereRuleKind::monte_carlo && rule.nodes.size() >= 2) {
      const double measure = sphere_measure(d);
      const double n = static_cast<double>(rule.nodes.size());
      double mean = 0.0;
      for (double s : terms.sample) mean += s;
      mean /= n;
      double var = 0.0;
      for (double s : terms.sample) var += (s - mean) * (s - mean);
      var /= (n - 1.0);
      est.sphere_error = 3.0 * prefactor * measure * std::sqrt(var / n);
    }
  }
  est.quadrature_error = est.inner_error + est.sphere_error;
  return est;
}

/// int_{S^{d-1}} ||L^{-T} beta||^{-(d+1)} dbeta: exact for d = 1 and for
/// isotropic M_eff = m I (m^{(d+1)/2} |S^{d-1}|); a 96-node product rule for
/// anisotropic d = 3; 2^20 seeded Monte Carlo samples otherwise.
inline double sphere_moment(const MahalanobisMetric& metric) {
  const int d = metric.dim();
  detail::require_odd_dimension(d, "sphere_moment");
  const double power = static_cast<double>(d + 1);
  const Matrix& m = metric.effective();
  if (d == 1) return 2.0 * m(0, 0);
  const Matrix iso = m(0, 0) * Matrix::Identity(d, d);
  if (m == iso) return std::pow(m(0, 0), 0.5 * power) * sphere_measure(d);
  const auto rule = d == 3 ? sphere_rule(3, 96) : sphere_rule(d, 1 << 20, 0x5eed);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    s += rule.weights[k] * std::pow(metric.sigma_beta(rule.nodes[k]), -power);
  return s;
}

/// Closed form for a single unit-coefficient center:
///   C_d / (|det L| sqrt(2 pi)) int_{S^{d-1}} ||L^{-T} beta||^{-(d+1)} dbeta.
inline double rtv2_single_center(const MahalanobisMetric& metric,
                                 Normalization normalization = Normalization::paper) {
  const int d = metric.dim();
  detail::require_odd_dimension(d, "rtv2_single_center");
  return normalization_factor(normalization, d) * cd_constant(d).value * sphere_moment(metric) /
         (metric.det_factor() * kSqrtTwoPi);
}

/// int_R |f''(t)| dt for a one-dimensional machine, from the Gaussian second
/// derivative f_i''(t) = m (m s^2 - 1) e^{-m s^2/2}, s = t - x_i, m = M_eff.
/// Outside the window each term contributes at most 2 |a_i| m R e^{-m R^2/2}.
inline IntegralEstimate rtv2_direct_1d(const KernelMachine& f, double tol) {
  if (f.dim() != 1) throw std::invalid_argument("rtv2_direct_1d: requires d = 1");
  if (!(tol > 0.0)) throw std::invalid_argument("rtv2_direct_1d: tol must be > 0");
  const double m = f.metric().effective()(0, 0);
  const double scale = 1.0 / std::sqrt(m);

  std::vector<double> xs;
  std::vector<double> as;
  double mass = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.coeffs()[i] == 0.0) continue;
    xs.push_back(f.centers()[i](0));
    as.push_back(f.coeffs()[i]);
    mass += std::abs(f.coeffs()[i]);
  }
  if (xs.empty()) return {};

  auto second_derivative = [&](double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double s = t - xs[i];
      const double q = m * s * s;
      if (q > 1600.0) continue;
      sum += as[i] * m * (q - 1.0) * std::exp(-0.5 * q);
    }
    return sum;
  };
  double radius = 2.0 * scale;
  auto tail = [&](double r) { return 2.0 * mass * m * r * std::exp(-0.5 * m * r * r); };
  while (tail(radius) >= 0.5 * tol) radius += 0.25 * scale;

  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double a = *lo - radius;
  const double b = *hi + radius;
  const auto partition =
      detail::sign_split_partition(second_derivative, a, b, scale, 0.05 * scale);
  const auto q = integrate_adaptive([&](double t) { return std::abs(second_derivative(t)); },
                                    partition, 0.5 * tol);
  return {q.value, q.error + tail(radius)};
}

}  // namespace radon_gap
