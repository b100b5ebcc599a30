#pragma once

// Quantitative lower bound on RTV^2 for kernel machines whose centers are
// separated along every direction of a cone, and the parameter recipe that
// certifies it.

#include "radon_gap/geometry.hpp"
#include "radon_gap/hermite.hpp"
#include "radon_gap/kernel.hpp"
#include "radon_gap/radon.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radon_gap {

namespace detail {
inline constexpr double kHalfSqrt3 = 0.86602540378443864676;
inline constexpr double kTailTolerance = 1e-30;
}  // namespace detail

/// Certified sum_{j >= 1} |He_{d+1}(j delta)| e^{-(j delta)^2/2} (value plus
/// remainder bound). Cross-talk between centers |i - j| >= 1 apart starts at j = 1.
inline double nearest_neighbor_tail(int d, double delta) {
  const auto t = tail_sum(d, delta, detail::kTailTolerance, 1);
  return t.value + t.remainder_bound;
}

/// 2 (sum_{j >= 1} |He_{d+1}(j delta)| e^{-(j delta)^2/2}) sum_i |alpha_i|.
inline double theta_bound(std::span<const double> coeffs, int d, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("theta_bound: delta must be > 0");
  const double l1 = l1_norm(coeffs);
  if (l1 == 0.0) return 0.0;
  return 2.0 * nearest_neighbor_tail(d, delta) * l1;
}

struct InnerLowerBound {
  double value = 0.0;
  double floor = 0.0;      // (rho / 2) sum |alpha_i|
  bool certified = false;  // nearest-neighbor tail < rho / 4
};

/// (rho - 2 tail_1) sum |alpha_i|, a lower bound on the inner integral along
/// any direction in which neighboring projections are >= delta apart. With a
/// single center there is no cross-talk and the bound is rho |alpha_1|.
inline InnerLowerBound inner_lower_bound(std::span<const double> coeffs, int d, double rho,
                                         double delta) {
  if (!(rho > 0.0)) throw std::invalid_argument("inner_lower_bound: rho must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("inner_lower_bound: delta must be > 0");
  const double l1 = l1_norm(coeffs);
  const double tail = nearest_neighbor_tail(d, delta);
  InnerLowerBound out;
  out.floor = 0.5 * rho * l1;
  out.certified = coeffs.size() <= 1 || tail < 0.25 * rho;
  const double theta_factor = coeffs.size() <= 1 ? 0.0 : 2.0 * tail;
  out.value = (rho - theta_factor) * l1;
  if (out.certified && out.value < out.floor)
    throw std::logic_error("inner_lower_bound: certified bound fell below rho/2 * l1");
  return out;
}

struct Certification {
  double rho = 0.0;
  double delta_prime = 0.0;
  double delta_zero = 0.0;
  double delta = 0.0;
  double nearest_neighbor_tail = 0.0;  // sum from j = 1 at delta
  bool inner_certified = false;        // nearest_neighbor_tail < rho / 4
};

/// rho = rho_constant(d, eps), delta' = delta_peak(d), delta_0 = delta_zero(d, rho)
/// and delta = 3 max(eps, delta_0, delta'), for eps in (0, 1/2] and eta >= sqrt(3)/2.
inline Certification certify_preconditions(int d, double eps, double eta) {
  detail::require_odd_dimension(d, "certify_preconditions");
  if (!(eps > 0.0 && eps <= 0.5))
    throw std::invalid_argument("certify_preconditions: eps must lie in (0, 1/2]");
  if (!(eta >= detail::kHalfSqrt3 && eta <= 1.0))
    throw std::invalid_argument("certify_preconditions: eta must lie in [sqrt(3)/2, 1]");
  Certification c;
  c.rho = rho_constant(d, eps);
  c.delta_prime = delta_peak(d);
  c.delta_zero = delta_zero(d, c.rho);
  c.delta = 3.0 * std::max({eps, c.delta_zero, c.delta_prime});
  c.nearest_neighbor_tail = nearest_neighbor_tail(d, c.delta);
  c.inner_certified = c.nearest_neighbor_tail < 0.25 * c.rho;
  return c;
}

struct DivergenceBoundInputs {
  MahalanobisMetric metric;
  int d = 1;
  double eps = 0.5;
  double eta = detail::kHalfSqrt3;
  double rho = 0.0;
  double delta = 0.0;
  CoefficientSequence coeffs = CoefficientSequence::harmonic(0);
  Normalization normalization = Normalization::paper;
};

/// Inputs for the recipe of certify_preconditions.
inline DivergenceBoundInputs certified_inputs(const MahalanobisMetric& metric, double eps,
                                              double eta, CoefficientSequence coeffs) {
  const auto c = certify_preconditions(metric.dim(), eps, eta);
  return {metric, metric.dim(), eps, eta, c.rho, c.delta, std::move(coeffs), Normalization::paper};
}

/// Violated preconditions of the divergence bound, empty when it applies.
inline std::vector<std::string> precondition_violations(const DivergenceBoundInputs& in) {
  std::vector<std::string> out;
  if (in.d < 1 || in.d % 2 == 0) {
    out.push_back("d must be odd");
    return out;
  }
  if (in.metric.dim() != in.d) out.push_back("metric dimension differs from d");
  if (!(in.eps > 0.0 && in.eps <= 0.5)) out.push_back("eps must lie in (0, 1/2]");
  if (!(in.eta >= detail::kHalfSqrt3 && in.eta <= 1.0))
    out.push_back("eta must lie in [sqrt(3)/2, 1]");
  if (!(in.rho > 0.0)) {
    out.push_back("rho must be > 0");
    return out;
  }
  if (in.eps > 0.0 && std::abs(in.rho - rho_constant(in.d, in.eps)) > 1e-12 * in.rho)
    out.push_back("rho differs from rho_constant(d, eps)");
  const double needed =
      3.0 * std::max({in.eps, delta_zero(in.d, in.rho), delta_peak(in.d)});
  if (!(in.delta >= needed))
    out.push_back("delta below 3 max(eps, delta_0(rho), delta')");
  else if (!(nearest_neighbor_tail(in.d, in.delta) < 0.25 * in.rho))
    out.push_back("nearest-neighbor Hermite tail not below rho/4");
  return out;
}

/// Advisory notes that do not invalidate the bound.
inline std::vector<std::string> precondition_warnings(const DivergenceBoundInputs& in) {
  std::vector<std::string> out;
  if (in.metric.lambda_min() < 1.0)
    out.push_back("lambda_min(M_eff) < 1: projected separations shrink by sqrt(lambda_min); "
                  "rescale M or sigma so the separation holds in the metric");
  return out;
}

/// (1 / (|det L| sqrt(2 pi))) lambda_min(M_eff)^{(d+1)/2} vol(K) (rho / 2) sum_{i <= n} |alpha_i|.
inline double rtv2_lower_bound(const DivergenceBoundInputs& in, std::size_t n) {
  if (n == 0) throw std::invalid_argument("rtv2_lower_bound: n must be >= 1");
  auto violations = precondition_violations(in);
  if (n > in.coeffs.size())
    violations.push_back("n exceeds the coefficient sequence length");
  if (!violations.empty()) {
    std::string msg = "rtv2_lower_bound: preconditions violated:";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }
  const double geometry = normalization_factor(in.normalization, in.d) /
                          (in.metric.det_factor() * kSqrtTwoPi) *
                          std::pow(in.metric.lambda_min(), 0.5 * (in.d + 1)) *
                          cone_volume(in.d, in.eta);
  return geometry * 0.5 * in.rho * l1_norm(in.coeffs.prefix(n));
}

}  // namespace radon_gap
