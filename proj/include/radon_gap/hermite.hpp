#pragma once

// Probabilist's Hermite polynomials He_n and the constants built on the
// weighted profile He_n(y) exp(-y^2/2): C_d, the eps-safe mass rho, the
// delta-peak, Gaussian-weighted tail sums and the separation delta_0.
//
// Every absolute integral here is exact up to rounding. The identity
//   d/du [He_n(u) e^{-u^2/2}] = -He_{n+1}(u) e^{-u^2/2}
// gives an antiderivative of He_{n+1} e^{-u^2/2}; splitting at the roots of
// He_{n+1} makes the absolute value piecewise signed.

#include "radon_gap/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace radon_gap {

inline constexpr double kSqrtTwoPi = 2.506628274631000502415765284811045;

/// He_n(y) from He_{k+1} = y He_k - k He_{k-1}, He_0 = 1, He_1 = y.
inline double hermite_eval(unsigned n, double y) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = y;
  for (unsigned k = 1; k < n; ++k) {
    const double next = y * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// He_n(y) exp(-y^2/2). Goes to zero (not NaN) once the Gaussian underflows.
inline double weighted_hermite(unsigned n, double y) {
  const double g = std::exp(-0.5 * y * y);
  if (g == 0.0) return 0.0;
  return hermite_eval(n, y) * g;
}

namespace detail {

inline void require_odd_dimension(int d, const char* where) {
  if (d < 1 || d % 2 == 0)
    throw std::domain_error(std::string(where) +
                            ": paper formula requires odd dimension (got d = " +
                            std::to_string(d) + ")");
}

// Eigen-decomposition of the Jacobi matrix of He_n (zero diagonal,
// off-diagonals sqrt(1), ..., sqrt(n-1)).
inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hermite_jacobi(unsigned n,
                                                                    bool vectors) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 0 ? n - 1 : 0);
  for (unsigned k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(
      diag, off, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  return solver;
}

}  // namespace detail

/// The n real roots of He_n in increasing order, via the Golub-Welsch
/// eigenproblem. Symmetric about zero; zero is a root iff n is odd.
inline std::vector<double> hermite_roots(unsigned n) {
  if (n == 0) throw std::invalid_argument("hermite_roots: constant polynomial has no roots");
  const auto solver = detail::hermite_jacobi(n, false);
  std::vector<double> roots(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + n);
  std::sort(roots.begin(), roots.end());
  for (unsigned i = 0; i < n / 2; ++i) {
    const double r = 0.5 * (roots[n - 1 - i] - roots[i]);
    roots[i] = -r;
    roots[n - 1 - i] = r;
  }
  if (n % 2 == 1) roots[n / 2] = 0.0;
  return roots;
}

/// n-point Gauss rule for the weight exp(-z^2/2) on the real line (total
/// mass sqrt(2 pi)); exact for polynomials of degree <= 2n - 1.
inline GaussRule gauss_hermite(unsigned n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  const auto solver = detail::hermite_jacobi(n, true);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (unsigned i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = kSqrtTwoPi * v0 * v0;
  }
  return rule;
}

enum class IntegralMethod { exact_antiderivative, adaptive_quadrature };

struct PiecewiseIntegralResult {
  double value = 0.0;
  std::vector<double> breakpoints;  // roots of the integrand used as split points
  IntegralMethod method = IntegralMethod::exact_antiderivative;
};

/// Exact value of int_a^b |He_m(u) e^{-u^2/2}| du for m >= 1; a and b may be
/// infinite. Uses F(u) = -He_{m-1}(u) e^{-u^2/2} on each sign-constant piece.
inline PiecewiseIntegralResult abs_weighted_hermite_integral(unsigned m, double a, double b) {
  if (m == 0)
    throw std::invalid_argument("abs_weighted_hermite_integral: order must be >= 1");
  if (!(b >= a)) throw std::invalid_argument("abs_weighted_hermite_integral: need a <= b");

  PiecewiseIntegralResult result;
  for (double r : hermite_roots(m))
    if (r > a && r < b) result.breakpoints.push_back(r);

  auto antiderivative = [m](double u) {
    if (std::isinf(u)) return 0.0;
    return -weighted_hermite(m - 1, u);
  };
  double left = a;
  double total = 0.0;
  for (std::size_t i = 0; i <= result.breakpoints.size(); ++i) {
    const double right = (i < result.breakpoints.size()) ? result.breakpoints[i] : b;
    total += std::abs(antiderivative(right) - antiderivative(left));
    left = right;
  }
  result.value = total;
  return result;
}

/// int_R |He_{n+1}(u) e^{-u^2/2}| du for any n >= 0. For odd n this is C_n.
inline PiecewiseIntegralResult cd_constant_general(unsigned n) {
  const double inf = std::numeric_limits<double>::infinity();
  return abs_weighted_hermite_integral(n + 1, -inf, inf);
}

/// C_d = int_R |He_{d+1}(u) e^{-u^2/2}| du, d odd.
inline PiecewiseIntegralResult cd_constant(int d) {
  detail::require_odd_dimension(d, "cd_constant");
  return cd_constant_general(static_cast<unsigned>(d));
}

/// rho = int_{-eps}^{eps} |He_{d+1}(y) e^{-y^2/2}| dy, the mass of the
/// single-center profile within an eps-neighborhood of its center.
inline double rho_constant(int d, double eps) {
  detail::require_odd_dimension(d, "rho_constant");
  if (!(eps > 0.0)) throw std::invalid_argument("rho_constant: eps must be > 0");
  return abs_weighted_hermite_integral(static_cast<unsigned>(d) + 1, -eps, eps).value;
}

/// Largest root of He_{d+2}. Beyond it d/dy[He_{d+1} e^{-y^2/2}] keeps the
/// sign forced by the leading term, so [-delta', delta'] is a delta-peak.
inline double delta_peak(int d) {
  detail::require_odd_dimension(d, "delta_peak");
  return hermite_roots(static_cast<unsigned>(d) + 2).back();
}

/// Sum of |coefficients| of He_m, so |He_m(y)| <= C (1 + |y|)^m on all of R.
/// Satisfies A_{m+1} = A_m + m A_{m-1}.
inline double hermite_majorant_constant(unsigned m) {
  double prev = 1.0;
  double cur = 1.0;
  for (unsigned k = 1; k < m; ++k) {
    const double next = cur + static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

struct TailSum {
  double value = 0.0;            // partial sum actually accumulated
  double remainder_bound = 0.0;  // certified bound on the omitted terms
  unsigned last_index = 0;       // last j included
};

/// sum_{j >= first} |He_m(j delta)| e^{-(j delta)^2/2}, truncated once the
/// polynomial majorant C (1 + j delta)^m e^{-(j delta)^2/2}, summed as a
/// geometric series with its (decreasing) term ratio, certifies the rest is
/// below `truncation_tol`.
inline TailSum tail_sum_general(unsigned m, double delta, double truncation_tol,
                                unsigned first = 2) {
  if (!(delta > 0.0)) throw std::invalid_argument("tail_sum: delta must be > 0");
  if (!(truncation_tol > 0.0))
    throw std::invalid_argument("tail_sum: truncation_tol must be > 0");
  if (first == 0) throw std::invalid_argument("tail_sum: first index must be >= 1");

  const double log_c = std::log(hermite_majorant_constant(m));
  auto log_majorant = [&](double j) {
    const double y = j * delta;
    return log_c + static_cast<double>(m) * std::log1p(y) - 0.5 * y * y;
  };

  TailSum out;
  for (unsigned j = first;; ++j) {
    out.value += std::abs(weighted_hermite(m, static_cast<double>(j) * delta));
    out.last_index = j;
    const double next = static_cast<double>(j) + 1.0;
    const double log_ratio = log_majorant(next + 1.0) - log_majorant(next);
    if (log_ratio < 0.0) {
      const double bound = std::exp(log_majorant(next)) / -std::expm1(log_ratio);
      if (bound < truncation_tol) {
        out.remainder_bound = bound;
        return out;
      }
    }
    if (j == std::numeric_limits<unsigned>::max() - 2)
      throw std::runtime_error("tail_sum: failed to certify truncation");
  }
}

/// Tail sum_{j >= 2} |He_{d+1}(j delta)| e^{-(j delta)^2/2}.
inline TailSum tail_sum(int d, double delta, double truncation_tol, unsigned first = 2) {
  detail::require_odd_dimension(d, "tail_sum");
  return tail_sum_general(static_cast<unsigned>(d) + 1, delta, truncation_tol, first);
}

struct DeltaZeroSearch {
  double delta0 = 0.0;     // passing end of the final bracket
  double bracket_lo = 0.0; // last failing point (== delta0 if the start passed)
  double bracket_hi = 0.0;
  double tail = 0.0;       // certified tail (value + remainder) at delta0
};

/// Smallest delta on a doubling-then-bisection grid for which the certified
/// tail sum_{j >= first} is below rho/4. The search starts at
/// max(delta_peak(d), 1), where each term is already decreasing in delta.
inline DeltaZeroSearch delta_zero_search(int d, double rho, unsigned first = 2,
                                         int bisection_steps = 40) {
  detail::require_odd_dimension(d, "delta_zero");
  if (!(rho > 0.0)) throw std::invalid_argument("delta_zero: rho must be > 0");
  const double target = 0.25 * rho;
  const double tol = std::max(target * 1e-6, std::numeric_limits<double>::min());
  auto certified_tail = [&](double delta) {
    const auto t = tail_sum(d, delta, tol, first);
    return t.value + t.remainder_bound;
  };

  DeltaZeroSearch s;
  const double start = std::max(delta_peak(d), 1.0);
  double t = certified_tail(start);
  if (t < target) {
    s.delta0 = s.bracket_lo = s.bracket_hi = start;
    s.tail = t;
    return s;
  }
  double lo = start;
  double hi = 2.0 * start;
  while (!((t = certified_tail(hi)) < target)) {
    lo = hi;
    hi *= 2.0;
  }
  double t_hi = t;
  for (int i = 0; i < bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double tm = certified_tail(mid);
    if (tm < target) {
      hi = mid;
      t_hi = tm;
    } else {
      lo = mid;
    }
  }
  s.delta0 = hi;
  s.bracket_lo = lo;
  s.bracket_hi = hi;
  s.tail = t_hi;
  return s;
}

inline double delta_zero(int d, double rho) { return delta_zero_search(d, rho).delta0; }

}  // namespace radon_gap
