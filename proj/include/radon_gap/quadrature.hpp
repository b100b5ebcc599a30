#pragma once

// One-dimensional quadrature: Gauss-Legendre rules from the Golub-Welsch
// eigenproblem and a globally adaptive Gauss-Kronrod (G10/K21) integrator.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace radon_gap {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Nodes are the eigenvalues of the
/// symmetric Jacobi matrix with off-diagonals k / sqrt(4k^2 - 1); weights are
/// 2 * (first eigenvector component)^2.
inline GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    off(static_cast<Eigen::Index>(k - 1)) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    rule.nodes[i] = solver.eigenvalues()(ii);
    const double v0 = solver.eigenvectors()(0, ii);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  // Symmetrize to remove eigen-solver asymmetry in the last bits.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980357830, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for kKronrodNodes[1], [3], [5], [7], [9].
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_panel(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = kKronrodWeights[10] * f(center);
  double gauss = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
  bool converged = true;
};

/// Globally adaptive G10/K21 integration of f over the partition given by
/// `breakpoints` (sorted, at least two entries). The panel with the largest
/// error estimate is bisected until the summed estimate drops below `tol`.
/// The reported error is the summed |K21 - G10| over the final panels.
template <class F>
QuadratureResult integrate_adaptive(F&& f, const std::vector<double>& breakpoints,
                                    double tol, std::size_t max_panels = 200000) {
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_adaptive: tol must be > 0");
  if (breakpoints.size() < 2)
    throw std::invalid_argument("integrate_adaptive: need at least two breakpoints");

  std::priority_queue<detail::Panel> queue;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    auto panel = detail::gauss_kronrod_panel(f, a, b);
    total_error += panel.error;
    queue.push(panel);
  }

  QuadratureResult result;
  std::vector<detail::Panel> finished;
  while (!queue.empty() && total_error > tol && queue.size() + finished.size() < max_panels) {
    detail::Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    // Panels that can no longer be split in floating point are retired.
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                  std::max(1.0, std::abs(mid))) {
      finished.push_back(worst);
      if (queue.empty()) break;
      continue;
    }
    auto left = detail::gauss_kronrod_panel(f, worst.a, mid);
    auto right = detail::gauss_kronrod_panel(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  while (!queue.empty()) {
    finished.push_back(queue.top());
    queue.pop();
  }
  // Sum in position order so the result does not depend on heap layout.
  std::sort(finished.begin(), finished.end(),
            [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
  for (const auto& p : finished) {
    result.value += p.value;
    result.error += p.error;
  }
  result.panels = finished.size();
  result.converged = result.error <= tol;
  return result;
}

/// Locates sign changes of f on [a, b] by sampling with spacing at most `step`
/// and refines each bracket by bisection. Returns the refined roots, sorted.
template <class F>
std::vector<double> bracket_sign_changes(F&& f, double a, double b, double step) {
  std::vector<double> roots;
  if (!(b > a) || !(step > 0.0)) return roots;
  const auto count = static_cast<std::size_t>(std::ceil((b - a) / step));
  const double h = (b - a) / static_cast<double>(std::max<std::size_t>(count, 1));
  double x_prev = a;
  double f_prev = f(a);
  for (std::size_t i = 1; i <= count; ++i) {
    const double x = (i == count) ? b : a + h * static_cast<double>(i);
    const double fx = f(x);
    if (f_prev == 0.0 && i > 1) {
      roots.push_back(x_prev);
    } else if ((f_prev < 0.0 && fx > 0.0) || (f_prev > 0.0 && fx < 0.0)) {
      double lo = x_prev;
      double hi = x;
      double f_lo = f_prev;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x_prev = x;
    f_prev = fx;
  }
  return roots;
}

}  // namespace radon_gap
