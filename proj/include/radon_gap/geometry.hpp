#pragma once

// Separated center sets, cones (spherical caps) around a direction, and cap
// surface measures.

#include "radon_gap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace radon_gap {

/// Surface measure of S^{d-1}: 2 pi^{d/2} / Gamma(d/2). Equals 2 for d = 1.
inline double sphere_measure(int d) {
  if (d < 1) throw std::invalid_argument("sphere_measure: d must be >= 1");
  const double half = 0.5 * static_cast<double>(d);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

namespace detail {

inline void require_unit(const Vector& v, const char* where) {
  if (v.size() == 0 || std::abs(v.norm() - 1.0) > 1e-10)
    throw std::invalid_argument(std::string(where) + ": direction must be a unit vector");
}

// int_0^phi sin^m(t) dt by the reduction formula.
inline double sine_power_integral(int m, double phi) {
  if (m == 0) return phi;
  if (m == 1) return 1.0 - std::cos(phi);
  const double s = std::sin(phi);
  return -std::pow(s, m - 1) * std::cos(phi) / m +
         static_cast<double>(m - 1) / m * sine_power_integral(m - 2, phi);
}

}  // namespace detail

/// The cap {b in S^{d-1} : b^T axis >= eta}.
struct ConeSpec {
  Vector axis;
  double eta = 1.0;

  ConeSpec(Vector axis_in, double eta_in) : axis(std::move(axis_in)), eta(eta_in) {
    detail::require_unit(axis, "cone");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("cone: eta must lie in (0, 1]");
  }
};

struct SeparatedSetReport {
  std::size_t n = 0;
  double min_axis_margin = std::numeric_limits<double>::infinity();
  std::optional<double> min_cone_margin;
  bool passes_beta_delta = true;
  std::optional<bool> passes_beta_delta_eta;
};

/// Direction b' = eta0 * beta + sqrt(1 - eta0^2) * u, with u the normalized
/// residual of the lowest-index basis vector least aligned with beta. In d = 1
/// there is no orthogonal complement and b' = beta.
inline Vector construction_direction(const Vector& beta, double eta0) {
  detail::require_unit(beta, "collinear_centers");
  if (!(eta0 >= 0.0 && eta0 <= 1.0))
    throw std::invalid_argument("collinear_centers: eta0 must lie in [0, 1]");
  const auto d = beta.size();
  if (d == 1) return beta;
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < d; ++k)
    if (std::abs(beta(k)) < std::abs(beta(best))) best = k;
  Vector u = -beta(best) * beta;
  u(best) += 1.0;
  u.normalize();
  return eta0 * beta + std::sqrt(std::max(0.0, 1.0 - eta0 * eta0)) * u;
}

/// x_i = (i - 1) delta b', i = 1..n.
inline std::vector<Vector> collinear_centers(const Vector& beta, double delta, double eta0,
                                             std::size_t n) {
  if (!(delta > 0.0)) throw std::invalid_argument("collinear_centers: delta must be > 0");
  if (n == 0) throw std::invalid_argument("collinear_centers: n must be >= 1");
  const Vector dir = construction_direction(beta, eta0);
  std::vector<Vector> centers;
  centers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) centers.emplace_back(static_cast<double>(i) * delta * dir);
  return centers;
}

/// Pairwise |beta^T (x_i - x_j)| >= delta, compared exactly.
inline SeparatedSetReport is_beta_delta_separated(const std::vector<Vector>& centers,
                                                  const Vector& beta, double delta) {
  detail::require_unit(beta, "is_beta_delta_separated");
  if (!(delta > 0.0)) throw std::invalid_argument("is_beta_delta_separated: delta must be > 0");
  SeparatedSetReport r;
  r.n = centers.size();
  std::vector<double> proj;
  proj.reserve(centers.size());
  for (const auto& x : centers) {
    if (x.size() != beta.size()) throw std::invalid_argument("is_beta_delta_separated: dimension mismatch");
    proj.push_back(beta.dot(x));
  }
  // The minimal pairwise gap is between neighbors in sorted order.
  std::sort(proj.begin(), proj.end());
  for (std::size_t i = 1; i < proj.size(); ++i)
    r.min_axis_margin = std::min(r.min_axis_margin, proj[i] - proj[i - 1]);
  r.passes_beta_delta = r.min_axis_margin >= delta;
  return r;
}

/// min |b^T diff| over b in the cap. With diff = p axis + w (w orthogonal to
/// axis), directions at polar angle phi reach p cos(phi) +/- |w| sin(phi); the
/// minimum is 0 when the cap boundary already reaches diff's orthogonal
/// hyperplane, otherwise |p| eta - |w| sqrt(1 - eta^2) on the boundary.
inline double min_cone_projection(const Vector& diff, const ConeSpec& cone) {
  if (diff.size() != cone.axis.size())
    throw std::invalid_argument("min_cone_projection: dimension mismatch");
  const double p = cone.axis.dot(diff);
  if (diff.size() == 1) return std::abs(p);  // the cap of S^0 is {axis}
  const double w = (diff - p * cone.axis).norm();
  const double s = std::sqrt(std::max(0.0, 1.0 - cone.eta * cone.eta));
  const double boundary = std::abs(p) * cone.eta - w * s;
  return std::max(0.0, boundary);
}

/// (beta, delta, eta)-separation over every direction of the cap, plus the
/// axis-only margin.
inline SeparatedSetReport is_eta_separated(const std::vector<Vector>& centers,
                                           const ConeSpec& cone, double delta) {
  SeparatedSetReport r = is_beta_delta_separated(centers, cone.axis, delta);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      margin = std::min(margin, min_cone_projection(centers[i] - centers[j], cone));
  r.min_cone_margin = margin;
  r.passes_beta_delta_eta = margin >= delta;
  return r;
}

/// Surface measure of {b in S^{d-1} : b^T axis >= eta}:
/// |S^{d-2}| int_0^{acos eta} sin^{d-2}(phi) dphi for d >= 2, and 1 for d = 1.
inline double cone_volume(int d, double eta) {
  if (d < 1) throw std::invalid_argument("cone_volume: d must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("cone_volume: eta must lie in [0, 1]");
  if (d == 1) return 1.0;
  return sphere_measure(d - 1) * detail::sine_power_integral(d - 2, std::acos(eta));
}

}  // namespace radon_gap
