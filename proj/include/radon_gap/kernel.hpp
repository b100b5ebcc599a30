#pragma once

// Mahalanobis-Gaussian kernel k(x, y) = exp(-(x-y)^T M (x-y) / (2 sigma^2)),
// kernel machines f = sum_i alpha_i k(x_i, .), Gram matrices and RKHS norms.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace radon_gap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// SPD metric with the scale sigma folded in: all derived quantities (factor,
/// determinant, eigenvalue extremes) refer to M_eff = M / sigma^2, so the
/// kernel reads exp(-(x-y)^T M_eff (x-y) / 2).
class MahalanobisMetric {
 public:
  /// Validates M (square, symmetric to 1e-12, positive definite) and factors
  /// M_eff = L^T L with L upper triangular.
  static MahalanobisMetric from_matrix(const Matrix& m, double sigma) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw std::invalid_argument("metric: M must be a non-empty square matrix");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("metric: sigma must be > 0");
    if (!m.allFinite()) throw std::invalid_argument("metric: M has non-finite entries");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::domain_error("metric: M is asymmetric");

    MahalanobisMetric out;
    out.raw_ = 0.5 * (m + m.transpose());
    out.sigma_ = sigma;
    out.effective_ = out.raw_ / (sigma * sigma);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(out.effective_, Eigen::EigenvaluesOnly);
    out.lambda_min_ = eig.eigenvalues().minCoeff();
    out.lambda_max_ = eig.eigenvalues().maxCoeff();
    Eigen::LLT<Matrix> llt(out.effective_);
    if (llt.info() != Eigen::Success || !(out.lambda_min_ > 0.0))
      throw std::domain_error("metric: M is not positive definite");
    out.lower_ = llt.matrixL();
    out.factor_ = out.lower_.transpose();
    out.det_factor_ = std::abs(out.factor_.diagonal().prod());
    return out;
  }

  static MahalanobisMetric identity(int dim, double sigma = 1.0) {
    return from_matrix(Matrix::Identity(dim, dim), sigma);
  }

  int dim() const { return static_cast<int>(raw_.rows()); }
  const Matrix& matrix() const { return raw_; }
  double sigma() const { return sigma_; }
  const Matrix& effective() const { return effective_; }
  /// Upper-triangular L with effective() == L^T L.
  const Matrix& factor() const { return factor_; }
  /// |det L| = sqrt(det M_eff).
  double det_factor() const { return det_factor_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

  /// (x - y)^T M_eff (x - y).
  double distance_sq(const Vector& x, const Vector& y) const {
    check_dim(x);
    check_dim(y);
    const Vector diff = x - y;
    return diff.dot(effective_ * diff);
  }

  /// ||L^{-T} beta|| = sqrt(beta^T M_eff^{-1} beta), one triangular solve.
  double sigma_beta(const Vector& beta) const {
    check_dim(beta);
    // L^{-T} = (L^T)^{-1} and L^T is the lower Cholesky factor.
    return lower_.triangularView<Eigen::Lower>().solve(beta).norm();
  }

  void check_dim(const Vector& v) const {
    if (v.size() != raw_.rows())
      throw std::invalid_argument("dimension mismatch: expected " +
                                  std::to_string(raw_.rows()) + ", got " +
                                  std::to_string(v.size()));
  }

 private:
  MahalanobisMetric() = default;

  Matrix raw_;
  Matrix effective_;
  Matrix factor_;
  Matrix lower_;
  double sigma_ = 1.0;
  double det_factor_ = 1.0;
  double lambda_min_ = 1.0;
  double lambda_max_ = 1.0;
};

/// Coefficient rule for a kernel machine: the harmonic sequence 1/1, ..., 1/n
/// or an explicit list.
class CoefficientSequence {
 public:
  enum class Rule { harmonic, explicit_list };

  static CoefficientSequence harmonic(std::size_t n) {
    CoefficientSequence s;
    s.rule_ = Rule::harmonic;
    s.values_.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.values_[i] = 1.0 / static_cast<double>(i + 1);
    return s;
  }

  static CoefficientSequence explicit_list(std::vector<double> values) {
    CoefficientSequence s;
    s.rule_ = Rule::explicit_list;
    s.values_ = std::move(values);
    return s;
  }

  Rule rule() const { return rule_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> prefix(std::size_t n) const {
    if (n > values_.size()) throw std::invalid_argument("coefficient prefix longer than sequence");
    return {values_.data(), n};
  }

 private:
  Rule rule_ = Rule::explicit_list;
  std::vector<double> values_;
};

class KernelMachine {
 public:
  KernelMachine(MahalanobisMetric metric, std::vector<Vector> centers,
                std::vector<double> coeffs)
      : metric_(std::move(metric)), centers_(std::move(centers)), coeffs_(std::move(coeffs)) {
    if (centers_.empty()) throw std::invalid_argument("kernel machine needs at least one center");
    if (centers_.size() != coeffs_.size())
      throw std::invalid_argument("kernel machine: " + std::to_string(centers_.size()) +
                                  " centers but " + std::to_string(coeffs_.size()) +
                                  " coefficients");
    for (const auto& c : centers_) metric_.check_dim(c);
  }

  const MahalanobisMetric& metric() const { return metric_; }
  const std::vector<Vector>& centers() const { return centers_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::size_t size() const { return centers_.size(); }
  int dim() const { return metric_.dim(); }

  /// The machine built from the first n centers and coefficients.
  KernelMachine prefix(std::size_t n) const {
    if (n == 0 || n > size()) throw std::invalid_argument("kernel machine prefix out of range");
    return {metric_, {centers_.begin(), centers_.begin() + static_cast<std::ptrdiff_t>(n)},
            {coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(n)}};
  }

  KernelMachine scaled(double c) const {
    auto coeffs = coeffs_;
    for (auto& a : coeffs) a *= c;
    return {metric_, centers_, std::move(coeffs)};
  }

  KernelMachine translated(const Vector& shift) const {
    auto centers = centers_;
    for (auto& x : centers) x += shift;
    return {metric_, std::move(centers), coeffs_};
  }

  double operator()(const Vector& x) const;

 private:
  MahalanobisMetric metric_;
  std::vector<Vector> centers_;
  std::vector<double> coeffs_;
};

inline double kernel_eval(const MahalanobisMetric& metric, const Vector& x, const Vector& y) {
  return std::exp(-0.5 * metric.distance_sq(x, y));
}

inline double KernelMachine::operator()(const Vector& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += coeffs_[i] * kernel_eval(metric_, centers_[i], x);
  return sum;
}

inline Matrix gram_matrix(const MahalanobisMetric& metric, const std::vector<Vector>& centers) {
  const auto n = static_cast<Eigen::Index>(centers.size());
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = kernel_eval(metric, centers[static_cast<std::size_t>(i)],
                                   centers[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

inline double gram_min_eigenvalue(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

/// alpha^T K alpha, summed exactly over all pairs (no low-rank shortcut).
inline double rkhs_norm_sq(const KernelMachine& f) {
  const auto& c = f.centers();
  const auto& a = f.coeffs();
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    diag += a[i] * a[i];
    double row = 0.0;
    for (std::size_t j = i + 1; j < f.size(); ++j)
      row += a[j] * kernel_eval(f.metric(), c[i], c[j]);
    off += a[i] * row;
  }
  return diag + 2.0 * off;
}

/// ||f_n||^2 for every prefix f_n = sum_{i <= n} alpha_i k(x_i, .), computed
/// incrementally: ||f_n||^2 = ||f_{n-1}||^2 + alpha_n^2 + 2 alpha_n sum_{j<n} alpha_j K_nj.
inline std::vector<double> rkhs_norm_sq_prefixes(const KernelMachine& f) {
  const auto& c = f.centers();
  const auto& a = f.coeffs();
  std::vector<double> out(f.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    double cross = 0.0;
    for (std::size_t j = 0; j < n; ++j) cross += a[j] * kernel_eval(f.metric(), c[n], c[j]);
    acc += a[n] * a[n] + 2.0 * a[n] * cross;
    out[n] = acc;
  }
  return out;
}

inline double l1_norm(std::span<const double> coeffs) {
  double s = 0.0;
  for (double a : coeffs) s += std::abs(a);
  return s;
}

namespace detail {

// sum_{k >= 1} e^{-(k delta)^2 / (2 sigma^2)} H_k / k, stopped once the next
// term is below 1e-16 of the running sum, plus a certified remainder: H_k / k
// is non-increasing and the Gaussian ratio at k is e^{-(2k+1) delta^2/(2 sigma^2)},
// so the tail is dominated by a geometric series.
inline double harmonic_off_diagonal_sum(double delta, double sigma) {
  const double a = delta * delta / (2.0 * sigma * sigma);
  double acc = 0.0;
  double harmonic = 0.0;
  for (std::size_t k = 1;; ++k) {
    const double kk = static_cast<double>(k);
    harmonic += 1.0 / kk;
    const double term = std::exp(-a * kk * kk) * harmonic / kk;
    acc += term;
    const double next_k = kk + 1.0;
    const double next = std::exp(-a * next_k * next_k) * (harmonic + 1.0 / next_k) / next_k;
    if (next < 1e-16 * acc || (next == 0.0 && k > 1)) {
      const double ratio = std::exp(-a * (2.0 * next_k + 1.0));
      return acc + next / (1.0 - ratio);
    }
    if (k > 100000000) throw std::runtime_error("harmonic_norm_bound: series did not settle");
  }
}

}  // namespace detail

/// Upper bound on ||f_n||^2 for harmonic coefficients on centers with
/// ||x_i - x_j|| >= |i - j| delta in the kernel's metric:
///   sum_{i <= n} 1/i^2 + 2 sum_{k >= 1} e^{-(k delta)^2/(2 sigma^2)} H_k / k.
inline double harmonic_norm_bound(std::size_t n, double delta, double sigma) {
  if (!(delta > 0.0)) throw std::invalid_argument("harmonic_norm_bound: delta must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("harmonic_norm_bound: sigma must be > 0");
  double diag = 0.0;
  for (std::size_t i = n; i >= 1; --i) diag += 1.0 / (static_cast<double>(i) * static_cast<double>(i));
  return diag + 2.0 * detail::harmonic_off_diagonal_sum(delta, sigma);
}

/// The n -> infinity bound, with sum 1/i^2 = pi^2/6.
inline double harmonic_norm_bound_limit(double delta, double sigma) {
  if (!(delta > 0.0)) throw std::invalid_argument("harmonic_norm_bound: delta must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("harmonic_norm_bound: sigma must be > 0");
  return std::numbers::pi * std::numbers::pi / 6.0 +
         2.0 * detail::harmonic_off_diagonal_sum(delta, sigma);
}

}  // namespace radon_gap
