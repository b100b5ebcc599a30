#pragma once

// End-to-end gap experiment: harmonic kernel machines on a certified
// collinear separated set, with RKHS norms that stay bounded while the
// l1 norm, the RTV^2 lower bound and the computed RTV^2 all grow.

#include "radon_gap/bounds.hpp"
#include "radon_gap/geometry.hpp"
#include "radon_gap/kernel.hpp"
#include "radon_gap/radon.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace radon_gap {

struct GapExperimentConfig {
  int d = 1;
  double eps = 0.5;
  double eta = detail::kHalfSqrt3;
  double eta0 = detail::kHalfSqrt3;
  std::vector<std::size_t> n_list = {1, 2, 4, 8, 16, 32, 64};
  std::optional<Matrix> M;  // identity when absent
  double sigma = 1.0;
  double inner_tol = 1e-8;
  int resolution = 32;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::paper;
  int threads = 0;
};

inline GapExperimentConfig preset_d1() { return {}; }

inline GapExperimentConfig preset_d3() {
  GapExperimentConfig c;
  c.d = 3;
  c.n_list = {1, 2, 4, 8, 16};
  c.resolution = 32;
  return c;
}

struct GapExperimentRow {
  std::size_t n = 0;
  double l1_norm = 0.0;
  double rkhs_norm_sq = 0.0;
  double rkhs_upper_bound = 0.0;
  double rtv2_value = 0.0;
  double rtv2_error = 0.0;
  double rtv2_lower_bound = 0.0;
};

inline void validate(const GapExperimentConfig& c) {
  detail::require_odd_dimension(c.d, "gap experiment");
  if (c.n_list.empty()) throw std::invalid_argument("gap experiment: n_list is empty");
  if (c.n_list.front() < 1) throw std::invalid_argument("gap experiment: n must be >= 1");
  for (std::size_t i = 1; i < c.n_list.size(); ++i)
    if (!(c.n_list[i] > c.n_list[i - 1]))
      throw std::invalid_argument("gap experiment: n_list must be strictly increasing");
  if (!(c.eps > 0.0 && c.eps <= 0.5))
    throw std::invalid_argument("gap experiment: eps must lie in (0, 1/2]");
  if (!(c.eta >= detail::kHalfSqrt3 && c.eta0 >= c.eta && c.eta0 <= 1.0))
    throw std::invalid_argument("gap experiment: need sqrt(3)/2 <= eta <= eta0 <= 1");
  if (!(c.inner_tol > 0.0)) throw std::invalid_argument("gap experiment: inner_tol must be > 0");
}

inline MahalanobisMetric experiment_metric(const GapExperimentConfig& c) {
  const Matrix m = c.M ? *c.M : Matrix::Identity(c.d, c.d);
  if (m.rows() != c.d) throw std::invalid_argument("gap experiment: M does not match d");
  return MahalanobisMetric::from_matrix(m, c.sigma);
}

inline std::vector<GapExperimentRow> run_gap_experiment(const GapExperimentConfig& c) {
  validate(c);
  const auto metric = experiment_metric(c);
  const std::size_t n_max = c.n_list.back();
  auto inputs = certified_inputs(metric, c.eps, c.eta, CoefficientSequence::harmonic(n_max));
  inputs.normalization = c.normalization;

  Vector axis = Vector::Zero(c.d);
  axis(0) = 1.0;
  const KernelMachine full(metric, collinear_centers(axis, inputs.delta, c.eta0, n_max),
                           inputs.coeffs.values());
  const auto rule = sphere_rule(c.d, c.resolution, c.seed);
  // Consecutive centers are delta apart in R^d, so at least
  // delta sqrt(lambda_min) apart in the kernel metric.
  const double metric_delta = inputs.delta * std::sqrt(metric.lambda_min());

  std::vector<GapExperimentRow> rows;
  rows.reserve(c.n_list.size());
  for (std::size_t n : c.n_list) {
    const auto f = full.prefix(n);
    GapExperimentRow row;
    row.n = n;
    row.l1_norm = l1_norm(f.coeffs());
    row.rkhs_norm_sq = rkhs_norm_sq(f);
    row.rkhs_upper_bound = harmonic_norm_bound(n, metric_delta, 1.0);
    const auto est = rtv2(f, rule, c.inner_tol, c.normalization, {.threads = c.threads});
    row.rtv2_value = est.value;
    row.rtv2_error = est.quadrature_error;
    row.rtv2_lower_bound = rtv2_lower_bound(inputs, n);
    rows.push_back(row);
  }
  return rows;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

inline constexpr const char* kGapCsvHeader =
    "n,l1_norm,rkhs_norm_sq,rkhs_upper_bound,rtv2_value,rtv2_error,rtv2_lower_bound";

inline std::string to_csv(const std::vector<GapExperimentRow>& rows) {
  std::string out = kGapCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.n);
    for (double v : {r.l1_norm, r.rkhs_norm_sq, r.rkhs_upper_bound, r.rtv2_value, r.rtv2_error,
                     r.rtv2_lower_bound}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline void emit_csv(const std::vector<GapExperimentRow>& rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
  const auto text = to_csv(rows);
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  file.close();
  if (!file) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

}  // namespace radon_gap
