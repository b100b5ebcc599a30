// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "radon_gap/radon_gap.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace rg = radon_gap;
using rg::Matrix;
using rg::Vector;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double max_seconds,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < max_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::ostringstream line;
  line << (pass ? "[PASS] " : "[FAIL] ") << id << ": " << name << " -- " << o.detail << " ("
       << secs << " s, limit " << max_seconds << " s" << (in_time ? "" : ", over limit") << ")";
  std::cout << line.str() << std::endl;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const double kEta = std::sqrt(3.0) / 2.0;

}  // namespace

int main() {
  criterion(1, "Hermite orthogonality, m, n <= 10", 1.0, [] {
    const auto rule = rg::gauss_hermite(20);
    double worst = 0.0;
    bool ok = true;
    for (unsigned m = 0; m <= 10; ++m)
      for (unsigned n = 0; n <= 10; ++n) {
        double s = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
          s += rule.weights[k] * rg::hermite_eval(m, rule.nodes[k]) *
               rg::hermite_eval(n, rule.nodes[k]);
        s /= rg::kSqrtTwoPi;
        const double dev = std::abs(s - (m == n ? factorial(n) : 0.0));
        const double scaled = dev / std::max(1.0, factorial(n));
        worst = std::max(worst, scaled);
        ok = ok && dev <= 1e-8 * std::max(1.0, factorial(n));
      }
    return Outcome{ok, "max scaled deviation " + fmt(worst) + " <= 1e-8"};
  });

  criterion(2, "C_d exactness, d in {1,3,5,7}", 1.0, [] {
    double worst = 0.0;
    for (int d : {1, 3, 5, 7}) {
      const double exact = rg::cd_constant(d).value;
      const double ref = oracle::adaptive_simpson(
          [d](double u) { return oracle::abs_weighted_series(static_cast<unsigned>(d) + 1, u); },
          -40.0, 40.0, 1e-13, 800);
      worst = std::max(worst, std::abs(exact - ref) / ref);
    }
    const double c1_dev = std::abs(rg::cd_constant(1).value - 4.0 * std::exp(-0.5));
    return Outcome{worst <= 1e-10 && c1_dev <= 1e-12,
                   "max rel error " + fmt(worst) + " <= 1e-10, |C_1 - 4e^{-1/2}| = " + fmt(c1_dev) +
                       " <= 1e-12"};
  });

  criterion(3, "delta-peak value and sign check", 1.0, [] {
    const double dev = std::abs(rg::delta_peak(1) - std::sqrt(3.0));
    int bad = 0;
    int checked = 0;
    for (int d : {1, 3, 5}) {
      const double peak = rg::delta_peak(d);
      auto profile = [d](double y) { return rg::weighted_hermite(static_cast<unsigned>(d) + 1, y); };
      for (int k = 1; k <= 100; ++k) {
        const double y = peak + 5.0 * k / 100.0;
        // |He_{d+1}(y)| e^{-y^2/2} decreases away from the peak on both sides.
        if (!(oracle::central_difference(profile, y, 1e-6) < 0.0)) ++bad;
        if (!(oracle::central_difference(profile, -y, 1e-6) > 0.0)) ++bad;
        checked += 2;
      }
    }
    return Outcome{dev <= 1e-10 && bad == 0,
                   "|delta_peak(1) - sqrt 3| = " + fmt(dev) + ", sign failures " +
                       std::to_string(bad) + "/" + std::to_string(checked)};
  });

  criterion(4, "delta_0 certification, d in {1,3}, eps = 1/2", 1.0, [] {
    bool ok = true;
    std::string detail;
    for (int d : {1, 3}) {
      const double rho = rg::rho_constant(d, 0.5);
      const auto s = rg::delta_zero_search(d, rho);
      const auto t = rg::tail_sum(d, s.delta0, 1e-15);
      const double width = s.bracket_hi - s.bracket_lo;
      ok = ok && t.value + t.remainder_bound < rho / 4.0 && width <= 1e-8;
      detail += "d=" + std::to_string(d) + ": tail " + fmt(t.value) + " < rho/4 = " +
                fmt(rho / 4.0) + ", bracket " + fmt(width) + "; ";
    }
    // A rho small enough that the search has to bisect.
    const auto s = rg::delta_zero_search(1, 1e-6);
    const double width = s.bracket_hi - s.bracket_lo;
    ok = ok && width <= 1e-8 && rg::tail_sum(1, s.delta0, 1e-15).value < 0.25e-6;
    detail += "bisecting case bracket " + fmt(width) + " <= 1e-8";
    return Outcome{ok, detail};
  });

  criterion(5, "gap precursor, d = 1, n <= 4096", 30.0, [] {
    const auto cert = rg::certify_preconditions(1, 0.5, kEta);
    const std::size_t n_max = 4096;
    const auto coeffs = rg::CoefficientSequence::harmonic(n_max);
    const auto metric = rg::MahalanobisMetric::identity(1);
    const rg::KernelMachine f(metric, rg::collinear_centers(Vector::Ones(1), cert.delta, kEta, n_max),
                              coeffs.values());
    const auto norms = rg::rkhs_norm_sq_prefixes(f);
    const double metric_delta = cert.delta * std::sqrt(metric.lambda_min());
    bool increasing = true;
    bool bounded = true;
    for (std::size_t n = 1; n <= n_max; ++n) {
      bounded = bounded && norms[n - 1] <= rg::harmonic_norm_bound(n, metric_delta, 1.0);
      if (n > 1) increasing = increasing && norms[n - 1] > norms[n - 2];
    }
    const double growth = rg::l1_norm(coeffs.prefix(2048)) - rg::l1_norm(coeffs.prefix(1024));
    const double l1_31 = rg::l1_norm(coeffs.prefix(31));
    const bool ok = increasing && bounded && std::abs(growth - std::numbers::ln2) <= 0.01 && l1_31 > 4.0;
    return Outcome{ok, std::string("increasing ") + (increasing ? "yes" : "no") + ", bounded " +
                           (bounded ? "yes" : "no") + " (||f_4096||^2 = " + fmt(norms.back()) +
                           "), l1(2048) - l1(1024) - ln 2 = " + fmt(growth - std::numbers::ln2) +
                           ", l1(31) = " + fmt(l1_31)};
  });

  criterion(6, "single-center consistency, d in {1,3}, 5 SPD metrics each", 30.0, [] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> sigma(0.7, 1.5);
    std::normal_distribution<double> normal;
    double worst_ratio = 0.0;
    bool ok = true;
    for (int d : {1, 3}) {
      for (int k = 0; k < 5; ++k) {
        const auto metric =
            rg::MahalanobisMetric::from_matrix(oracle::random_spd(rng, d, 0.5, 2.0), sigma(rng));
        Vector center(d);
        for (int i = 0; i < d; ++i) center(i) = normal(rng);
        const rg::KernelMachine f(metric, {center}, {1.0});
        const auto est = rg::rtv2(f, rg::sphere_rule(d, 32), 1e-9);
        const double diff = std::abs(est.value - rg::rtv2_single_center(metric));
        ok = ok && diff <= 3.0 * est.quadrature_error;
        worst_ratio = std::max(worst_ratio, diff / est.quadrature_error);
      }
    }
    return Outcome{ok, "max |diff| / error = " + fmt(worst_ratio) + " <= 3"};
  });

  criterion(7, "d = 1 independent oracle, 20 random machines", 30.0, [] {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> count(1, 8);
    std::uniform_real_distribution<double> scale(0.3, 3.0);
    const double tol = 1e-9;
    double worst_ratio = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = count(rng);
      std::vector<Vector> centers;
      std::vector<double> alphas;
      for (int i = 0; i < n; ++i) {
        centers.push_back(Vector::Constant(1, 2.0 * normal(rng)));
        alphas.push_back(normal(rng));
      }
      const rg::KernelMachine f(
          rg::MahalanobisMetric::from_matrix(Matrix::Constant(1, 1, scale(rng)), 1.0), centers,
          alphas);
      const auto est = rg::rtv2(f, rg::sphere_rule(1, 0), tol);
      const auto direct = rg::rtv2_direct_1d(f, tol);
      const double factor = 2.0 / rg::kSqrtTwoPi;
      const double combined = est.quadrature_error + factor * direct.error_bound;
      const double diff = std::abs(est.value - factor * direct.value);
      ok = ok && diff <= 2.0 * combined;
      worst_ratio = std::max(worst_ratio, diff / combined);
    }
    return Outcome{ok, "max |diff| / combined tolerance = " + fmt(worst_ratio) + " <= 2"};
  });

  criterion(8, "divergence at desk scale, d = 1 and d = 3 presets", 300.0, [] {
    bool ok = true;
    std::string detail;
    for (const auto& config : {rg::preset_d1(), rg::preset_d3()}) {
      const auto rows = rg::run_gap_experiment(config);
      bool increasing = true;
      bool above = true;
      double worst_rel_error = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) increasing = increasing && rows[i].rtv2_value > rows[i - 1].rtv2_value;
        above = above && rows[i].rtv2_value + 3.0 * rows[i].rtv2_error >= rows[i].rtv2_lower_bound;
        worst_rel_error = std::max(worst_rel_error, rows[i].rtv2_error / rows[i].rtv2_value);
      }
      const double ratio = rows.back().rtv2_value / rows.front().rtv2_value;
      const bool error_ok = config.d == 1 || worst_rel_error < 0.05;
      ok = ok && increasing && above && ratio >= 2.0 && error_ok;
      detail += "d=" + std::to_string(config.d) + ": increasing " + (increasing ? "yes" : "no") +
                ", above lower bound " + (above ? "yes" : "no") + ", rtv2(" +
                std::to_string(rows.back().n) + ")/rtv2(1) = " + fmt(ratio) +
                ", max error/value = " + fmt(worst_rel_error) + "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(9, "cone geometry", 30.0, [] {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> eta(0.3, 0.999);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int d = std::array{2, 3, 5}[trial % 3];
      const Vector axis = oracle::random_unit(rng, d);
      Vector diff(d);
      for (int i = 0; i < d; ++i) diff(i) = normal(rng);
      if (trial % 2 == 0) diff += 3.0 * axis;
      const rg::ConeSpec cone(axis, eta(rng));
      const double ref = oracle::cap_min_abs_projection(diff, axis, cone.eta, 5000 + trial);
      worst = std::max(worst, std::abs(rg::min_cone_projection(diff, cone) - ref));
    }
    std::mt19937_64 mc(77);
    const int samples = 200000;
    int hits = 0;
    const Vector axis = Vector::Unit(3, 2);
    for (int i = 0; i < samples; ++i)
      if (oracle::random_unit(mc, 3).dot(axis) >= 0.5) ++hits;
    const double p = static_cast<double>(hits) / samples;
    const double area = 4.0 * std::numbers::pi;
    const double se = area * std::sqrt(p * (1.0 - p) / samples);
    const double vol = rg::cone_volume(3, 0.5);
    const double mc_dev = std::abs(area * p - vol);
    return Outcome{worst <= 1e-6 && mc_dev <= 3.0 * se && std::abs(vol - std::numbers::pi) < 1e-14,
                   "max |closed form - oracle| = " + fmt(worst) + " <= 1e-6; cone_volume(3, 1/2) - MC = " +
                       fmt(vol - area * p) + " within 3 SE = " + fmt(3.0 * se)};
  });

  criterion(10, "determinism of the gap CSV", 60.0, [] {
    const auto dir = std::filesystem::temp_directory_path();
    const auto a = (dir / "radon_gap_acceptance_a.csv").string();
    const auto b = (dir / "radon_gap_acceptance_b.csv").string();
    std::string how;
#ifdef RADON_GAP_CLI_PATH
    const std::string cli = RADON_GAP_CLI_PATH;
    const int ra = std::system((cli + " gap --preset d1 --out " + a + " > /dev/null").c_str());
    const int rb = std::system((cli + " --threads 2 gap --preset d1 --out " + b + " > /dev/null").c_str());
    if (ra != 0 || rb != 0) return Outcome{false, "radon-gap gap exited nonzero"};
    how = "radon-gap gap, 1 and 2 threads";
#else
    rg::emit_csv(rg::run_gap_experiment(rg::preset_d1()), a);
    rg::emit_csv(rg::run_gap_experiment(rg::preset_d1()), b);
    how = "emit_csv twice";
#endif
    const auto ca = slurp(a);
    const auto cb = slurp(b);
    std::remove(a.c_str());
    std::remove(b.c_str());
    return Outcome{!ca.empty() && ca == cb,
                   how + ": " + std::to_string(ca.size()) + " bytes, identical " + (ca == cb ? "yes" : "no")};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
