// radon-gap: command-line front end for the radon_gap headers.

#include "radon_gap/io.hpp"
#include "radon_gap/radon_gap.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rg = radon_gap;
using Json = nlohmann::ordered_json;

namespace {

struct Globals {
  int threads = 0;
  std::string format = "auto";
};

// Prints a flat record as JSON, a one-row CSV, or just its first field.
void print_record(const Json& record, const std::string& format, const std::string& fallback) {
  const std::string f = format == "auto" ? fallback : format;
  if (f == "json") {
    std::cout << record.dump(2) << '\n';
    return;
  }
  auto text = [](const Json& v) -> std::string {
    if (v.is_number_float()) return rg::format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  if (f == "plain") {
    std::cout << text(record.begin().value()) << '\n';
    return;
  }
  std::string header, row;
  for (auto it = record.begin(); it != record.end(); ++it) {
    if (it != record.begin()) {
      header += ',';
      row += ',';
    }
    header += it.key();
    row += text(it.value());
  }
  std::cout << header << '\n' << row << '\n';
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw rg::SpecError(what + ": cannot read '" + item + "' as a number");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

rg::Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const rg::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void add_hermite(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("hermite", "Hermite polynomial quantities");
  auto eval = std::make_shared<std::vector<std::string>>();
  auto roots = std::make_shared<unsigned>();
  auto cd = std::make_shared<int>();
  auto rho = std::make_shared<std::pair<int, double>>();
  auto peak = std::make_shared<int>();
  auto dzero = std::make_shared<std::pair<int, double>>();
  auto* o_eval = cmd->add_option("--eval", *eval, "He_n(y)")->expected(2)->type_name("N Y");
  auto* o_roots = cmd->add_option("--roots", *roots, "Roots of He_n")->type_name("N");
  auto* o_cd = cmd->add_option("--cd", *cd, "C_d = int |He_{d+1}(u) e^{-u^2/2}| du")->type_name("D");
  auto* o_rho = cmd->add_option("--rho", *rho, "rho(d, eps)")->type_name("D EPS");
  auto* o_peak = cmd->add_option("--delta-peak", *peak, "Largest root of He_{d+2}")->type_name("D");
  auto* o_dz = cmd->add_option("--delta-zero", *dzero, "delta_0(d, rho)")->type_name("D RHO");
  cmd->require_option(1);
  cmd->callback([=, &g] {
    Json out;
    if (*o_eval) {
      std::size_t used = 0;
      const auto& ns = (*eval)[0];
      long n = -1;
      try {
        n = std::stol(ns, &used);
      } catch (const std::exception&) {
      }
      if (n < 0 || used != ns.size()) throw rg::SpecError("--eval: N must be a non-negative integer");
      const double y = parse_list((*eval)[1], "--eval").at(0);
      out["value"] = rg::hermite_eval(static_cast<unsigned>(n), y);
    } else if (*o_roots) {
      const auto r = rg::hermite_roots(*roots);
      if (g.format == "auto" || g.format == "plain") {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i)
          line += (i ? ", " : "") + rg::format_double(r[i]);
        std::cout << line << '\n';
        return;
      }
      out["roots"] = r;
    } else if (*o_cd) {
      out["value"] = rg::cd_constant(*cd).value;
    } else if (*o_rho) {
      out["value"] = rg::rho_constant(rho->first, rho->second);
    } else if (*o_peak) {
      out["value"] = rg::delta_peak(*peak);
    } else if (*o_dz) {
      const auto s = rg::delta_zero_search(dzero->first, dzero->second);
      out["value"] = s.delta0;
      out["bracket_lo"] = s.bracket_lo;
      out["bracket_hi"] = s.bracket_hi;
      out["tail"] = s.tail;
    }
    print_record(out, g.format, "plain");
  });
}

void add_rkhs(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("rkhs", "RKHS norm of a kernel machine");
  struct Args {
    std::string path;
    std::size_t harmonic = 0;
    std::optional<double> delta;
    int dimension = 1;
  };
  auto a = std::make_shared<Args>();
  auto* o_path = cmd->add_option("machine", a->path, "Machine spec (JSON)");
  auto* o_h = cmd->add_option("--harmonic", a->harmonic,
                              "Harmonic machine with N collinear centers instead of a file")
                  ->check(CLI::PositiveNumber);
  cmd->add_option("--delta", a->delta, "Center spacing for --harmonic (default: certified)")
      ->needs(o_h);
  cmd->add_option("--dimension", a->dimension, "Dimension for --harmonic")->needs(o_h)
      ->check(CLI::PositiveNumber);
  o_path->excludes(o_h);
  cmd->callback([a, o_path, o_h, &g] {
    if (!*o_path && !*o_h) throw CLI::RequiredError("machine or --harmonic");
    std::optional<rg::KernelMachine> f;
    if (*o_h) {
      const double delta = a->delta ? *a->delta
                                    : rg::certify_preconditions(a->dimension, 0.5,
                                                                rg::detail::kHalfSqrt3).delta;
      rg::Vector axis = rg::Vector::Zero(a->dimension);
      axis(0) = 1.0;
      f.emplace(rg::MahalanobisMetric::identity(a->dimension),
                rg::collinear_centers(axis, delta, rg::detail::kHalfSqrt3, a->harmonic),
                rg::CoefficientSequence::harmonic(a->harmonic).values());
    } else {
      f.emplace(rg::machine_from_file(a->path));
    }
    Json out;
    out["rkhs_norm_sq"] = rg::rkhs_norm_sq(*f);
    out["l1_norm"] = rg::l1_norm(f->coeffs());
    out["gram_min_eig"] = rg::gram_min_eigenvalue(rg::gram_matrix(f->metric(), f->centers()));
    print_record(out, g.format, "json");
  });
}

void add_rtv2(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("rtv2", "Second-order Radon-domain total variation");
  struct Args {
    std::string path;
    double tol = 1e-8;
    int resolution = 32;
    std::uint64_t seed = 0;
    std::string normalization = "paper";
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("machine", a->path, "Machine spec (JSON)")->required();
  cmd->add_option("--tol", a->tol, "Inner-integral tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--resolution", a->resolution, "Sphere rule resolution (d >= 3)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a->seed, "Monte Carlo seed (d >= 5)")->capture_default_str();
  cmd->add_option("--normalization", a->normalization, "paper or unit-amplitude")->capture_default_str()
      ->check(CLI::IsMember({"paper", "unit-amplitude"}));
  cmd->callback([a, &g] {
    const auto f = rg::machine_from_file(a->path);
    const auto norm = rg::parse_normalization(a->normalization);
    const auto rule = rg::sphere_rule(f.dim(), a->resolution, a->seed);
    const auto est = rg::rtv2(f, rule, a->tol, norm, {.threads = g.threads});
    Json out;
    out["value"] = est.value;
    out["error"] = est.quadrature_error;
    out["n_nodes"] = est.n_nodes;
    print_record(out, g.format, "json");
  });
}

void add_gap(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("gap", "Run the gap experiment and write a CSV");
  struct Args {
    std::string config;
    std::string out;
    std::string preset = "d1";
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("config", a->config, "Experiment config (JSON), overlaid on the preset");
  cmd->add_option("--out", a->out, "CSV output path")->required();
  cmd->add_option("--preset", a->preset, "Base configuration")->capture_default_str()
      ->check(CLI::IsMember({"d1", "d3"}));
  cmd->callback([a, &g] {
    auto base = a->preset == "d3" ? rg::preset_d3() : rg::preset_d1();
    auto config = a->config.empty() ? base : rg::gap_config_from_file(a->config, base);
    if (g.threads > 0) config.threads = g.threads;
    const auto rows = rg::run_gap_experiment(config);
    rg::emit_csv(rows, a->out);
    bool bounded = true;
    bool above_lower = true;
    for (const auto& r : rows) {
      bounded = bounded && r.rkhs_norm_sq <= r.rkhs_upper_bound;
      above_lower = above_lower && r.rtv2_value + 3.0 * r.rtv2_error >= r.rtv2_lower_bound;
    }
    std::cout << "gap d=" << config.d << " rows=" << rows.size() << " n=" << rows.front().n
              << ".." << rows.back().n << " rtv2 " << rg::format_double(rows.front().rtv2_value)
              << " -> " << rg::format_double(rows.back().rtv2_value) << " (x"
              << rg::format_double(rows.back().rtv2_value / rows.front().rtv2_value)
              << ") rkhs_bounded=" << (bounded ? "yes" : "no")
              << " above_lower_bound=" << (above_lower ? "yes" : "no") << " csv=" << a->out
              << '\n';
  });
}

void add_check_set(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("check-set", "Separation report for a set of centers");
  struct Args {
    std::string path;
    std::string beta;
    double delta = 0.0;
    std::optional<double> eta;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("machine", a->path, "Machine spec (JSON); only the centers are used")
      ->required();
  cmd->add_option("--beta", a->beta, "Unit direction, comma separated (default e_1)");
  cmd->add_option("--delta", a->delta, "Required separation")->required();
  cmd->add_option("--eta", a->eta, "Cone parameter; adds the all-directions check");
  cmd->callback([a, &g] {
    const auto f = rg::machine_from_file(a->path);
    rg::Vector beta = rg::Vector::Zero(f.dim());
    beta(0) = 1.0;
    if (!a->beta.empty()) {
      beta = to_vector(parse_list(a->beta, "--beta"));
      if (beta.size() != f.dim())
        throw rg::SpecError("--beta: expected " + std::to_string(f.dim()) + " components");
    }
    const auto r = a->eta ? rg::is_eta_separated(f.centers(), rg::ConeSpec(beta, *a->eta), a->delta)
                          : rg::is_beta_delta_separated(f.centers(), beta, a->delta);
    Json out;
    out["passes_beta_delta"] = r.passes_beta_delta;
    out["n"] = r.n;
    out["min_axis_margin"] = number_or_null(r.min_axis_margin);
    if (r.min_cone_margin) {
      out["passes_beta_delta_eta"] = *r.passes_beta_delta_eta;
      out["min_cone_margin"] = number_or_null(*r.min_cone_margin);
    }
    print_record(out, g.format, "json");
  });
}

void add_bound(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("bound", "Certified RTV^2 lower bound");
  struct Args {
    int dimension = 1;
    double eps = 0.5;
    double eta = rg::detail::kHalfSqrt3;
    std::size_t n = 0;
    double sigma = 1.0;
    std::string matrix;
    std::string alphas;
    std::string normalization = "paper";
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--dimension", a->dimension, "Odd dimension d")->capture_default_str();
  cmd->add_option("--eps", a->eps, "eps in (0, 1/2]")->capture_default_str();
  cmd->add_option("--eta", a->eta, "Cone parameter in [sqrt(3)/2, 1]")->capture_default_str();
  auto* o_n = cmd->add_option("--n", a->n, "Number of harmonic coefficients");
  auto* o_alpha = cmd->add_option("--alphas", a->alphas, "Explicit coefficients, comma separated");
  o_n->excludes(o_alpha);
  cmd->add_option("--sigma", a->sigma, "Kernel scale")->capture_default_str();
  cmd->add_option("--matrix", a->matrix, "M, row-major and comma separated (default identity)");
  cmd->add_option("--normalization", a->normalization, "paper or unit-amplitude")->capture_default_str()
      ->check(CLI::IsMember({"paper", "unit-amplitude"}));
  cmd->callback([a, o_n, o_alpha, &g] {
    if (!*o_n && !*o_alpha) throw CLI::RequiredError("--n or --alphas");
    const int d = a->dimension;
    if (d < 1) throw rg::SpecError("--dimension must be >= 1");
    rg::Matrix m = rg::Matrix::Identity(d, d);
    if (!a->matrix.empty()) {
      const auto flat = parse_list(a->matrix, "--matrix");
      if (flat.size() != static_cast<std::size_t>(d * d))
        throw rg::SpecError("--matrix: expected " + std::to_string(d * d) + " numbers");
      m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          flat.data(), d, d);
    }
    auto coeffs = *o_alpha ? rg::CoefficientSequence::explicit_list(parse_list(a->alphas, "--alphas"))
                           : rg::CoefficientSequence::harmonic(a->n);
    const std::size_t n = coeffs.size();
    auto in = rg::certified_inputs(rg::MahalanobisMetric::from_matrix(m, a->sigma), a->eps, a->eta,
                                   std::move(coeffs));
    in.normalization = rg::parse_normalization(a->normalization);
    const auto cert = rg::certify_preconditions(d, a->eps, a->eta);
    Json out;
    out["lower_bound"] = rg::rtv2_lower_bound(in, n);
    out["n"] = n;
    out["rho"] = cert.rho;
    out["delta_prime"] = cert.delta_prime;
    out["delta_zero"] = cert.delta_zero;
    out["delta"] = cert.delta;
    out["nearest_neighbor_tail"] = cert.nearest_neighbor_tail;
    out["certified"] = cert.inner_certified;
    for (const auto& w : rg::precondition_warnings(in)) std::cerr << "warning: " << w << '\n';
    print_record(out, g.format, "json");
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-kernel RKHS versus Radon-domain total variation", "radon-gap"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads,
                 "Worker threads for sphere nodes (default: RADON_GAP_THREADS, else 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "json, csv or plain (default depends on the subcommand)")
      ->check(CLI::IsMember({"auto", "json", "csv", "plain"}));
  add_hermite(app, g);
  add_rkhs(app, g);
  add_rtv2(app, g);
  add_gap(app, g);
  add_check_set(app, g);
  add_bound(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const rg::SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
