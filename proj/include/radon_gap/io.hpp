#pragma once

// JSON documents: machine specs and gap-experiment configs.
//
// Machine spec:
//   { "dimension": d, "sigma": s, "M": [...], "centers": [[...], ...], "alphas": [...] }
// M is optional (identity) and may be a flat row-major array of d*d numbers
// or a d x d nested array. sigma defaults to 1.
//
// Gap config: the GapExperimentConfig field names; every field is optional
// and defaults to the d = 1 preset.

#include "radon_gap/experiments.hpp"
#include "radon_gap/kernel.hpp"
#include "radon_gap/radon.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radon_gap {

/// A malformed input document; `what()` names the offending field or the
/// parse position.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using Json = nlohmann::json;

inline Json parse_document(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SpecError(source + ": " + e.what());
  }
}

inline void reject_unknown(const Json& doc, std::initializer_list<const char*> known,
                           const std::string& source) {
  if (!doc.is_object()) throw SpecError(source + ": top level must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw SpecError(source + ": unknown field '" + key + "'");
  }
}

inline double number_at(const Json& v, const std::string& field) {
  if (!v.is_number()) throw SpecError("field '" + field + "': expected a number");
  return v.get<double>();
}

inline long long integer_at(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) throw SpecError("field '" + field + "': expected an integer");
  return v.get<long long>();
}

inline std::vector<double> numbers_at(const Json& v, const std::string& field) {
  if (!v.is_array()) throw SpecError("field '" + field + "': expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number_at(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline Matrix matrix_at(const Json& v, int d, const std::string& field) {
  Matrix m(d, d);
  if (!v.is_array()) throw SpecError("field '" + field + "': expected an array");
  if (v.size() == static_cast<std::size_t>(d) && d > 0 && v[0].is_array()) {
    for (int i = 0; i < d; ++i) {
      const auto row = numbers_at(v[static_cast<std::size_t>(i)],
                                  field + "[" + std::to_string(i) + "]");
      if (row.size() != static_cast<std::size_t>(d))
        throw SpecError("field '" + field + "[" + std::to_string(i) + "]': expected " +
                        std::to_string(d) + " numbers, got " + std::to_string(row.size()));
      for (int j = 0; j < d; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
  }
  const auto flat = numbers_at(v, field);
  if (flat.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d))
    throw SpecError("field '" + field + "': expected " + std::to_string(d * d) +
                    " numbers (row-major), got " + std::to_string(flat.size()));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = flat[static_cast<std::size_t>(i * d + j)];
  return m;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline Normalization parse_normalization(const std::string& s) {
  if (s == "paper") return Normalization::paper;
  if (s == "unit-amplitude") return Normalization::unit_amplitude;
  throw SpecError("normalization must be 'paper' or 'unit-amplitude', got '" + s + "'");
}

inline const char* to_string(Normalization n) {
  return n == Normalization::paper ? "paper" : "unit-amplitude";
}

/// Parses a machine spec. Shape problems raise SpecError; an asymmetric or
/// indefinite M raises std::domain_error from the metric.
inline KernelMachine machine_from_json(const std::string& text,
                                       const std::string& source = "machine spec") {
  const auto doc = detail::parse_document(text, source);
  detail::reject_unknown(doc, {"dimension", "sigma", "M", "centers", "alphas"}, source);
  if (!doc.contains("dimension")) throw SpecError(source + ": missing field 'dimension'");
  const auto d = detail::integer_at(doc["dimension"], "dimension");
  if (d < 1) throw SpecError("field 'dimension': must be >= 1");
  const int dim = static_cast<int>(d);
  const double sigma = doc.contains("sigma") ? detail::number_at(doc["sigma"], "sigma") : 1.0;
  if (!(sigma > 0.0)) throw SpecError("field 'sigma': must be > 0");
  const Matrix m = doc.contains("M") ? detail::matrix_at(doc["M"], dim, "M")
                                     : Matrix::Identity(dim, dim);

  if (!doc.contains("centers")) throw SpecError(source + ": missing field 'centers'");
  if (!doc.contains("alphas")) throw SpecError(source + ": missing field 'alphas'");
  const auto& cs = doc["centers"];
  if (!cs.is_array() || cs.empty())
    throw SpecError("field 'centers': expected a non-empty array of points");
  std::vector<Vector> centers;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string field = "centers[" + std::to_string(i) + "]";
    const auto x = detail::numbers_at(cs[i], field);
    if (x.size() != static_cast<std::size_t>(dim))
      throw SpecError("field '" + field + "': expected " + std::to_string(dim) +
                      " coordinates, got " + std::to_string(x.size()));
    centers.emplace_back(Eigen::Map<const Vector>(x.data(), dim));
  }
  auto alphas = detail::numbers_at(doc["alphas"], "alphas");
  if (alphas.size() != centers.size())
    throw SpecError("field 'alphas': expected " + std::to_string(centers.size()) +
                    " coefficients (one per center), got " + std::to_string(alphas.size()));
  return {MahalanobisMetric::from_matrix(m, sigma), std::move(centers), std::move(alphas)};
}

inline KernelMachine machine_from_file(const std::string& path) {
  return machine_from_json(detail::read_file(path), path);
}

/// Overlays the fields present in `text` on `base`.
inline GapExperimentConfig gap_config_from_json(const std::string& text,
                                                GapExperimentConfig base = preset_d1(),
                                                const std::string& source = "gap config") {
  const auto doc = detail::parse_document(text, source);
  detail::reject_unknown(doc,
                         {"d", "eps", "eta", "eta0", "n_list", "M", "sigma", "inner_tol",
                          "resolution", "seed", "normalization", "threads"},
                         source);
  GapExperimentConfig c = std::move(base);
  if (doc.contains("d")) {
    c.d = static_cast<int>(detail::integer_at(doc["d"], "d"));
    if (c.d < 1) throw SpecError("field 'd': must be >= 1");
  }
  if (doc.contains("eps")) c.eps = detail::number_at(doc["eps"], "eps");
  if (doc.contains("eta")) c.eta = detail::number_at(doc["eta"], "eta");
  if (doc.contains("eta0")) c.eta0 = detail::number_at(doc["eta0"], "eta0");
  if (doc.contains("n_list")) {
    const auto& v = doc["n_list"];
    if (!v.is_array()) throw SpecError("field 'n_list': expected an array of integers");
    c.n_list.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto n = detail::integer_at(v[i], "n_list[" + std::to_string(i) + "]");
      if (n < 1) throw SpecError("field 'n_list[" + std::to_string(i) + "]': must be >= 1");
      c.n_list.push_back(static_cast<std::size_t>(n));
    }
  }
  if (doc.contains("M")) c.M = detail::matrix_at(doc["M"], c.d, "M");
  if (doc.contains("sigma")) c.sigma = detail::number_at(doc["sigma"], "sigma");
  if (doc.contains("inner_tol")) c.inner_tol = detail::number_at(doc["inner_tol"], "inner_tol");
  if (doc.contains("resolution"))
    c.resolution = static_cast<int>(detail::integer_at(doc["resolution"], "resolution"));
  if (doc.contains("seed")) {
    const auto s = detail::integer_at(doc["seed"], "seed");
    if (s < 0) throw SpecError("field 'seed': must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (doc.contains("normalization")) {
    if (!doc["normalization"].is_string())
      throw SpecError("field 'normalization': expected a string");
    c.normalization = parse_normalization(doc["normalization"].get<std::string>());
  }
  if (doc.contains("threads"))
    c.threads = static_cast<int>(detail::integer_at(doc["threads"], "threads"));
  return c;
}

inline GapExperimentConfig gap_config_from_file(const std::string& path,
                                                GapExperimentConfig base = preset_d1()) {
  return gap_config_from_json(detail::read_file(path), std::move(base), path);
}

}  // namespace radon_gap
