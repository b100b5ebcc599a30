#include "radon_gap/experiments.hpp"
#include "radon_gap/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rg = radon_gap;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 4.0 * std::exp(-0.5), 1e-300, -2.5, 0.0}) {
    const auto s = rg::format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(rg::format_double(-1.0), "-1");
}

TEST(EmitCsv, HeaderOnlyAndRows) {
  const auto empty = temp_path("radon_gap_empty.csv");
  rg::emit_csv({}, empty);
  EXPECT_EQ(slurp(empty), std::string(rg::kGapCsvHeader) + "\n");

  std::vector<rg::GapExperimentRow> rows(3);
  for (std::size_t i = 0; i < 3; ++i) rows[i].n = i + 1;
  const auto three = temp_path("radon_gap_three.csv");
  rg::emit_csv(rows, three);
  const auto text = slurp(three);
  EXPECT_EQ(count_lines(text), 4);
  EXPECT_NE(text.find("\n2,0,0,0,0,0,0\n"), std::string::npos);
  std::remove(empty.c_str());
  std::remove(three.c_str());
}

TEST(EmitCsv, ReportsPathOnFailure) {
  try {
    rg::emit_csv({}, "/nonexistent-dir/x.csv");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
}

TEST(GapExperiment, D1Signature) {
  const auto rows = rg::run_gap_experiment(rg::preset_d1());
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    EXPECT_LE(r.rkhs_norm_sq, r.rkhs_upper_bound);
    EXPECT_GE(r.rtv2_value + 3.0 * r.rtv2_error, r.rtv2_lower_bound);
    if (i > 0) {
      EXPECT_GT(r.rtv2_value, rows[i - 1].rtv2_value);
      EXPECT_GT(r.rkhs_norm_sq, rows[i - 1].rkhs_norm_sq);
      EXPECT_GT(r.l1_norm, rows[i - 1].l1_norm);
    }
  }
  EXPECT_GE(rows.back().rtv2_value / rows.front().rtv2_value, 2.0);
}

TEST(GapExperiment, DeterministicCsv) {
  auto config = rg::preset_d1();
  config.n_list = {1, 3, 9};
  EXPECT_EQ(rg::to_csv(rg::run_gap_experiment(config)), rg::to_csv(rg::run_gap_experiment(config)));
  config.threads = 3;
  const auto threaded = rg::to_csv(rg::run_gap_experiment(config));
  config.threads = 1;
  EXPECT_EQ(threaded, rg::to_csv(rg::run_gap_experiment(config)));
}

TEST(GapExperiment, ValidationErrors) {
  auto c = rg::preset_d1();
  c.d = 2;
  EXPECT_THROW(rg::run_gap_experiment(c), std::domain_error);
  c = rg::preset_d1();
  c.n_list = {4, 2};
  EXPECT_THROW(rg::run_gap_experiment(c), std::invalid_argument);
  c = rg::preset_d1();
  c.n_list.clear();
  EXPECT_THROW(rg::run_gap_experiment(c), std::invalid_argument);
  c = rg::preset_d1();
  c.eps = 0.7;
  EXPECT_THROW(rg::run_gap_experiment(c), std::invalid_argument);
  c = rg::preset_d1();
  c.eta0 = 0.8;
  EXPECT_THROW(rg::run_gap_experiment(c), std::invalid_argument);
}

TEST(Presets, Fields) {
  const auto d1 = rg::preset_d1();
  EXPECT_EQ(d1.d, 1);
  EXPECT_EQ(d1.eps, 0.5);
  EXPECT_EQ(d1.inner_tol, 1e-8);
  EXPECT_EQ(d1.n_list, (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64}));
  EXPECT_EQ(d1.normalization, rg::Normalization::paper);
  const auto d3 = rg::preset_d3();
  EXPECT_EQ(d3.d, 3);
  EXPECT_EQ(d3.n_list.back(), 16u);
}

TEST(MachineJson, ParsesFlatAndNestedMetric) {
  const auto f = rg::machine_from_json(
      R"({"dimension": 2, "sigma": 2, "M": [[4, 0], [0, 1]], "centers": [[0, 0], [1, 2]], "alphas": [1, -0.5]})");
  EXPECT_EQ(f.dim(), 2);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_DOUBLE_EQ(f.metric().effective()(0, 0), 1.0);
  const auto g = rg::machine_from_json(
      R"({"dimension": 2, "sigma": 2, "M": [4, 0, 0, 1], "centers": [[0, 0], [1, 2]], "alphas": [1, -0.5]})");
  EXPECT_EQ(g.metric().effective(), f.metric().effective());
  const auto h = rg::machine_from_json(R"({"dimension": 1, "centers": [[0]], "alphas": [2]})");
  EXPECT_EQ(h.metric().effective()(0, 0), 1.0);
}

TEST(MachineJson, Diagnostics) {
  auto message = [](const std::string& text) {
    try {
      rg::machine_from_json(text);
    } catch (const rg::SpecError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("{").find("parse error"), std::string::npos);
  EXPECT_NE(message(R"({"centers": [[0]], "alphas": [1]})").find("dimension"), std::string::npos);
  EXPECT_NE(message(R"({"dimension": 1, "centers": [[0]], "alphas": [1, 2]})").find("alphas"),
            std::string::npos);
  EXPECT_NE(message(R"({"dimension": 2, "centers": [[0]], "alphas": [1]})").find("centers[0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"dimension": 1, "centers": [[0]], "alphas": [1], "bogus": 1})").find("bogus"),
            std::string::npos);
  EXPECT_NE(message(R"({"dimension": 1, "centers": [["a"]], "alphas": [1]})").find("centers[0][0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"dimension": 2, "M": [1, 0, 0], "centers": [[0, 0]], "alphas": [1]})").find("'M'"),
            std::string::npos);
  EXPECT_THROW(rg::machine_from_json(
                   R"({"dimension": 2, "M": [1, 2, 2, 1], "centers": [[0, 0]], "alphas": [1]})"),
               std::domain_error);
  EXPECT_THROW(rg::machine_from_file("/nonexistent/machine.json"), rg::SpecError);
}

TEST(GapConfigJson, OverlaysFields) {
  const auto c = rg::gap_config_from_json(
      R"({"d": 3, "n_list": [1, 2], "normalization": "unit-amplitude", "resolution": 8, "seed": 5})");
  EXPECT_EQ(c.d, 3);
  EXPECT_EQ(c.n_list, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(c.normalization, rg::Normalization::unit_amplitude);
  EXPECT_EQ(c.resolution, 8);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.eps, 0.5);
  EXPECT_THROW(rg::gap_config_from_json(R"({"normalization": "other"})"), rg::SpecError);
  EXPECT_THROW(rg::gap_config_from_json(R"({"n_list": [0]})"), rg::SpecError);
  EXPECT_THROW(rg::gap_config_from_json(R"({"eps": "x"})"), rg::SpecError);
  EXPECT_THROW(rg::gap_config_from_json(R"([1, 2])"), rg::SpecError);
}
