// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "tlsfit/harness.hpp"

using namespace tlsfit;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.models = {SystemParams{1.0, 0.1, kPi / 2, kPi / 2},
                SystemParams{0.9, 0.1, kPi / 2, kPi / 2}};
  cfg.noise_sweep = {NoiseSpec::gaussian(0.05), NoiseSpec::projection(100)};
  cfg.strategies = {1, 2, 3};
  cfg.runs = 5;
  cfg.seed = 99;
  return cfg;
}

bool cells_equal(const ErrorStatsCell& a, const ErrorStatsCell& b) {
  auto same = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  return a.model_idx == b.model_idx && same(a.omega_true, b.omega_true) &&
         same(a.gamma_true, b.gamma_true) && a.noise == b.noise &&
         a.strategy == b.strategy && same(a.e_omega, b.e_omega) &&
         same(a.e_gamma, b.e_gamma) && same(a.bias_omega, b.bias_omega) &&
         same(a.bias_gamma, b.bias_gamma) && a.n_failed == b.n_failed;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("same master seed reproduces the table bit-for-bit") {
  const auto cfg = small_config();
  const auto a = run_comparison(cfg);
  const auto b = run_comparison(cfg);
  REQUIRE(a.cells.size() == b.cells.size());
  REQUIRE(a.cells.size() == 2 * 2 * 3);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(cells_equal(a.cells[i], b.cells[i]));
    CHECK(a.cells[i].std_omega == b.cells[i].std_omega);
  }
}

TEST_CASE("cells are independent of the sweep order") {
  auto cfg = small_config();
  const auto forward = run_comparison(cfg);
  std::swap(cfg.noise_sweep[0], cfg.noise_sweep[1]);
  const auto reversed = run_comparison(cfg);

  for (const auto& cell : forward.cells) {
    bool found = false;
    for (const auto& other : reversed.cells) {
      if (other.model_idx == cell.model_idx && other.noise == cell.noise &&
          other.strategy == cell.strategy) {
        CHECK(cells_equal(cell, other));
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("noiseless cell recovers exactly for strategy 3") {
  ExperimentConfig cfg;
  cfg.models = {SystemParams{1.0, 0.1, kPi / 2, kPi / 2}};
  cfg.noise_sweep = {NoiseSpec::none()};
  cfg.strategies = {3};
  cfg.runs = 2;
  const auto stats = run_comparison(cfg);
  REQUIRE(stats.cells.size() == 1);
  CHECK(stats.cells[0].e_omega < 1e-6);
  CHECK(stats.cells[0].e_gamma < 1e-6);
  CHECK(stats.cells[0].n_failed == 0);
}

TEST_CASE("defaults use the builtin table") {
  const auto cfg = ExperimentConfig::defaults();
  CHECK(cfg.models.size() == 10);
  CHECK(cfg.noise_sweep.size() == 6);
  CHECK(cfg.models[6].omega == doctest::Approx(0.2218));
}

TEST_CASE("empty stats emit a header-only csv") {
  std::stringstream ss;
  emit_results(ErrorStats{}, ss, ResultFormat::Csv);
  CHECK(ss.str() ==
        "model_idx,omega_true,gamma_true,noise_kind,noise_level,strategy,"
        "e_omega,e_gamma,bias_omega,bias_gamma,n_failed\n");
}

TEST_CASE("one cell emits one row") {
  ErrorStats stats;
  ErrorStatsCell cell;
  cell.model_idx = 3;
  cell.omega_true = 0.5003;
  cell.gamma_true = 0.1243;
  cell.noise = NoiseSpec::gaussian(0.05);
  cell.strategy = 2;
  cell.e_omega = 0.01;
  cell.e_gamma = 0.1;
  cell.bias_omega = -0.001;
  cell.bias_gamma = 0.009;
  cell.n_failed = 1;
  stats.cells.push_back(cell);
  std::stringstream ss;
  emit_results(stats, ss, ResultFormat::Csv);
  int rows = 0;
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 1);
}

TEST_CASE("csv and json round trips") {
  const auto cfg = small_config();
  const auto stats = run_comparison(cfg);
  for (ResultFormat fmt : {ResultFormat::Csv, ResultFormat::Json}) {
    std::stringstream ss;
    emit_results(stats, ss, fmt);
    const auto back = parse_results(ss, fmt);
    REQUIRE(back.cells.size() == stats.cells.size());
    for (std::size_t i = 0; i < stats.cells.size(); ++i)
      CHECK(cells_equal(stats.cells[i], back.cells[i]));
  }
}

TEST_CASE("aggregate across models picks min/median/max") {
  ErrorStats stats;
  for (int m = 1; m <= 3; ++m) {
    ErrorStatsCell cell;
    cell.model_idx = m;
    cell.noise = NoiseSpec::gaussian(0.05);
    cell.strategy = 3;
    cell.e_omega = 0.01 * m;
    cell.e_gamma = 0.1 * m;
    stats.cells.push_back(cell);
  }
  const auto agg = aggregate_across_models(stats, NoiseSpec::gaussian(0.05), 3, false);
  CHECK(agg.min == doctest::Approx(0.01));
  CHECK(agg.median == doctest::Approx(0.02));
  CHECK(agg.max == doctest::Approx(0.03));
  CHECK_THROWS_AS(aggregate_across_models(stats, NoiseSpec::gaussian(0.9), 3, false),
                  std::invalid_argument);
}

TEST_CASE("delta-distributed estimates occupy a single bin") {
  ExperimentConfig cfg;
  cfg.models = {SystemParams{1.0, 0.1, kPi / 2, kPi / 2}};
  cfg.noise_sweep = {NoiseSpec::none()};
  cfg.strategies = {3};
  cfg.runs = 100;  // identical noiseless traces -> identical estimates
  const auto hist = bias_histogram(cfg, 1, NoiseSpec::none(), 3, 20);
  int occupied = 0, total = 0;
  for (int c : hist.omega.counts) {
    if (c > 0) ++occupied;
    total += c;
  }
  CHECK(occupied == 1);
  CHECK(total == 100);
}

TEST_CASE("config json round trip") {
  auto cfg = small_config();
  cfg.kind = ModelKind::DrivenRabi;
  cfg.ld_sampling = true;
  const auto back = config_from_json(config_to_json(cfg));
  CHECK(back.models.size() == cfg.models.size());
  CHECK(back.kind == cfg.kind);
  CHECK(back.nt == cfg.nt);
  CHECK(back.horizon == cfg.horizon);
  CHECK(back.ld_sampling == cfg.ld_sampling);
  CHECK(back.noise_sweep == cfg.noise_sweep);
  CHECK(back.strategies == cfg.strategies);
  CHECK(back.runs == cfg.runs);
  CHECK(back.seed == cfg.seed);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.noise_sweep = {NoiseSpec::none()};
  cfg.strategies = {4};
  cfg.models = {SystemParams{1.0, 0.1}};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.strategies = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.strategies = {3};
  cfg.runs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

}  // TEST_SUITE
