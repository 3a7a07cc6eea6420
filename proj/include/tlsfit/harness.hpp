// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tlsfit/model.hpp"
#include "tlsfit/noise.hpp"

namespace tlsfit {

/// One Monte-Carlo comparison sweep: models x noise levels x strategies,
/// `runs` independent traces per cell.
struct ExperimentConfig {
  std::vector<SystemParams> models;   // empty -> Table-1 defaults
  ModelKind kind = ModelKind::DephasingFID;
  int nt = 100;
  double horizon = 30.0;
  bool ld_sampling = false;           // low-discrepancy instead of uniform times
  std::vector<NoiseSpec> noise_sweep;
  std::vector<int> strategies;        // subset of {1, 2, 3}
  int runs = 100;
  std::uint64_t seed = 0;

  void validate() const;
  static ExperimentConfig defaults();  // Table 1, uniform 100 x [0,30], Gaussian sweep
};

/// Per-(model, noise, strategy) error statistics. e_* are mean relative
/// errors over the successful runs; bias/std are of the raw estimates.
struct ErrorStatsCell {
  int model_idx = 0;  // 1-based position in the model list
  double omega_true = 0.0;
  double gamma_true = 0.0;
  NoiseSpec noise;
  int strategy = 0;
  double e_omega = 0.0;
  double e_gamma = 0.0;
  double bias_omega = 0.0;
  double bias_gamma = 0.0;
  double std_omega = 0.0;
  double std_gamma = 0.0;
  int n_failed = 0;
};

struct ErrorStats {
  std::vector<ErrorStatsCell> cells;
};

/// Min / median / max of a cell field across models, at fixed noise+strategy.
struct Aggregate {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};
Aggregate aggregate_across_models(const ErrorStats& stats, const NoiseSpec& noise,
                                  int strategy, bool for_gamma);

/// Run the full sweep. Seeds derive from (master seed, model index, noise
/// content hash, run index), so cells are independent of sweep order and the
/// whole table reproduces bit-for-bit from the same config. Individual
/// strategy failures are recorded and excluded, never aborting the sweep.
ErrorStats run_comparison(const ExperimentConfig& config);

/// Fixed-width histogram of the estimates of one cell.
struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<int> counts;
};
struct EstimateHistograms {
  Histogram omega;
  Histogram gamma;
};
EstimateHistograms bias_histogram(const ExperimentConfig& config, int model_index,
                                  const NoiseSpec& noise, int strategy, int bins = 50);

enum class ResultFormat { Csv, Json };

/// CSV columns: model_idx, omega_true, gamma_true, noise_kind, noise_level,
/// strategy, e_omega, e_gamma, bias_omega, bias_gamma, n_failed. The JSON
/// form mirrors the same records.
void emit_results(const ErrorStats& stats, std::ostream& out, ResultFormat format);
void emit_results(const ErrorStats& stats, const std::string& path, ResultFormat format);
ErrorStats parse_results(std::istream& in, ResultFormat format);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

}  // namespace tlsfit
