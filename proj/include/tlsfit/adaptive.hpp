// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "tlsfit/likelihood.hpp"
#include "tlsfit/noise.hpp"
#include "tlsfit/rng.hpp"

namespace tlsfit {

enum class ScheduleOrigin { Uniform, LowDiscrepancy, TraceVariance };

struct SamplingSchedule {
  std::vector<double> times;  // sorted, no duplicates within 1e-9
  ScheduleOrigin origin = ScheduleOrigin::Uniform;
  int n0 = 0;
  int ni = 0;
  int iteration = 0;
};

/// Parameter guesses drawn from the current likelihood surface; uniform
/// weights after resampling.
struct PosteriorSamples {
  std::vector<std::pair<double, double>> params;  // (omega_j, gamma_j)
};

/// Pointwise mean of traces sharing one schedule. The result records how
/// many raw traces it aggregates. Throws on mismatched schedules.
MeasurementTrace average_traces(std::span<const MeasurementTrace> traces);

/// Draw j_samples parameter guesses from the likelihood evaluated on the
/// strategy-3 coarse grid: normalize exp(L - L_max) to a discrete
/// distribution over cells, sample cells with replacement, jitter uniformly
/// within each cell. Throws std::runtime_error when the surface is degenerate.
PosteriorSamples sample_posterior(const MeasurementTrace& trace, ModelKind kind,
                                  const Box& box, int j_samples, Rng& rng);

/// Predicted-trace variance heuristic: over the candidate times, compute
/// Var_j p(t; omega_j, gamma_j) and return the local maxima of the variance
/// curve (largest first, at most n1). Falls back to the global maximum when
/// no interior local maximum exists. Returned times always belong to
/// candidate_times.
std::vector<double> trace_variance_schedule(const PosteriorSamples& samples,
                                            ModelKind kind,
                                            std::span<const double> candidate_times,
                                            int n1);

/// Radical-inverse (van der Corput) sequence element n >= 1 in the given base.
double van_der_corput(std::uint64_t n, unsigned base = 2);

/// Low-discrepancy schedule after `iteration` refinement rounds: elements
/// 1 .. n0 + iteration*ni of the base-2 van der Corput sequence scaled to
/// [0, horizon], sorted. Prefixes are nested across iterations.
SamplingSchedule ld_schedule(int n0, int ni, int iteration, double horizon);

enum class RefineMethod { LdSampling, TraceVariance };

struct RefineConfig {
  RefineMethod method = RefineMethod::LdSampling;
  int iterations = 10;
  int ni = 8;              // new points per iteration (ld) / max per iteration (variance)
  int j_samples = 100;     // posterior guesses for the variance heuristic
  int n_candidates = 256;  // van der Corput candidate times over [0, horizon]
  double horizon = 30.0;
  Box box = default_search_box();
  std::uint64_t seed = 0;
};

/// Alternate estimation (strategy 3) with schedule extension by the chosen
/// method. `acquire` supplies measured values at requested times (a
/// simulation callback here; an instrument driver in the field). Returns one
/// FitResult per iteration, including iteration 0 on the initial schedule.
std::vector<FitResult> refine_loop(
    const SamplingSchedule& initial, ModelKind kind,
    const std::function<MeasurementTrace(const std::vector<double>&)>& acquire,
    const RefineConfig& config);

}  // namespace tlsfit
