// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tlsfit/model.hpp"
#include "tlsfit/rng.hpp"

namespace tlsfit {

/// Measurement-noise description: ensemble (Gaussian), single-shot
/// (projection, ne repetitions per data point), or none.
struct NoiseSpec {
  enum class Kind { None, Gaussian, Projection };

  Kind kind = Kind::None;
  double sigma = 0.0;  // Gaussian standard deviation
  int ne = 0;          // projection repetitions per data point

  static NoiseSpec none() { return {}; }
  static NoiseSpec gaussian(double sigma);
  static NoiseSpec projection(int ne);

  void validate() const;
  bool operator==(const NoiseSpec&) const = default;

  /// Stable content hash, used for order-independent seed derivation.
  std::uint64_t content_hash() const;
};

std::string to_string(NoiseSpec::Kind kind);

/// A simulated (or measured) trace: strictly increasing sample times with
/// one measured value each, plus the noise model and RNG seed that produced
/// it. n_averaged counts how many raw traces were averaged into this one.
struct MeasurementTrace {
  std::vector<double> times;
  std::vector<double> values;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  int n_averaged = 1;
};

/// Uniform sampling schedule t_k = k T / nt, k = 0 .. nt-1.
std::vector<double> uniform_schedule(int nt, double horizon);

/// Asymptotic Gaussian noise scale sqrt(loglog(ne) / (2 ne)) for an ensemble
/// of ne copies. Requires ne >= 16 so that loglog(ne) >= 1.
double gaussian_sigma_from_ensemble(int ne);

/// Fraction of ne uniform draws below (1+p)/2: the single-shot estimate of
/// the outcome-1 probability for expectation value p.
double projection_sample(double p, int ne, Rng& rng);

/// Simulate one trace. Same (params, kind, times, noise, seed) always yields
/// a bit-identical trace. Projection data are mapped back to the expectation
/// scale, d = 2 p1 - 1, so every estimator consumes one trace format.
MeasurementTrace simulate_trace(const SystemParams& params, ModelKind kind,
                                std::span<const double> times,
                                const NoiseSpec& noise, std::uint64_t seed);

// --- serialization ---
void write_trace_csv(const MeasurementTrace& trace, std::ostream& out);  // header "t,d"
MeasurementTrace read_trace_csv(std::istream& in);
std::string trace_to_json(const MeasurementTrace& trace);
MeasurementTrace trace_from_json(const std::string& text);

}  // namespace tlsfit
