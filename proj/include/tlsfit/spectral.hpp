// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "tlsfit/noise.hpp"

namespace tlsfit {

enum class SpectrumKind { DiscreteFFT, ContinuousTrapezoid };

struct Spectrum {
  std::vector<double> freqs;                 // angular frequencies, increasing
  std::vector<std::complex<double>> values;  // complex amplitudes
  SpectrumKind kind = SpectrumKind::ContinuousTrapezoid;
};

/// Fourier peak summary: location and height of the power-spectrum maximum
/// plus the half-width-at-half-maximum d of |F| (the full width is 2d).
struct PeakInfo {
  double omega_star = 0.0;
  double p_star = 0.0;
  double d = 0.0;
};

/// d' = (d - mean(d)) / max|d - mean(d)|. Removes the constant signal
/// component so it cannot masquerade as a zero-frequency peak.
/// Throws std::invalid_argument when all values are equal.
std::vector<double> center_rescale(std::span<const double> values);

/// Plain DFT of a uniformly sampled record, F(k) = sum_n d'_n
/// e^{-2 pi i (k-1)(n-1)/N}, with bin k mapped to angular frequency
/// 2 pi (k-1) / (N dt). Throws std::invalid_argument for non-uniform
/// schedules (use continuous_ft for those).
Spectrum dft(std::span<const double> rescaled, std::span<const double> times);

/// Trapezoidal approximation of the continuous transform on an arbitrary
/// frequency grid: F(w) = sum_n d'_n e^{i w t_n} (dt_n + dt_{n-1})/2 with
/// dt_0 = dt_N = 0.
Spectrum continuous_ft(std::span<const double> rescaled, std::span<const double> times,
                       std::span<const double> omega_grid);

/// Default analysis grid: npts points uniform on (0, pi nt / horizon],
/// oversampling the DFT bin spacing by roughly 10x.
std::vector<double> default_omega_grid(int nt, double horizon, int npts = 2048);

/// Peak of |F|^2 over the positive-frequency entries, with the half-maximum
/// span of |F|. Multi-peak spectra are not detected: the global half-max set
/// is used, so distorted or split peaks inflate d (a known failure mode of
/// the width-based estimate on very noisy data).
PeakInfo locate_peak(const Spectrum& spectrum);

/// Analytic peak of the power spectrum of exp(-gamma t) cos(omega0 t), t>=0:
///   omega*^2 = omega0 sqrt(4 gamma^2 + omega0^2) - gamma^2
///   P*       = (omega0^2 + omega*^2 + gamma^2) / (8 gamma^2 omega0^2)
///   d        = sqrt(omega*^2 + 2 sqrt(3) gamma sqrt(omega*^2 + gamma^2)) - omega*
/// Throws std::domain_error when no real peak exists (gamma too large).
PeakInfo closed_form_peak(double omega0, double gamma);

/// |E1| + |E2| residual used by strategy 1; zero exactly at the parameters
/// that produce the given peak.
double strategy1_objective(const PeakInfo& peak, double omega0, double gamma);

/// Strategy 1: invert (omega*, P*) by minimizing |E1| + |E2| with Nelder-Mead
/// from the analytic starting point.
std::pair<double, double> strategy1(const PeakInfo& peak);

/// Strategy 2: invert (omega*, d). gamma comes from the exact algebraic
/// inverse of the d-expression; omega0 from the exact inverse of the peak
/// condition, omega0^2 = sqrt(4 gamma^4 + (omega*^2 + gamma^2)^2) - 2 gamma^2.
std::pair<double, double> strategy2(const PeakInfo& peak);

/// Trace-level pipelines: center_rescale -> trapezoid FT on the default grid
/// -> locate_peak -> strategy.
PeakInfo trace_peak(const MeasurementTrace& trace);
std::pair<double, double> estimate_strategy1(const MeasurementTrace& trace);
std::pair<double, double> estimate_strategy2(const MeasurementTrace& trace);

void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out);  // omega,re,im,power

}  // namespace tlsfit
