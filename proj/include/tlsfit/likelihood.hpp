// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlsfit/model.hpp"
#include "tlsfit/noise.hpp"
#include "tlsfit/optim.hpp"

namespace tlsfit {

inline constexpr int kBasisSize = 2;  // m_b

/// Orthonormalized projection of a data vector onto the two basis functions.
/// H has orthonormal rows spanning the rows of G; h = H d.
struct BasisProjection {
  std::array<std::vector<double>, 2> g;  // G rows, basis values at sample times
  std::array<std::vector<double>, 2> h_rows;
  std::array<double, 2> h{};             // projected data
};

/// Eigendecompose G G^T = E diag(a) E^T and form H = diag(a^-1/2) E^T G.
/// Throws std::domain_error when G G^T is numerically singular (smallest
/// eigenvalue below 1e-12 of the largest), e.g. when gamma T << 1 makes both
/// basis rows near-constant.
BasisProjection orthonormal_projection(const std::array<std::vector<double>, 2>& g,
                                       std::span<const double> d);

/// Marginalized log-likelihood of (omega, gamma) given the trace,
///   L = (m_b - N_t)/2 * log[ max(1e-15, 1 - m_b <h^2> / (N_t <d^2>)) ],
/// with amplitudes and noise scale integrated out. The 1e-15 floor keeps the
/// noiseless case finite (the argument reaches exactly 0 there) without
/// moving the argmax.
double log_likelihood(double omega, double gamma, const MeasurementTrace& trace,
                      ModelKind kind);
double log_likelihood(double omega, double gamma, std::span<const double> times,
                      std::span<const double> values, ModelKind kind);

inline Box default_search_box() { return Box{{0.05, 0.001}, {3.0, 1.0}}; }

/// FWHM-derived uncertainties of a log-likelihood peak. Each axis is scanned
/// from the maximum in both directions (adaptive doubling from 1e-4, then
/// bisection to 1e-6) for the points where exp(L) falls to half of
/// exp(L_max); the reported value is conversion_factor times the full width.
/// saturated_* flags a half-max point outside the search box (the box edge
/// distance is used instead).
struct FwhmUncertainty {
  double d_omega = 0.0;
  double d_gamma = 0.0;
  bool saturated_omega = false;
  bool saturated_gamma = false;
};

inline constexpr double kFwhmConversionFactor = 2.3548200450309493;  // 2 sqrt(2 ln 2)

FwhmUncertainty fwhm_uncertainty(const std::function<double(double, double)>& log_l,
                                 double omega_hat, double gamma_hat, const Box& box,
                                 double conversion_factor = kFwhmConversionFactor);

/// Point estimates and diagnostics from the maximum-likelihood fit.
struct FitResult {
  double omega = 0.0;
  double gamma = 0.0;
  double log_l_max = 0.0;
  double sigma_est = 0.0;
  std::array<double, 2> alpha{};  // basis amplitudes at the optimum
  double d_omega = 0.0;           // FWHM-derived uncertainties
  double d_gamma = 0.0;
  bool saturated_omega = false;
  bool saturated_gamma = false;
  std::optional<double> theta_i_est;
  std::optional<double> theta_m_est;
};

/// Strategy 3: maximize the marginalized log-likelihood over the search box
/// (60x40 coarse grid, then Nelder-Mead over the full box plus a small-simplex
/// restart) and fill in noise, amplitude, angle and uncertainty estimates.
/// Throws std::runtime_error if every grid evaluation is degenerate.
FitResult strategy3(const MeasurementTrace& trace, ModelKind kind,
                    const Box& search_box = default_search_box());

/// Residual noise scale sqrt((N_t <d^2> - m_b <h^2>) / (N_t - m_b - 2)),
/// clamped at zero. Requires N_t > m_b + 2.
double estimate_noise_sigma(const BasisProjection& projection, std::span<const double> d);

/// Least-squares amplitudes (alpha1, alpha2) of the basis functions at the
/// given parameter point (normal equations on G).
std::array<double, 2> estimate_amplitudes(double omega, double gamma,
                                          const MeasurementTrace& trace, ModelKind kind);

/// Invert the amplitudes for the initialization/measurement angles.
///   fid : theta_I/M = [arccos(a1 - a2) +/- arccos(a1 + a2)] / 2
///   rabi: same with (a2 - a1) and (a2 + a1) as the arccos arguments.
/// Arguments are clamped into [-1, 1] when within tol of it; beyond that the
/// fit is untrustworthy and std::domain_error is thrown.
std::pair<double, double> angles_from_alphas(double alpha1, double alpha2, ModelKind kind,
                                             double tol = 0.05);

std::string fit_to_json(const FitResult& fit);  // NaN encoded as null

}  // namespace tlsfit
