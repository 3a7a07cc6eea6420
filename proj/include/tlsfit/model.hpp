// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <utility>

namespace tlsfit {

/// The two signal models: free-induction decay with dephasing in the
/// Hamiltonian basis, and a resonantly driven Rabi oscillation with
/// dephasing transverse to the drive.
enum class ModelKind { DephasingFID, DrivenRabi };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);  // "fid" | "rabi"

/// Ground-truth system parameters, all dimensionless (frequencies and rates
/// in units of the reference frequency, times in its inverse).
/// For DrivenRabi, omega is the Rabi frequency of the drive.
struct SystemParams {
  double omega = 1.0;
  double gamma = 0.1;
  double theta_i = 1.5707963267948966;  // initialization angle
  double theta_m = 1.5707963267948966;  // measurement axis angle

  void validate() const;  // throws std::invalid_argument
};

struct ModelEntry {
  double omega;
  double gamma;
};

/// The ten benchmark (omega, gamma) pairs used throughout the comparison
/// experiments. Compiled-in fixture; defines the regression baseline.
std::span<const ModelEntry, 10> builtin_models();

/// Oscillatory factor of the driven-Rabi signal. With w2 = Omega^2 - gamma^2/4:
///   w2 > 0:  exp(-gamma t/2) [cos(w t) + (gamma/2w) sin(w t)],  w = sqrt(w2)
///   w2 < 0:  same with cosh/sinh of |w|
///   |w2| <= 1e-10: the analytic continuation limit exp(-gamma t/2)(1 + gamma t/2),
/// the branch tolerance avoiding cancellation in sin(w t)/w near w = 0.
double phi_x3(double omega_rabi, double gamma, double t);

/// Ideal (noiseless) measurement expectation value at time t, in [-1, 1].
double ideal_signal(const SystemParams& params, ModelKind kind, double t);

/// The two basis functions spanning the signal family:
///   fid : g1 = 1,             g2 = exp(-gamma t) cos(omega t)
///   rabi: g1 = exp(-gamma t), g2 = phi_x3(omega, gamma, t)
std::pair<std::function<double(double)>, std::function<double(double)>>
basis_functions(ModelKind kind, double omega, double gamma);

/// Fast path for the likelihood hot loop: fills g1/g2 at all sample times.
void eval_basis(ModelKind kind, double omega, double gamma,
                std::span<const double> times, double* g1, double* g2);

}  // namespace tlsfit
