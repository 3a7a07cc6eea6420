// SPDX-License-Identifier: Apache-2.0
#include "tlsfit/model.hpp"

#include <cmath>
#include <stdexcept>

namespace tlsfit {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kBranchTol = 1e-10;  // |w^2| below this uses the series limit
}  // namespace

std::string to_string(ModelKind kind) {
  return kind == ModelKind::DephasingFID ? "fid" : "rabi";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "fid") return ModelKind::DephasingFID;
  if (name == "rabi") return ModelKind::DrivenRabi;
  throw std::invalid_argument("unknown model kind '" + name + "' (expected fid|rabi)");
}

void SystemParams::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (theta_i < 0.0 || theta_i > kPi) throw std::invalid_argument("theta_i outside [0, pi]");
  if (theta_m < 0.0 || theta_m > kPi) throw std::invalid_argument("theta_m outside [0, pi]");
}

std::span<const ModelEntry, 10> builtin_models() {
  static constexpr std::array<ModelEntry, 10> kModels{{
      {1.0000, 0.1000},
      {0.9000, 0.1000},
      {0.5003, 0.1243},
      {0.7304, 0.1875},
      {1.2161, 0.2031},
      {1.6211, 0.0993},
      {0.2218, 0.1234},
      {1.5195, 0.0751},
      {0.7551, 0.0533},
      {0.8029, 0.1921},
  }};
  return std::span<const ModelEntry, 10>(kModels);
}

double phi_x3(double omega_rabi, double gamma, double t) {
  const double w2 = omega_rabi * omega_rabi - 0.25 * gamma * gamma;
  const double env = std::exp(-0.5 * gamma * t);
  if (std::abs(w2) <= kBranchTol) {
    return env * (1.0 + 0.5 * gamma * t);
  }
  if (w2 > 0.0) {
    const double w = std::sqrt(w2);
    return env * (std::cos(w * t) + (0.5 * gamma / w) * std::sin(w * t));
  }
  const double w = std::sqrt(-w2);
  return env * (std::cosh(w * t) + (0.5 * gamma / w) * std::sinh(w * t));
}

double ideal_signal(const SystemParams& p, ModelKind kind, double t) {
  const double si = std::sin(p.theta_i) * std::sin(p.theta_m);
  const double co = std::cos(p.theta_i) * std::cos(p.theta_m);
  if (kind == ModelKind::DephasingFID) {
    return std::exp(-p.gamma * t) * std::cos(p.omega * t) * si + co;
  }
  return std::exp(-p.gamma * t) * si + phi_x3(p.omega, p.gamma, t) * co;
}

std::pair<std::function<double(double)>, std::function<double(double)>>
basis_functions(ModelKind kind, double omega, double gamma) {
  if (kind == ModelKind::DephasingFID) {
    return {[](double) { return 1.0; },
            [omega, gamma](double t) { return std::exp(-gamma * t) * std::cos(omega * t); }};
  }
  return {[gamma](double t) { return std::exp(-gamma * t); },
          [omega, gamma](double t) { return phi_x3(omega, gamma, t); }};
}

void eval_basis(ModelKind kind, double omega, double gamma,
                std::span<const double> times, double* g1, double* g2) {
  const std::size_t n = times.size();
  if (kind == ModelKind::DephasingFID) {
    for (std::size_t i = 0; i < n; ++i) {
      g1[i] = 1.0;
      g2[i] = std::exp(-gamma * times[i]) * std::cos(omega * times[i]);
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    g1[i] = std::exp(-gamma * times[i]);
    g2[i] = phi_x3(omega, gamma, times[i]);
  }
}

}  // namespace tlsfit
