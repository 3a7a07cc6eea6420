// SPDX-License-Identifier: Apache-2.0
#include "tlsfit/fisher.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace tlsfit {

std::array<double, 3> FisherMatrix::inverse() const {
  const double d = det();
  if (!(std::abs(d) > 0.0)) throw std::domain_error("Fisher matrix is singular");
  return {i22 / d, -i12 / d, i11 / d};
}

FisherMatrix fisher_matrix(const SystemParams& params, std::span<const double> times,
                           double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("fisher_matrix: sigma must be > 0");
  if (times.empty()) throw std::invalid_argument("fisher_matrix: empty schedule");

  FisherMatrix fi;
  fi.sigma = sigma;
  fi.times.assign(times.begin(), times.end());
  const double inv_s2 = 1.0 / (sigma * sigma);
  for (double t : times) {
    const double env = t * std::exp(-params.gamma * t);
    const double a = -env * std::sin(params.omega * t);  // dp/domega
    const double b = -env * std::cos(params.omega * t);  // dp/dgamma
    fi.i11 += inv_s2 * a * a;
    fi.i12 += inv_s2 * a * b;
    fi.i22 += inv_s2 * b * b;
  }
  return fi;
}

CrbGap crb_gap(std::span<const std::pair<double, double>> estimates,
               const FisherMatrix& fisher) {
  const std::size_t n = estimates.size();
  if (n < 30) throw std::invalid_argument("crb_gap: need at least 30 estimates");

  double mo = 0.0, mg = 0.0;
  for (const auto& [o, g] : estimates) {
    mo += o;
    mg += g;
  }
  mo /= static_cast<double>(n);
  mg /= static_cast<double>(n);

  double c11 = 0.0, c12 = 0.0, c22 = 0.0;
  for (const auto& [o, g] : estimates) {
    c11 += (o - mo) * (o - mo);
    c12 += (o - mo) * (g - mg);
    c22 += (g - mg) * (g - mg);
  }
  const double denom = static_cast<double>(n) - 1.0;
  c11 /= denom;
  c12 /= denom;
  c22 /= denom;

  CrbGap gap;
  gap.covariance = {c11, c12, c22};
  gap.inv_fisher = fisher.inverse();
  const double d11 = c11 - gap.inv_fisher[0];
  const double d12 = c12 - gap.inv_fisher[1];
  const double d22 = c22 - gap.inv_fisher[2];
  gap.min_eig = 0.5 * (d11 + d22) - std::hypot(0.5 * (d11 - d22), d12);
  return gap;
}

std::string crb_gap_to_json(const CrbGap& gap) {
  nlohmann::json j;
  j["covariance"] = {{"c11", gap.covariance[0]},
                     {"c12", gap.covariance[1]},
                     {"c22", gap.covariance[2]}};
  j["inv_fisher"] = {{"i11", gap.inv_fisher[0]},
                     {"i12", gap.inv_fisher[1]},
                     {"i22", gap.inv_fisher[2]}};
  j["min_eig"] = gap.min_eig;
  return j.dump();
}

}  // namespace tlsfit
