// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tlsfit/model.hpp"

namespace tlsfit {

/// Fisher information of (omega, gamma) for the pure damped cosine
/// p(t) = exp(-gamma t) cos(omega t) under i.i.d. Gaussian noise:
///   I_ij = sigma^-2 sum_n (dp/dtheta_i)(t_n) (dp/dtheta_j)(t_n)
/// with dp/domega = -t exp(-gamma t) sin(omega t) and
///      dp/dgamma = -t exp(-gamma t) cos(omega t).
struct FisherMatrix {
  double i11 = 0.0;
  double i12 = 0.0;
  double i22 = 0.0;
  double sigma = 0.0;
  std::vector<double> times;

  double det() const { return i11 * i22 - i12 * i12; }
  std::array<double, 3> inverse() const;  // {inv11, inv12, inv22}; throws if singular
};

FisherMatrix fisher_matrix(const SystemParams& params, std::span<const double> times,
                           double sigma);

/// Distance of an estimator's empirical covariance from the Cramer-Rao bound:
/// C = cov - I^-1 must be positive semi-definite for an unbiased estimator;
/// min_eig(C) -> 0 from above as the estimator approaches the bound.
struct CrbGap {
  std::array<double, 3> covariance{};   // {c11, c12, c22}, unbiased (n-1)
  std::array<double, 3> inv_fisher{};
  double min_eig = 0.0;
};

CrbGap crb_gap(std::span<const std::pair<double, double>> estimates,
               const FisherMatrix& fisher);

std::string crb_gap_to_json(const CrbGap& gap);

}  // namespace tlsfit
