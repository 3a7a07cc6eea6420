// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "tlsfit/fisher.hpp"
#include "tlsfit/noise.hpp"
#include "tlsfit/rng.hpp"

using namespace tlsfit;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const SystemParams kModel1{1.0, 0.1, kPi / 2, kPi / 2};

double damped_cos(double omega, double gamma, double t) {
  return std::exp(-gamma * t) * std::cos(omega * t);
}

}  // namespace

TEST_SUITE("fisher") {

TEST_CASE("entries scale as 1/sigma^2") {
  const auto times = uniform_schedule(100, 30.0);
  const auto a = fisher_matrix(kModel1, times, 0.05);
  const auto b = fisher_matrix(kModel1, times, 0.10);
  CHECK(b.i11 == doctest::Approx(0.25 * a.i11).epsilon(1e-12));
  CHECK(b.i12 == doctest::Approx(0.25 * a.i12).epsilon(1e-12));
  CHECK(b.i22 == doctest::Approx(0.25 * a.i22).epsilon(1e-12));
}

TEST_CASE("single sample at omega t = pi/2 kills the gamma information") {
  const std::vector<double> t1{kPi / 2};
  const auto fi = fisher_matrix(kModel1, t1, 0.05);
  CHECK(fi.i11 == doctest::Approx(720.8785614141223).epsilon(1e-10));
  CHECK(std::abs(fi.i22) < 1e-25);
  CHECK(std::abs(fi.i12) < 1e-10);
}

TEST_CASE("gram structure: symmetric and positive semi-definite") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> times;
    for (int i = 0; i < 17; ++i) times.push_back(30.0 * rng.u01());
    SystemParams p{0.1 + 2.0 * rng.u01(), 0.4 * rng.u01(), kPi / 2, kPi / 2};
    const auto fi = fisher_matrix(p, times, 0.03);
    CHECK(fi.i11 >= 0.0);
    CHECK(fi.i22 >= 0.0);
    CHECK(fi.det() >= -1e-9 * fi.i11 * fi.i22);
  }
}

TEST_CASE("analytic derivatives match central differences of the signal") {
  const double h = 1e-5;
  for (double t : {0.5, 4.0, 13.0, 27.0}) {
    for (const auto& [om, ga] : {std::pair{1.0, 0.1}, {0.7304, 0.1875}}) {
      const double d_om_fd = (damped_cos(om + h, ga, t) - damped_cos(om - h, ga, t)) / (2 * h);
      const double d_ga_fd = (damped_cos(om, ga + h, t) - damped_cos(om, ga - h, t)) / (2 * h);
      const double d_om = -t * std::exp(-ga * t) * std::sin(om * t);
      const double d_ga = -t * std::exp(-ga * t) * std::cos(om * t);
      CHECK(d_om == doctest::Approx(d_om_fd).epsilon(1e-6));
      CHECK(d_ga == doctest::Approx(d_ga_fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("Monte-Carlo expectation oracle confirms the matrix") {
  // I_ij = E[Hessian of 1/(2 sigma^2) ||p(theta) - x||^2] over noise draws
  const auto times = uniform_schedule(100, 30.0);
  const double sigma = 0.05;
  const auto fi = fisher_matrix(kModel1, times, sigma);

  const auto nll = [&](double om, double ga, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double r = damped_cos(om, ga, times[i]) - x[i];
      s += r * r;
    }
    return 0.5 * s / (sigma * sigma);
  };

  Rng rng(31);
  const int draws = 3000;
  const double e = 1e-4;
  double m11 = 0.0, m12 = 0.0, m22 = 0.0, s11 = 0.0, s12 = 0.0, s22 = 0.0;
  std::vector<double> x(times.size());
  for (int k = 0; k < draws; ++k) {
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = damped_cos(1.0, 0.1, times[i]) + sigma * rng.gauss();
    const double f0 = nll(1.0, 0.1, x);
    const double h11 = (nll(1.0 + e, 0.1, x) - 2 * f0 + nll(1.0 - e, 0.1, x)) / (e * e);
    const double h22 = (nll(1.0, 0.1 + e, x) - 2 * f0 + nll(1.0, 0.1 - e, x)) / (e * e);
    const double h12 = (nll(1.0 + e, 0.1 + e, x) - nll(1.0 + e, 0.1 - e, x) -
                        nll(1.0 - e, 0.1 + e, x) + nll(1.0 - e, 0.1 - e, x)) /
                       (4 * e * e);
    m11 += h11; m12 += h12; m22 += h22;
    s11 += h11 * h11; s12 += h12 * h12; s22 += h22 * h22;
  }
  m11 /= draws; m12 /= draws; m22 /= draws;
  const auto se = [&](double m, double s) {
    return std::sqrt((s / draws - m * m) / draws);
  };
  CHECK(std::abs(m11 - fi.i11) < 3.0 * se(m11, s11));
  CHECK(std::abs(m12 - fi.i12) < 3.0 * se(m12, s12));
  CHECK(std::abs(m22 - fi.i22) < 3.0 * se(m22, s22));
}

TEST_CASE("degenerate estimate cloud flags an impossible sub-CRB spread") {
  const auto times = uniform_schedule(100, 30.0);
  const auto fi = fisher_matrix(kModel1, times, 0.05);
  std::vector<std::pair<double, double>> same(40, {1.0, 0.1});
  const auto gap = crb_gap(same, fi);
  CHECK(std::abs(gap.covariance[0]) < 1e-30);
  CHECK(std::abs(gap.covariance[2]) < 1e-30);
  CHECK(gap.min_eig < 0.0);
  // -min_eig equals the largest eigenvalue of I^-1
  const auto inv = fi.inverse();
  const double lmax = 0.5 * (inv[0] + inv[2]) + std::hypot(0.5 * (inv[0] - inv[2]), inv[1]);
  CHECK(gap.min_eig == doctest::Approx(-lmax).epsilon(1e-12));
}

TEST_CASE("estimates drawn at the bound have a vanishing gap") {
  const auto times = uniform_schedule(100, 30.0);
  const auto fi = fisher_matrix(kModel1, times, 0.05);
  const auto inv = fi.inverse();
  // Cholesky of I^-1 = L L^T
  const double l11 = std::sqrt(inv[0]);
  const double l21 = inv[1] / l11;
  const double l22 = std::sqrt(inv[2] - l21 * l21);

  const auto sample_gap = [&](int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<double, double>> est;
    est.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double z1 = rng.gauss(), z2 = rng.gauss();
      est.emplace_back(1.0 + l11 * z1, 0.1 + l21 * z1 + l22 * z2);
    }
    return crb_gap(est, fi);
  };

  const double lmax = 0.5 * (inv[0] + inv[2]) + std::hypot(0.5 * (inv[0] - inv[2]), inv[1]);
  const auto small = sample_gap(200, 8);
  const auto large = sample_gap(20000, 9);
  CHECK(std::abs(large.min_eig) < std::abs(small.min_eig));
  CHECK(std::abs(large.min_eig) < 0.1 * lmax);
}

TEST_CASE("validation") {
  const auto times = uniform_schedule(100, 30.0);
  CHECK_THROWS_AS(fisher_matrix(kModel1, times, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fisher_matrix(kModel1, {}, 0.1), std::invalid_argument);
  const auto fi = fisher_matrix(kModel1, times, 0.05);
  std::vector<std::pair<double, double>> few(10, {1.0, 0.1});
  CHECK_THROWS_AS(crb_gap(few, fi), std::invalid_argument);

  FisherMatrix singular;
  singular.sigma = 1.0;
  std::vector<std::pair<double, double>> est(40, {1.0, 0.1});
  CHECK_THROWS_AS(crb_gap(est, singular), std::domain_error);
}

TEST_CASE("json serialization carries all entries") {
  const auto times = uniform_schedule(50, 30.0);
  const auto fi = fisher_matrix(kModel1, times, 0.1);
  std::vector<std::pair<double, double>> est;
  Rng rng(2);
  for (int i = 0; i < 50; ++i)
    est.emplace_back(1.0 + 0.01 * rng.gauss(), 0.1 + 0.01 * rng.gauss());
  const std::string j = crb_gap_to_json(crb_gap(est, fi));
  for (const char* key : {"covariance", "inv_fisher", "min_eig", "c11", "i22"})
    CHECK(j.find(key) != std::string::npos);
}

}  // TEST_SUITE
