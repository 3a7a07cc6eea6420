// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "tlsfit/noise.hpp"

using namespace tlsfit;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const SystemParams kModel1{1.0, 0.1, kPi / 2, kPi / 2};
}  // namespace

TEST_SUITE("noise") {

TEST_CASE("ensemble sigma formula") {
  CHECK(gaussian_sigma_from_ensemble(16) == doctest::Approx(0.17851658190997152).epsilon(1e-12));
  CHECK(gaussian_sigma_from_ensemble(10000) == doctest::Approx(0.010536429201508086).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_sigma_from_ensemble(15), std::domain_error);
  CHECK_THROWS_AS(gaussian_sigma_from_ensemble(3), std::domain_error);

  double prev = gaussian_sigma_from_ensemble(16);
  for (int ne : {32, 100, 1000, 100000}) {
    const double s = gaussian_sigma_from_ensemble(ne);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("projection sampling edge cases") {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    CHECK(projection_sample(-1.0, 50, rng) == 0.0);
    CHECK(projection_sample(1.0, 50, rng) == 1.0);
  }

  // p = 0: fraction concentrates at 1/2 (binomial std = 1/(2 sqrt(Ne)))
  int within = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng r(static_cast<std::uint64_t>(seed));
    if (std::abs(projection_sample(0.0, 100000, r) - 0.5) < 0.01) ++within;
  }
  CHECK(within >= 99);
}

TEST_CASE("noiseless trace equals the ideal signal exactly") {
  const auto times = uniform_schedule(100, 30.0);
  const auto trace =
      simulate_trace(kModel1, ModelKind::DephasingFID, times, NoiseSpec::none(), 9);
  REQUIRE(trace.values.size() == 100);
  CHECK(trace.times[1] == doctest::Approx(0.3));
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(trace.values[i] == ideal_signal(kModel1, ModelKind::DephasingFID, times[i]));
}

TEST_CASE("same seed gives a bit-identical trace") {
  const auto times = uniform_schedule(50, 30.0);
  for (const NoiseSpec& noise :
       {NoiseSpec::gaussian(0.05), NoiseSpec::projection(200), NoiseSpec::none()}) {
    const auto a = simulate_trace(kModel1, ModelKind::DephasingFID, times, noise, 1234);
    const auto b = simulate_trace(kModel1, ModelKind::DephasingFID, times, noise, 1234);
    const auto c = simulate_trace(kModel1, ModelKind::DephasingFID, times, noise, 1235);
    CHECK(a.values == b.values);
    if (noise.kind != NoiseSpec::Kind::None) CHECK(a.values != c.values);
  }
}

TEST_CASE("projection values are multiples of 1/Ne on the expectation scale") {
  const int ne = 137;
  const auto times = uniform_schedule(100, 30.0);
  const auto trace =
      simulate_trace(kModel1, ModelKind::DephasingFID, times, NoiseSpec::projection(ne), 77);
  for (double v : trace.values) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
    const double n1 = 0.5 * (v + 1.0) * ne;
    CHECK(std::abs(n1 - std::round(n1)) < 1e-9);
  }
}

TEST_CASE("projection simulation survives ulp overshoot of the ideal signal") {
  // sin^2 + cos^2 rounding can push p(0) one ulp above 1
  const SystemParams p{1.0, 0.1, 0.017, 0.017};
  REQUIRE(ideal_signal(p, ModelKind::DephasingFID, 0.0) > 1.0);
  const auto times = uniform_schedule(20, 30.0);
  const auto trace =
      simulate_trace(p, ModelKind::DephasingFID, times, NoiseSpec::projection(50), 1);
  for (double v : trace.values) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("gaussian noise moments") {
  Rng rng(2024);
  const double sigma = 0.07;
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sigma * rng.gauss();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 * sigma / std::sqrt(static_cast<double>(n)));
  // var of the sample variance of a gaussian: 2 sigma^4 / n
  CHECK(std::abs(var - sigma * sigma) <
        3.0 * sigma * sigma * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("projection residual variance tracks (1 - p^2)/Ne") {
  const int ne = 400;
  const auto times = uniform_schedule(100, 30.0);
  double resid2 = 0.0, predicted = 0.0;
  const int runs = 200;
  for (int run = 0; run < runs; ++run) {
    const auto trace = simulate_trace(kModel1, ModelKind::DephasingFID, times,
                                      NoiseSpec::projection(ne),
                                      static_cast<std::uint64_t>(run));
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double p = ideal_signal(kModel1, ModelKind::DephasingFID, times[i]);
      resid2 += (trace.values[i] - p) * (trace.values[i] - p);
      predicted += (1.0 - p * p) / ne;
    }
  }
  resid2 /= runs * 100.0;
  predicted /= runs * 100.0;
  CHECK(resid2 == doctest::Approx(predicted).epsilon(0.05));
  CHECK(resid2 <= 1.0 / ne);
}

TEST_CASE("large-Ne projection concentrates on the ideal signal") {
  const auto times = uniform_schedule(100, 30.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto trace = simulate_trace(kModel1, ModelKind::DephasingFID, times,
                                      NoiseSpec::projection(1000000), seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double p = ideal_signal(kModel1, ModelKind::DephasingFID, times[i]);
      worst = std::max(worst, std::abs(trace.values[i] - p));
    }
    CHECK(worst < 0.01);
  }
}

TEST_CASE("csv round trip") {
  const auto times = uniform_schedule(40, 30.0);
  const auto trace = simulate_trace(kModel1, ModelKind::DephasingFID, times,
                                    NoiseSpec::gaussian(0.02), 5);
  std::stringstream ss;
  write_trace_csv(trace, ss);
  CHECK(ss.str().substr(0, 4) == "t,d\n");
  const auto back = read_trace_csv(ss);
  CHECK(back.times == trace.times);
  CHECK(back.values == trace.values);

  std::stringstream bad("x,y\n1,2\n");
  CHECK_THROWS_AS(read_trace_csv(bad), std::invalid_argument);
}

TEST_CASE("json round trip keeps noise metadata") {
  const auto times = uniform_schedule(10, 30.0);
  auto trace = simulate_trace(kModel1, ModelKind::DephasingFID, times,
                              NoiseSpec::projection(250), 11);
  trace.n_averaged = 4;
  const auto back = trace_from_json(trace_to_json(trace));
  CHECK(back.times == trace.times);
  CHECK(back.values == trace.values);
  CHECK(back.noise == trace.noise);
  CHECK(back.seed == trace.seed);
  CHECK(back.n_averaged == 4);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(NoiseSpec::gaussian(0.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpec::projection(0), std::invalid_argument);
  CHECK_THROWS_AS(simulate_trace(kModel1, ModelKind::DephasingFID, {},
                                 NoiseSpec::none(), 0),
                  std::invalid_argument);
  CHECK(NoiseSpec::gaussian(0.1).content_hash() != NoiseSpec::gaussian(0.2).content_hash());
  CHECK(NoiseSpec::projection(100).content_hash() != NoiseSpec::none().content_hash());
}

}  // TEST_SUITE
