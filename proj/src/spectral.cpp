// SPDX-License-Identifier: Apache-2.0
#include "tlsfit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "tlsfit/optim.hpp"

namespace tlsfit {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kSqrt3 = 1.7320508075688772935274463415058724;
}  // namespace

std::vector<double> center_rescale(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("center_rescale: empty input");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
  double max_dev = 0.0;
  for (double v : values) max_dev = std::max(max_dev, std::abs(v - mean));
  if (max_dev == 0.0)
    throw std::invalid_argument("center_rescale: all values equal (degenerate input)");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / max_dev;
  return out;
}

Spectrum dft(std::span<const double> rescaled, std::span<const double> times) {
  const std::size_t n = rescaled.size();
  if (n < 2 || times.size() != n) throw std::invalid_argument("dft: need >= 2 samples");
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::abs((times[i + 1] - times[i]) - dt) > 1e-9 * std::max(dt, 1.0))
      throw std::invalid_argument("dft: non-uniform schedule, use continuous_ft");
  }

  Spectrum spec;
  spec.kind = SpectrumKind::DiscreteFFT;
  spec.freqs.resize(n);
  spec.values.assign(n, {0.0, 0.0});
  const double bin = kTwoPi / (static_cast<double>(n) * dt);
  for (std::size_t k = 0; k < n; ++k) spec.freqs[k] = bin * static_cast<double>(k);
  for (std::size_t m = 0; m < n; ++m) {
    // phase recurrence over k for fixed sample m
    const double step = -kTwoPi * static_cast<double>(m) / static_cast<double>(n);
    const std::complex<double> rot{std::cos(step), std::sin(step)};
    std::complex<double> ph{1.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      spec.values[k] += rescaled[m] * ph;
      ph *= rot;
    }
  }
  return spec;
}

Spectrum continuous_ft(std::span<const double> rescaled, std::span<const double> times,
                       std::span<const double> omega_grid) {
  const std::size_t n = rescaled.size();
  if (n == 0 || times.size() != n) throw std::invalid_argument("continuous_ft: bad input");
  if (omega_grid.empty()) throw std::invalid_argument("continuous_ft: empty grid");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("continuous_ft: times must be strictly increasing");
  }

  // trapezoid weights (dt_n + dt_{n-1})/2 with zero outside the record
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (i > 0) ? times[i] - times[i - 1] : 0.0;
    const double right = (i + 1 < n) ? times[i + 1] - times[i] : 0.0;
    w[i] = 0.5 * (left + right);
  }

  Spectrum spec;
  spec.kind = SpectrumKind::ContinuousTrapezoid;
  spec.freqs.assign(omega_grid.begin(), omega_grid.end());
  spec.values.assign(omega_grid.size(), {0.0, 0.0});

  bool uniform_grid = omega_grid.size() >= 2;
  const double dw = omega_grid.size() >= 2 ? omega_grid[1] - omega_grid[0] : 0.0;
  for (std::size_t k = 2; k < omega_grid.size(); ++k) {
    if (std::abs((omega_grid[k] - omega_grid[k - 1]) - dw) > 1e-9 * std::abs(dw)) {
      uniform_grid = false;
      break;
    }
  }

  if (uniform_grid) {
    for (std::size_t m = 0; m < n; ++m) {
      const double c = rescaled[m] * w[m];
      const std::complex<double> rot{std::cos(dw * times[m]), std::sin(dw * times[m])};
      std::complex<double> ph{std::cos(omega_grid[0] * times[m]),
                              std::sin(omega_grid[0] * times[m])};
      for (std::size_t k = 0; k < omega_grid.size(); ++k) {
        spec.values[k] += c * ph;
        ph *= rot;
        if ((k & 0x1ff) == 0x1ff && k + 1 < omega_grid.size())  // refresh against drift
          ph = {std::cos(omega_grid[k + 1] * times[m]), std::sin(omega_grid[k + 1] * times[m])};
      }
    }
  } else {
    for (std::size_t k = 0; k < omega_grid.size(); ++k) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t m = 0; m < n; ++m) {
        acc += rescaled[m] * w[m] *
               std::complex<double>{std::cos(omega_grid[k] * times[m]),
                                    std::sin(omega_grid[k] * times[m])};
      }
      spec.values[k] = acc;
    }
  }
  return spec;
}

std::vector<double> default_omega_grid(int nt, double horizon, int npts) {
  if (nt < 1 || !(horizon > 0.0) || npts < 2)
    throw std::invalid_argument("default_omega_grid: bad arguments");
  const double wmax = kPi * static_cast<double>(nt) / horizon;
  std::vector<double> grid(static_cast<std::size_t>(npts));
  for (int k = 1; k <= npts; ++k)
    grid[static_cast<std::size_t>(k - 1)] = wmax * static_cast<double>(k) / npts;
  return grid;
}

PeakInfo locate_peak(const Spectrum& spectrum) {
  double p_star = -1.0;
  std::size_t k_star = 0;
  bool found = false;
  for (std::size_t k = 0; k < spectrum.freqs.size(); ++k) {
    if (spectrum.freqs[k] <= 0.0) continue;
    const double p = std::norm(spectrum.values[k]);
    if (p > p_star) {
      p_star = p;
      k_star = k;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("locate_peak: no positive-frequency entries");

  // half maximum of the amplitude |F|, i.e. a quarter of the peak power
  const double threshold = 0.25 * p_star;
  double w1 = spectrum.freqs[k_star];
  double w2 = spectrum.freqs[k_star];
  for (std::size_t k = 0; k < spectrum.freqs.size(); ++k) {
    if (spectrum.freqs[k] <= 0.0) continue;
    if (std::norm(spectrum.values[k]) >= threshold) {
      w1 = std::min(w1, spectrum.freqs[k]);
      w2 = std::max(w2, spectrum.freqs[k]);
    }
  }
  return PeakInfo{spectrum.freqs[k_star], p_star, 0.5 * (w2 - w1)};
}

PeakInfo closed_form_peak(double omega0, double gamma) {
  if (!(omega0 > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("closed_form_peak: need omega0 > 0, gamma > 0");
  const double rad = omega0 * std::sqrt(4.0 * gamma * gamma + omega0 * omega0) -
                     gamma * gamma;
  if (!(rad > 0.0))
    throw std::domain_error("closed_form_peak: no real spectral peak (gamma too large)");
  const double ws = std::sqrt(rad);
  const double ps = (omega0 * omega0 + ws * ws + gamma * gamma) /
                    (8.0 * gamma * gamma * omega0 * omega0);
  const double d =
      std::sqrt(ws * ws + 2.0 * kSqrt3 * gamma * std::sqrt(ws * ws + gamma * gamma)) - ws;
  return PeakInfo{ws, ps, d};
}

double strategy1_objective(const PeakInfo& peak, double omega0, double gamma) {
  const double ws2 = peak.omega_star * peak.omega_star;
  const double g2 = gamma * gamma;
  const double o2 = omega0 * omega0;
  const double e1 = ws2 + g2 - omega0 * std::sqrt(4.0 * g2 + o2);
  const double e2 = 8.0 * g2 * o2 * peak.p_star - (o2 + g2 + ws2);
  return std::abs(e1) + std::abs(e2);
}

std::pair<double, double> strategy1(const PeakInfo& peak) {
  if (!(peak.omega_star > 0.0) || !(peak.p_star > 0.0))
    throw std::invalid_argument("strategy1: invalid peak");
  const double ws = peak.omega_star;
  const double denom = 8.0 * ws * ws * peak.p_star - 1.0;
  double gamma0;
  if (denom > 0.0) {
    gamma0 = std::sqrt(2.0 * ws / denom);
  } else {
    gamma0 = peak.d / kSqrt3;  // small-gamma linewidth relation
  }
  const Box box{{0.5 * ws, 1e-4}, {2.0 * ws, ws}};
  gamma0 = std::clamp(gamma0, box.lo[1], box.hi[1]);

  const auto objective = [&peak](double om, double ga) {
    return strategy1_objective(peak, om, ga);
  };
  OptimResult res = nelder_mead(objective, {ws, gamma0}, box, 1e-12, 2000);
  res = nelder_mead(objective, res.x, box, 1e-13, 2000, 0.005);
  return {res.x[0], res.x[1]};
}

std::pair<double, double> strategy2(const PeakInfo& peak) {
  const double ws = peak.omega_star;
  const double d = peak.d;
  if (!(ws > 0.0) || d < 0.0) throw std::invalid_argument("strategy2: invalid peak");
  const double g = std::sqrt(9.0 * ws * ws * ws * ws + 12.0 * d * d * ws * ws +
                             12.0 * d * d * d * ws + 3.0 * d * d * d * d);
  const double arg = 6.0 * g - 18.0 * ws * ws;
  // d = 0 lands exactly on the boundary; tolerate its roundoff
  if (arg < -1e-12 * 18.0 * ws * ws)
    throw std::domain_error("strategy2: degenerate peak (6g < 18 omega*^2)");
  const double gamma = std::sqrt(std::max(arg, 0.0)) / 6.0;
  const double g2 = gamma * gamma;
  const double s = ws * ws + g2;
  const double omega0 = std::sqrt(std::sqrt(4.0 * g2 * g2 + s * s) - 2.0 * g2);
  return {omega0, gamma};
}

PeakInfo trace_peak(const MeasurementTrace& trace) {
  const auto rescaled = center_rescale(trace.values);
  const double horizon = trace.times.back() - trace.times.front();
  const auto grid = default_omega_grid(static_cast<int>(trace.times.size()),
                                       horizon > 0.0 ? horizon : 1.0);
  const Spectrum spec = continuous_ft(rescaled, trace.times, grid);
  return locate_peak(spec);
}

std::pair<double, double> estimate_strategy1(const MeasurementTrace& trace) {
  return strategy1(trace_peak(trace));
}

std::pair<double, double> estimate_strategy2(const MeasurementTrace& trace) {
  return strategy2(trace_peak(trace));
}

void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out) {
  out << "omega,re,im,power\n";
  char buf[140];
  for (std::size_t k = 0; k < spectrum.freqs.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", spectrum.freqs[k],
                  spectrum.values[k].real(), spectrum.values[k].imag(),
                  std::norm(spectrum.values[k]));
    out << buf;
  }
}

}  // namespace tlsfit
