// SPDX-License-Identifier: Apache-2.0
#include "tlsfit/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "tlsfit/optim.hpp"

namespace tlsfit {

namespace {

constexpr double kLogArgFloor = 1e-15;
constexpr double kDegenerate = 1e300;  // sentinel objective for degenerate points
constexpr double kLn2 = 0.6931471805599453;

struct Eig2 {
  double lam1, lam2;          // lam1 <= lam2
  double v1[2], v2[2];        // unit eigenvectors
};

// analytic eigendecomposition of the symmetric 2x2 [[a, b], [b, c]]
Eig2 sym_eig2(double a, double b, double c) {
  Eig2 e{};
  const double half_tr = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  e.lam1 = half_tr - disc;
  e.lam2 = half_tr + disc;
  if (b == 0.0) {
    const bool a_small = a <= c;
    e.v1[0] = a_small ? 1.0 : 0.0;
    e.v1[1] = a_small ? 0.0 : 1.0;
    e.v2[0] = a_small ? 0.0 : 1.0;
    e.v2[1] = a_small ? 1.0 : 0.0;
    return e;
  }
  // eigenvector of lam: (b, lam - a), falling back to (lam - c, b)
  for (int which = 0; which < 2; ++which) {
    const double lam = which == 0 ? e.lam1 : e.lam2;
    double x = b, y = lam - a;
    if (std::abs(y) < std::abs(lam - c)) {
      x = lam - c;
      y = b;
    }
    const double norm = std::hypot(x, y);
    double* v = which == 0 ? e.v1 : e.v2;
    v[0] = x / norm;
    v[1] = y / norm;
  }
  return e;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// core of Eq.-style projected statistic: 1 - m_b <h^2> / (N_t <d^2>),
// computed from the basis rows without materializing H
double projected_log_arg(std::span<const double> g1, std::span<const double> g2,
                         std::span<const double> d) {
  const double a = dot(g1, g1);
  const double b = dot(g1, g2);
  const double c = dot(g2, g2);
  const Eig2 e = sym_eig2(a, b, c);
  if (!(e.lam1 > 1e-12 * e.lam2) || !(e.lam2 > 0.0))
    throw std::domain_error("degenerate basis: G G^T numerically singular");
  const double gd1 = dot(g1, d);
  const double gd2 = dot(g2, d);
  const double h1 = (e.v1[0] * gd1 + e.v1[1] * gd2) / std::sqrt(e.lam1);
  const double h2 = (e.v2[0] * gd1 + e.v2[1] * gd2) / std::sqrt(e.lam2);
  const double dd = dot(d, d);
  if (!(dd > 0.0)) throw std::invalid_argument("zero data vector");
  return 1.0 - (h1 * h1 + h2 * h2) / dd;
}

std::array<std::vector<double>, 2> build_basis(ModelKind kind, double omega, double gamma,
                                               std::span<const double> times) {
  std::array<std::vector<double>, 2> g;
  g[0].resize(times.size());
  g[1].resize(times.size());
  eval_basis(kind, omega, gamma, times, g[0].data(), g[1].data());
  return g;
}

}  // namespace

BasisProjection orthonormal_projection(const std::array<std::vector<double>, 2>& g,
                                       std::span<const double> d) {
  const std::size_t n = g[0].size();
  if (g[1].size() != n || d.size() != n)
    throw std::invalid_argument("orthonormal_projection: length mismatch");
  if (n < kBasisSize + 3)
    throw std::invalid_argument("orthonormal_projection: need N_t >= m_b + 3");

  const double a = dot(g[0], g[0]);
  const double b = dot(g[0], g[1]);
  const double c = dot(g[1], g[1]);
  const Eig2 e = sym_eig2(a, b, c);
  if (!(e.lam1 > 1e-12 * e.lam2) || !(e.lam2 > 0.0))
    throw std::domain_error("degenerate basis: G G^T numerically singular");

  BasisProjection proj;
  proj.g = g;
  proj.h_rows[0].resize(n);
  proj.h_rows[1].resize(n);
  const double s1 = 1.0 / std::sqrt(e.lam1);
  const double s2 = 1.0 / std::sqrt(e.lam2);
  for (std::size_t i = 0; i < n; ++i) {
    proj.h_rows[0][i] = s1 * (e.v1[0] * g[0][i] + e.v1[1] * g[1][i]);
    proj.h_rows[1][i] = s2 * (e.v2[0] * g[0][i] + e.v2[1] * g[1][i]);
  }
  proj.h[0] = dot(proj.h_rows[0], d);
  proj.h[1] = dot(proj.h_rows[1], d);
  return proj;
}

double log_likelihood(double omega, double gamma, std::span<const double> times,
                      std::span<const double> values, ModelKind kind) {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("log_likelihood: bad trace");
  const auto g = build_basis(kind, omega, gamma, times);
  const double arg = std::max(projected_log_arg(g[0], g[1], values), kLogArgFloor);
  const double nt = static_cast<double>(times.size());
  return 0.5 * (kBasisSize - nt) * std::log(arg);
}

double log_likelihood(double omega, double gamma, const MeasurementTrace& trace,
                      ModelKind kind) {
  return log_likelihood(omega, gamma, trace.times, trace.values, kind);
}

FwhmUncertainty fwhm_uncertainty(const std::function<double(double, double)>& log_l,
                                 double omega_hat, double gamma_hat, const Box& box,
                                 double conversion_factor) {
  const double l_max = log_l(omega_hat, gamma_hat);
  const double target = l_max - kLn2;  // exp(L) = exp(L_max)/2
  FwhmUncertainty out;

  const double x0[2] = {omega_hat, gamma_hat};
  for (int axis = 0; axis < 2; ++axis) {
    double width = 0.0;
    bool saturated = false;
    for (double sign : {+1.0, -1.0}) {
      const double edge =
          sign > 0 ? box.hi[axis] - x0[axis] : x0[axis] - box.lo[axis];
      auto value_at = [&](double delta) {
        const double om = axis == 0 ? x0[0] + sign * delta : x0[0];
        const double ga = axis == 1 ? x0[1] + sign * delta : x0[1];
        return log_l(om, ga);
      };
      double prev = 0.0;
      double step = 1e-4;
      bool crossed = false;
      while (step <= edge) {
        if (value_at(step) < target) {
          crossed = true;
          break;
        }
        prev = step;
        step *= 2.0;
      }
      if (!crossed) {
        if (edge > prev && value_at(edge) < target) {
          crossed = true;
          step = edge;
        } else {
          width += edge;  // peak runs out of the box on this side
          saturated = true;
          continue;
        }
      }
      double lo = prev, hi = step;
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (value_at(mid) < target) hi = mid; else lo = mid;
      }
      width += 0.5 * (lo + hi);
    }
    if (axis == 0) {
      out.d_omega = conversion_factor * width;
      out.saturated_omega = saturated;
    } else {
      out.d_gamma = conversion_factor * width;
      out.saturated_gamma = saturated;
    }
  }
  return out;
}

double estimate_noise_sigma(const BasisProjection& projection, std::span<const double> d) {
  const double nt = static_cast<double>(d.size());
  if (!(nt > kBasisSize + 2))
    throw std::invalid_argument("estimate_noise_sigma: need N_t > m_b + 2");
  const double sum_d2 = dot(d, d);
  const double sum_h2 = projection.h[0] * projection.h[0] + projection.h[1] * projection.h[1];
  const double s2 = (sum_d2 - sum_h2) / (nt - kBasisSize - 2);
  return std::sqrt(std::max(s2, 0.0));
}

std::array<double, 2> estimate_amplitudes(double omega, double gamma,
                                          const MeasurementTrace& trace, ModelKind kind) {
  const auto g = build_basis(kind, omega, gamma, trace.times);
  const double a = dot(g[0], g[0]);
  const double b = dot(g[0], g[1]);
  const double c = dot(g[1], g[1]);
  const double det = a * c - b * b;
  const Eig2 e = sym_eig2(a, b, c);
  if (!(e.lam1 > 1e-12 * e.lam2))
    throw std::domain_error("degenerate basis: normal equations singular");
  const double y1 = dot(g[0], trace.values);
  const double y2 = dot(g[1], trace.values);
  return {(c * y1 - b * y2) / det, (a * y2 - b * y1) / det};
}

std::pair<double, double> angles_from_alphas(double alpha1, double alpha2, ModelKind kind,
                                             double tol) {
  // fid inverts cos(theta_I -/+ theta_M) = alpha1 +/- alpha2; the driven model
  // swaps the roles of the two amplitudes
  const double u = kind == ModelKind::DephasingFID ? alpha1 - alpha2 : alpha2 - alpha1;
  const double v = kind == ModelKind::DephasingFID ? alpha1 + alpha2 : alpha2 + alpha1;
  for (double x : {u, v}) {
    if (x < -1.0 - tol || x > 1.0 + tol)
      throw std::domain_error("angles_from_alphas: arccos argument out of range");
  }
  const double cu = std::clamp(u, -1.0, 1.0);
  const double cv = std::clamp(v, -1.0, 1.0);
  const double theta_i = 0.5 * (std::acos(cu) + std::acos(cv));
  const double theta_m = 0.5 * (std::acos(cu) - std::acos(cv));
  return {theta_i, theta_m};
}

FitResult strategy3(const MeasurementTrace& trace, ModelKind kind, const Box& box) {
  if (trace.times.size() < 5) throw std::invalid_argument("strategy3: need N_t >= 5");

  long degenerate = 0, total = 0;
  const auto neg_log_l = [&](double om, double ga) {
    ++total;
    try {
      return -log_likelihood(om, ga, trace, kind);
    } catch (const std::domain_error&) {
      ++degenerate;
      return kDegenerate;
    }
  };

  const auto start = grid_multistart(neg_log_l, box, 60, 40);
  if (degenerate == total)
    throw std::runtime_error("strategy3: likelihood degenerate over the whole grid");

  OptimResult res = nelder_mead(neg_log_l, start, box, 1e-11, 4000);
  res = nelder_mead(neg_log_l, res.x, box, 1e-12, 4000, 0.005);
  if (res.f >= kDegenerate)
    throw std::runtime_error("strategy3: estimation failed (degenerate optimum)");

  FitResult fit;
  fit.omega = res.x[0];
  fit.gamma = res.x[1];
  fit.log_l_max = -res.f;

  const auto g = build_basis(kind, fit.omega, fit.gamma, trace.times);
  const auto proj = orthonormal_projection(g, trace.values);
  fit.sigma_est = estimate_noise_sigma(proj, trace.values);
  fit.alpha = estimate_amplitudes(fit.omega, fit.gamma, trace, kind);

  const auto log_l = [&](double om, double ga) {
    try {
      return log_likelihood(om, ga, trace, kind);
    } catch (const std::domain_error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const FwhmUncertainty unc = fwhm_uncertainty(log_l, fit.omega, fit.gamma, box);
  fit.d_omega = unc.d_omega;
  fit.d_gamma = unc.d_gamma;
  fit.saturated_omega = unc.saturated_omega;
  fit.saturated_gamma = unc.saturated_gamma;

  try {
    const auto [ti, tm] = angles_from_alphas(fit.alpha[0], fit.alpha[1], kind);
    fit.theta_i_est = ti;
    fit.theta_m_est = tm;
  } catch (const std::domain_error&) {
    // amplitudes too far outside the unit disc; leave the angles unset
  }
  return fit;
}

std::string fit_to_json(const FitResult& fit) {
  nlohmann::json j;
  j["omega"] = fit.omega;
  j["gamma"] = fit.gamma;
  j["log_l_max"] = fit.log_l_max;
  j["sigma_est"] = fit.sigma_est;
  j["alpha"] = fit.alpha;
  j["d_omega"] = fit.d_omega;
  j["d_gamma"] = fit.d_gamma;
  j["saturated_omega"] = fit.saturated_omega;
  j["saturated_gamma"] = fit.saturated_gamma;
  if (fit.theta_i_est) j["theta_i_est"] = *fit.theta_i_est; else j["theta_i_est"] = nullptr;
  if (fit.theta_m_est) j["theta_m_est"] = *fit.theta_m_est; else j["theta_m_est"] = nullptr;
  return j.dump();
}

}  // namespace tlsfit
