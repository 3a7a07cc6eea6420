// SPDX-License-Identifier: Apache-2.0
#include "tlsfit/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tlsfit {

namespace {

using Point = std::array<double, 2>;

Point clip(Point x, const Box& box) {
  for (int i = 0; i < 2; ++i) x[i] = std::clamp(x[i], box.lo[i], box.hi[i]);
  return x;
}

double dist(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

OptimResult nelder_mead(const Objective2D& objective, Point x0, const Box& box,
                        double tol, int max_iters, double edge_frac) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  for (int i = 0; i < 2; ++i) {
    if (x0[i] < box.lo[i] || x0[i] > box.hi[i])
      throw std::invalid_argument("start point outside box");
  }

  std::array<Point, 3> v;
  v[0] = x0;
  for (int i = 0; i < 2; ++i) {
    Point x = x0;
    const double edge = edge_frac * (box.hi[i] - box.lo[i]);
    x[i] += (x[i] + edge <= box.hi[i]) ? edge : -edge;
    v[static_cast<std::size_t>(i) + 1] = clip(x, box);
  }
  std::array<double, 3> f;
  for (int i = 0; i < 3; ++i) f[static_cast<std::size_t>(i)] = objective(v[static_cast<std::size_t>(i)][0], v[static_cast<std::size_t>(i)][1]);

  auto order = [&] {
    if (f[0] > f[1]) { std::swap(f[0], f[1]); std::swap(v[0], v[1]); }
    if (f[1] > f[2]) { std::swap(f[1], f[2]); std::swap(v[1], v[2]); }
    if (f[0] > f[1]) { std::swap(f[0], f[1]); std::swap(v[0], v[1]); }
  };

  int it = 0;
  bool converged = false;
  for (; it < max_iters; ++it) {
    order();
    if (std::max(dist(v[1], v[0]), dist(v[2], v[0])) < tol) {
      converged = true;
      break;
    }
    const Point xc{0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    const Point xr = clip({xc[0] + (xc[0] - v[2][0]), xc[1] + (xc[1] - v[2][1])}, box);
    const double fr = objective(xr[0], xr[1]);
    if (fr < f[0]) {
      const Point xe = clip({xc[0] + 2.0 * (xc[0] - v[2][0]), xc[1] + 2.0 * (xc[1] - v[2][1])}, box);
      const double fe = objective(xe[0], xe[1]);
      if (fe < fr) { v[2] = xe; f[2] = fe; } else { v[2] = xr; f[2] = fr; }
    } else if (fr < f[1]) {
      v[2] = xr;
      f[2] = fr;
    } else {
      // outside contraction toward the reflection, inside toward the worst
      const Point xk = fr < f[2]
          ? clip({xc[0] + 0.5 * (xr[0] - xc[0]), xc[1] + 0.5 * (xr[1] - xc[1])}, box)
          : clip({xc[0] - 0.5 * (xc[0] - v[2][0]), xc[1] - 0.5 * (xc[1] - v[2][1])}, box);
      const double fk = objective(xk[0], xk[1]);
      if (fk < std::min(fr, f[2])) {
        v[2] = xk;
        f[2] = fk;
      } else {
        for (int i = 1; i < 3; ++i) {
          auto idx = static_cast<std::size_t>(i);
          v[idx] = clip({v[0][0] + 0.5 * (v[idx][0] - v[0][0]),
                         v[0][1] + 0.5 * (v[idx][1] - v[0][1])}, box);
          f[idx] = objective(v[idx][0], v[idx][1]);
        }
      }
    }
  }
  order();
  return OptimResult{v[0], f[0], it, converged};
}

std::array<double, 2> grid_multistart(const Objective2D& objective, const Box& box,
                                      int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid must be at least 2x2");
  const double dx = (box.hi[0] - box.lo[0]) / (nx - 1);
  const double dy = (box.hi[1] - box.lo[1]) / (ny - 1);
  std::array<double, 2> best{box.lo[0], box.lo[1]};
  double fbest = objective(best[0], best[1]);
  for (int i = 0; i < nx; ++i) {
    const double x = box.lo[0] + i * dx;
    for (int j = 0; j < ny; ++j) {
      if (i == 0 && j == 0) continue;
      const double y = box.lo[1] + j * dy;
      const double fv = objective(x, y);
      if (fv < fbest) {
        fbest = fv;
        best = {x, y};
      }
    }
  }
  return best;
}

}  // namespace tlsfit
