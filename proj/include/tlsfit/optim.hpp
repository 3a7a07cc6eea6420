// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>

namespace tlsfit {

struct Box {
  std::array<double, 2> lo;
  std::array<double, 2> hi;
};

struct OptimResult {
  std::array<double, 2> x{};
  double f = 0.0;
  int iters = 0;
  bool converged = false;
};

using Objective2D = std::function<double(double, double)>;

/// Derivative-free Nelder-Mead simplex minimization in 2-D with box
/// projection. Coefficients 1 / 2 / 0.5 / 0.5 (reflect, expand, contract,
/// shrink); initial simplex edge is edge_frac of the box width per axis.
/// Terminates when the simplex diameter drops below tol or after max_iters.
/// Deterministic for a given (objective, x0, box, tol).
OptimResult nelder_mead(const Objective2D& objective, std::array<double, 2> x0,
                        const Box& box, double tol = 1e-10, int max_iters = 2000,
                        double edge_frac = 0.05);

/// Evaluate the objective on an nx-by-ny tensor grid spanning the box
/// (endpoints included) and return the minimizing point. Ties break to the
/// lowest scan index (x-major) for determinism.
std::array<double, 2> grid_multistart(const Objective2D& objective, const Box& box,
                                      int nx, int ny);

}  // namespace tlsfit
