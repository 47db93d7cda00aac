#pragma once

#include <functional>

#include "reach/types.hpp"

namespace reach {

// Objective callback: returns the value at x and, when `grad` is non-null,
// writes the gradient into it (same size as x).
using ObjectiveFn = std::function<double(const Vec& x, Vec* grad)>;

struct SolveOptions {
  // Converged when the gradient infinity-norm drops below
  // grad_tol * (1 + |objective|).
  double grad_tol = 1e-6;
  // Converged (stalled) when the accepted step infinity-norm drops below this.
  double step_tol = 1e-12;
  int max_iters = 500;
  int history = 10;  // L-BFGS memory
};

struct SolveReport {
  Vec x;
  double objective = 0.0;
  double grad_norm = 0.0;  // infinity norm at the final iterate
  int iterations = 0;
  bool converged = false;
};

// Unconstrained smooth minimization: limited-memory BFGS directions with a
// strong-Wolfe bracket/zoom line search. Fully deterministic: the first
// direction is steepest descent and all subsequent state follows from the
// iterates.
SolveReport minimize(const ObjectiveFn& f, const Vec& x0,
                     const SolveOptions& opts = {});

}  // namespace reach
