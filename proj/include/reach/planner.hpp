#pragma once

#include <optional>
#include <vector>

#include "reach/dynamics.hpp"
#include "reach/reward.hpp"
#include "reach/solver.hpp"
#include "reach/types.hpp"

namespace reach {

// Cost of a planning problem: discounted expected reward accumulated at every
// step minus a quadratic effort penalty,
//   J(tau) = sum_i -gamma^i R(mu_i, Sigma_i) + effort * sum_i |tau_i|^2,
// minimized over the torque sequence.
struct CostParams {
  GoalSpec goal;
  double discount = 0.995;    // gamma in (0, 1]
  double effort = 1e-5;       // weight on squared torque
  int horizon = 30;           // number of steps H
  double step = 0.02;         // step length h in seconds
};

struct PlanResult {
  Mat torques;                        // H x n_q
  std::vector<StateGaussian> states;  // H+1 beliefs, states[0] = s0
  std::vector<LtiStep> steps;         // per-step models the states were built with
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;   // total inner-solver iterations
  double wall_time_s = 0.0;
  bool converged = false;
};

// Objective value (and gradient w.r.t. the torques) for a fixed per-step
// linearization. The reward is evaluated on the end-effector distribution
// obtained by pushing each belief through the kinematics linearized at the
// belief mean; the gradient accounts for that dependence analytically.
double objective_value(const Mat& torques, const StateGaussian& s0,
                       const std::vector<LtiStep>& steps,
                       const PlantModel& plant, const CostParams& cost,
                       Mat* grad = nullptr);

// Convenience wrapper that linearizes along the torques' own nominal path
// before evaluating. For constant-inertia plants this equals objective_value
// with the single shared step model.
double objective(const Mat& torques, const StateGaussian& s0,
                 const PlantModel& plant, const CostParams& cost);

// Plan a torque sequence from belief s0. Torques start at zero (or at
// `warm_start` when given) and are refined through a coarse-to-fine schedule
// of goal widths: wide surrogate goals give the flat far-field reward a
// usable gradient, and each solution seeds the next narrower stage. Nonlinear
// plants are handled by sequential linearization (re-linearize once per outer
// pass, solve, repeat until the nominal path settles).
PlanResult plan(const StateGaussian& s0, const PlantModel& plant,
                const CostParams& cost, const SolveOptions& solver = {},
                const Mat* warm_start = nullptr);

struct EstimateOptions {
  double constraint_tol = 1e-6;  // infinity norm on the state residual
  double penalty_start = 1e2;
  double penalty_factor = 10.0;
  int penalty_rounds = 6;
  double goal_reg = 1.0;  // weight on |ghat - gbar|^2 in the prior metric
  // Rounds during which the goal center stays frozen at the prior. While the
  // penalty weight is still loose, a jointly free goal lets the solver trade
  // the observation away for degenerate "arrive sooner at a nearer goal"
  // explanations; freezing keeps the estimate in the prior's basin, which is
  // the regime where a single observed state identifies the goal.
  int goal_freeze_rounds = 3;
  // The penalty subproblems are far worse conditioned than plain planning,
  // so the inner solver gets a deeper history and a larger iteration budget.
  SolveOptions solver{.max_iters = 4000, .history = 40};
};

struct GoalEstimate {
  Vec goal;                           // estimated goal center
  Mat torques;                        // reconstructed H x n_q plan
  std::vector<StateGaussian> states;  // beliefs under that plan
  double constraint_residual = 0.0;   // | mu(t_obs) - observed |_inf
  double objective = 0.0;             // planning objective at the solution
  bool converged = false;             // residual within constraint_tol
};

// Infer the goal a partially observed reach is aiming at. Finds the goal
// center and torque sequence that minimize the planning objective plus a
// prior-anchored regularizer, subject to the plan's mean state at time t_obs
// matching the observed state. The constraint is enforced with an augmented
// Lagrangian: quadratic penalty escalated by penalty_factor each round plus a
// multiplier update, which drives the residual far below what the penalty
// alone can reach. Throws ConstraintInfeasible when the residual stalls more
// than three orders of magnitude above constraint_tol.
GoalEstimate estimate_goal(const StateGaussian& s0, const Vec& observed_state,
                           double t_obs, const GoalSpec& prior,
                           const PlantModel& plant, const CostParams& cost,
                           const EstimateOptions& opts = {});

}  // namespace reach
