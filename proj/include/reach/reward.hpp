#pragma once

#include "reach/types.hpp"

namespace reach {

// Gradients of the expected reward with respect to the end-effector
// position mean and covariance.
struct RewardGradients {
  Vec d_mean;  // dim
  Mat d_cov;   // dim x dim, symmetric
};

// Pointwise Gaussian reward density over end-effector position:
//   r(x) = (2 pi)^(-dim/2) |W|^(-1/2) exp(-1/2 (x-g)^T W^-1 (x-g)).
// Integrates to one over x for any SPD width W.
double reward_density(const Vec& x, const GoalSpec& goal);

// Expected reward of a Gaussian position belief N(mean, cov):
//   R = |2 pi (cov + W)|^(-1/2) exp(-1/2 (mean-g)^T (cov+W)^-1 (mean-g)).
double expected_reward(const Vec& mean, const Mat& cov, const GoalSpec& goal);

// Expected reward together with its analytic gradients:
//   dR/dmean = -R S^-1 d,           S = cov + W,  d = mean - g
//   dR/dcov  = 1/2 R (S^-1 d d^T S^-1 - S^-1).
double expected_reward_grad(const Vec& mean, const Mat& cov,
                            const GoalSpec& goal, RewardGradients* grads);

// Validate that a goal is usable: finite center, symmetric positive-definite
// width. Throws InvalidGoal otherwise.
void validate_goal(const GoalSpec& goal);

}  // namespace reach
