#include "reach/reward.hpp"

#include <cmath>

namespace reach {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Cholesky of an SPD matrix, throwing InvalidGoal on failure.
Eigen::LLT<Mat> checked_llt(const Mat& S, const char* what) {
  Eigen::LLT<Mat> llt(S);
  if (llt.info() != Eigen::Success) {
    throw InvalidGoal(std::string(what) + ": matrix is not positive definite");
  }
  return llt;
}

}  // namespace

void validate_goal(const GoalSpec& goal) {
  if (goal.center.size() == 0 || !goal.center.allFinite()) {
    throw InvalidGoal("goal center must be a finite, non-empty vector");
  }
  if (goal.width.rows() != goal.center.size() ||
      goal.width.cols() != goal.center.size()) {
    throw InvalidGoal("goal width matrix must be dim x dim");
  }
  if (!goal.width.allFinite() ||
      !goal.width.isApprox(goal.width.transpose(), 1e-12)) {
    throw InvalidGoal("goal width matrix must be finite and symmetric");
  }
  checked_llt(goal.width, "goal width");
}

double reward_density(const Vec& x, const GoalSpec& goal) {
  const int dim = goal.dim();
  const Eigen::LLT<Mat> llt = checked_llt(goal.width, "goal width");
  const Vec d = x - goal.center;
  const Vec half = llt.matrixL().solve(d);  // L^-1 d, so |half|^2 = d^T W^-1 d
  double log_det = 0.0;
  for (int i = 0; i < dim; ++i) {
    log_det += std::log(llt.matrixL()(i, i));
  }
  const double log_r = -0.5 * dim * std::log(kTwoPi) - log_det - 0.5 * half.squaredNorm();
  return std::exp(log_r);
}

double expected_reward(const Vec& mean, const Mat& cov, const GoalSpec& goal) {
  return expected_reward_grad(mean, cov, goal, nullptr);
}

double expected_reward_grad(const Vec& mean, const Mat& cov,
                            const GoalSpec& goal, RewardGradients* grads) {
  const int dim = goal.dim();
  const Mat S = cov + goal.width;
  const Eigen::LLT<Mat> llt = checked_llt(S, "position covariance plus goal width");
  const Vec d = mean - goal.center;
  const Vec half = llt.matrixL().solve(d);
  double log_det = 0.0;
  for (int i = 0; i < dim; ++i) {
    log_det += std::log(llt.matrixL()(i, i));
  }
  const double log_r = -0.5 * dim * std::log(kTwoPi) - log_det - 0.5 * half.squaredNorm();
  const double r = std::exp(log_r);

  if (grads != nullptr) {
    const Mat Sinv = llt.solve(Mat::Identity(dim, dim));
    const Vec Sinv_d = Sinv * d;
    grads->d_mean = -r * Sinv_d;
    grads->d_cov = 0.5 * r * (Sinv_d * Sinv_d.transpose() - Sinv);
  }
  return r;
}

}  // namespace reach
