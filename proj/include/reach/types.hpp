#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace reach {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Gaussian belief over the joint state [q; qdot] (dimension 2*n_q).
struct StateGaussian {
  Vec mean;
  Mat cov;

  static StateGaussian zero(int n_q) {
    StateGaussian s;
    s.mean = Vec::Zero(2 * n_q);
    s.cov = Mat::Zero(2 * n_q, 2 * n_q);
    return s;
  }
};

// Goal region: center position and an SPD width matrix W (m^2).
// For the common isotropic case W = diag(width^2).
struct GoalSpec {
  Vec center;
  Mat width;

  GoalSpec() = default;
  GoalSpec(Vec c, Mat w) : center(std::move(c)), width(std::move(w)) {}
  // Scalar convenience: W = (w*w) * I.
  GoalSpec(Vec c, double w)
      : center(std::move(c)),
        width(Mat::Identity(center.size(), center.size()) * (w * w)) {}

  int dim() const { return static_cast<int>(center.size()); }
  // Scalar width proxy: sqrt of the leading diagonal entry of W.
  double scalar_width() const { return std::sqrt(width(0, 0)); }
};

struct InvalidGoal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularInertia : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MovementIncomplete : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateRegression : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IllConditionedGram : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstraintInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace reach
