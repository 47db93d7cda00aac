#pragma once

#include <vector>

#include "reach/kinematics.hpp"
#include "reach/types.hpp"

namespace reach {

// How torque-dependent noise enters the covariance update.
enum class NoiseForm {
  // Zero-mean signal-dependent disturbance: B diag(tau) K diag(tau) B^T.
  Corrected,
  // Uncentered second moment: B (tau tau^T + diag(tau) K diag(tau)) B^T.
  Literal,
};

enum class InertiaModel {
  Constant,       // fixed inertia matrix
  TwoLinkPlanar,  // configuration-dependent 2R-arm inertia
};

// Second-order plant  M(q) qddot + D qdot + G(q) = tau .* (1 + eps),
// eps ~ N(0, K) per joint, discretized with a semi-implicit Euler step in
// which the position update uses the pre-step velocity.
struct PlantModel {
  int n_q = 2;
  InertiaModel inertia_model = InertiaModel::Constant;
  Mat inertia;   // used when inertia_model == Constant
  Mat damping;   // D, n_q x n_q
  Vec noise_cov; // diagonal of K (relative torque-noise variances)
  Kinematics kinematics = Kinematics::identity(2, 2);
  NoiseForm noise_form = NoiseForm::Corrected;
  bool gravity_enabled = false;

  // Two-link physical parameters (point masses at the link tips).
  double link_mass1 = 1.0;
  double link_mass2 = 1.0;

  // Inertia matrix at configuration q.
  Mat inertia_at(const Vec& q) const;
  // Gravity torque at configuration q (zero when gravity is disabled).
  Vec gravity_at(const Vec& q) const;

  // Planar point-to-point defaults matching the reaching benchmarks:
  // M = 2 I, D = 0.3 I, identity kinematics.
  static PlantModel planar_default();
  // Three-axis Cartesian plant (identity kinematics on 3 joints).
  static PlantModel cartesian_default();
  // Two-link arm with total reach l1 + l2 = 0.6 m.
  static PlantModel two_link_default();
};

// One discrete step x' = A x + B u with torque-noise covariance rule attached.
struct LtiStep {
  Mat A;  // 2n x 2n
  Mat B;  // 2n x n
  Vec feedforward;  // additive mean term (gravity), size 2n
};

// Exact discretization of the plant linearized at configuration q_lin.
LtiStep discretize(const PlantModel& plant, const Vec& q_lin, double h);

// One-step Gaussian propagation under torque tau.
StateGaussian propagate(const StateGaussian& s, const Vec& tau,
                        const LtiStep& step, const PlantModel& plant);

// Propagate a whole torque sequence (H x n_q) from s0 through the per-step
// models; returns H+1 beliefs, first entry equal to s0.
std::vector<StateGaussian> propagate_trajectory(
    const StateGaussian& s0, const Mat& torques,
    const std::vector<LtiStep>& steps, const PlantModel& plant);

// Deterministic (noise-free) mean rollout of the *nonlinear* plant; returns
// the (H+1) x 2n_q state path. Used to pick linearization points.
Mat nominal_path(const StateGaussian& s0, const Mat& torques,
                 const PlantModel& plant, double h);

// Build the per-step linearization along a nominal state path
// ((H+1) x 2n_q); steps[i] is linearized at the configuration of row i.
std::vector<LtiStep> linearize_along(const PlantModel& plant, const Mat& path,
                                     double h);

}  // namespace reach
