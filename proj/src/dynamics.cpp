#include "reach/dynamics.hpp"

#include <cmath>

namespace reach {

namespace {
constexpr double kGravityAccel = 9.81;
}

Mat PlantModel::inertia_at(const Vec& q) const {
  if (inertia_model == InertiaModel::Constant) {
    return inertia;
  }
  // Planar 2R arm with point masses m1, m2 at the link tips.
  const double l1 = kinematics.l1(), l2 = kinematics.l2();
  const double c2 = std::cos(q(1));
  const double m1 = link_mass1, m2 = link_mass2;
  Mat M(2, 2);
  const double m11 = (m1 + m2) * l1 * l1 + m2 * l2 * l2 + 2.0 * m2 * l1 * l2 * c2;
  const double m12 = m2 * l2 * l2 + m2 * l1 * l2 * c2;
  const double m22 = m2 * l2 * l2;
  M << m11, m12, m12, m22;
  return M;
}

Vec PlantModel::gravity_at(const Vec& q) const {
  if (!gravity_enabled) {
    return Vec::Zero(n_q);
  }
  if (inertia_model == InertiaModel::Constant) {
    return Vec::Zero(n_q);
  }
  const double l1 = kinematics.l1(), l2 = kinematics.l2();
  const double m1 = link_mass1, m2 = link_mass2;
  const double c1 = std::cos(q(0));
  const double c12 = std::cos(q(0) + q(1));
  Vec g(2);
  g << (m1 + m2) * kGravityAccel * l1 * c1 + m2 * kGravityAccel * l2 * c12,
      m2 * kGravityAccel * l2 * c12;
  return g;
}

PlantModel PlantModel::planar_default() {
  PlantModel p;
  p.n_q = 2;
  p.inertia = 2.0 * Mat::Identity(2, 2);
  p.damping = 0.3 * Mat::Identity(2, 2);
  p.noise_cov = Vec::Constant(2, 5e-4);
  p.kinematics = Kinematics::identity(2, 2);
  return p;
}

PlantModel PlantModel::cartesian_default() {
  PlantModel p;
  p.n_q = 3;
  p.inertia = 2.0 * Mat::Identity(3, 3);
  p.damping = 0.3 * Mat::Identity(3, 3);
  p.noise_cov = Vec::Constant(3, 5e-4);
  p.kinematics = Kinematics::identity(3, 3);
  return p;
}

PlantModel PlantModel::two_link_default() {
  PlantModel p;
  p.n_q = 2;
  p.inertia_model = InertiaModel::TwoLinkPlanar;
  p.inertia = Mat::Identity(2, 2);  // unused placeholder
  p.damping = 0.3 * Mat::Identity(2, 2);
  p.noise_cov = Vec::Constant(2, 5e-4);
  p.kinematics = Kinematics::two_link_planar(0.3, 0.3);
  return p;
}

LtiStep discretize(const PlantModel& plant, const Vec& q_lin, double h) {
  const int n = plant.n_q;
  const Mat M = plant.inertia_at(q_lin);
  Eigen::LDLT<Mat> ldlt(M);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularInertia("inertia matrix is not positive definite at the linearization point");
  }
  const Mat Minv = ldlt.solve(Mat::Identity(n, n));

  LtiStep step;
  step.A = Mat::Zero(2 * n, 2 * n);
  step.A.topLeftCorner(n, n).setIdentity();
  step.A.topRightCorner(n, n) = h * Mat::Identity(n, n);
  step.A.bottomRightCorner(n, n) = Mat::Identity(n, n) - h * Minv * plant.damping;

  step.B = Mat::Zero(2 * n, n);
  step.B.bottomRows(n) = h * Minv;

  step.feedforward = Vec::Zero(2 * n);
  if (plant.gravity_enabled) {
    step.feedforward.tail(n) = -h * Minv * plant.gravity_at(q_lin);
  }
  return step;
}

StateGaussian propagate(const StateGaussian& s, const Vec& tau,
                        const LtiStep& step, const PlantModel& plant) {
  StateGaussian out;
  out.mean = step.A * s.mean + step.B * tau + step.feedforward;

  const Vec scaled = plant.noise_cov.cwiseProduct(tau.cwiseProduct(tau));
  Mat noise_second_moment = scaled.asDiagonal();
  if (plant.noise_form == NoiseForm::Literal) {
    noise_second_moment += tau * tau.transpose();
  }
  out.cov = step.A * s.cov * step.A.transpose() +
            step.B * noise_second_moment * step.B.transpose();
  // Keep the covariance exactly symmetric against round-off drift.
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

std::vector<StateGaussian> propagate_trajectory(
    const StateGaussian& s0, const Mat& torques,
    const std::vector<LtiStep>& steps, const PlantModel& plant) {
  const int H = static_cast<int>(torques.rows());
  if (static_cast<int>(steps.size()) < H) {
    throw std::invalid_argument("propagate_trajectory: fewer step models than torques");
  }
  std::vector<StateGaussian> states;
  states.reserve(H + 1);
  states.push_back(s0);
  for (int i = 0; i < H; ++i) {
    states.push_back(propagate(states.back(), torques.row(i).transpose(),
                               steps[i], plant));
  }
  return states;
}

Mat nominal_path(const StateGaussian& s0, const Mat& torques,
                 const PlantModel& plant, double h) {
  const int n = plant.n_q;
  const int H = static_cast<int>(torques.rows());
  Mat path(H + 1, 2 * n);
  Vec x = s0.mean;
  path.row(0) = x.transpose();
  for (int i = 0; i < H; ++i) {
    const Vec q = x.head(n), v = x.tail(n);
    const Mat M = plant.inertia_at(q);
    const Vec rhs = torques.row(i).transpose() - plant.damping * v - plant.gravity_at(q);
    const Vec acc = M.ldlt().solve(rhs);
    // Position first (pre-step velocity), then velocity: matches discretize().
    x.head(n) = q + h * v;
    x.tail(n) = v + h * acc;
    path.row(i + 1) = x.transpose();
  }
  return path;
}

std::vector<LtiStep> linearize_along(const PlantModel& plant, const Mat& path,
                                     double h) {
  const int n = plant.n_q;
  std::vector<LtiStep> steps;
  const int H = static_cast<int>(path.rows()) - 1;
  steps.reserve(H);
  if (plant.inertia_model == InertiaModel::Constant && !plant.gravity_enabled) {
    // Time-invariant plant: one model shared across all steps.
    const LtiStep step = discretize(plant, path.row(0).head(n).transpose(), h);
    steps.assign(H, step);
    return steps;
  }
  for (int i = 0; i < H; ++i) {
    steps.push_back(discretize(plant, path.row(i).head(n).transpose(), h));
  }
  return steps;
}

}  // namespace reach
