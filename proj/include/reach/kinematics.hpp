#pragma once

#include <vector>

#include "reach/types.hpp"

namespace reach {

enum class KinematicsKind {
  Identity,       // end effector = first `dim` joint coordinates
  TwoLinkPlanar,  // planar 2R arm, joint angles -> Cartesian (x, y)
};

// Forward-kinematics map from joint configuration to end-effector position,
// with analytic Jacobian and Jacobian derivatives (needed when covariance is
// pushed through the map and differentiated again).
class Kinematics {
 public:
  // Identity map on the first `dim` joints of an n_q-joint plant.
  static Kinematics identity(int n_q, int dim);
  // Planar two-link arm with given link lengths.
  static Kinematics two_link_planar(double l1, double l2);

  KinematicsKind kind() const { return kind_; }
  int n_q() const { return n_q_; }
  int dim() const { return dim_; }
  double l1() const { return l1_; }
  double l2() const { return l2_; }

  // End-effector position x(q), size `dim`.
  Vec forward(const Vec& q) const;
  // Jacobian dx/dq, size dim x n_q.
  Mat jacobian(const Vec& q) const;
  // Partial derivatives of the Jacobian: tensor[k] = d(jacobian)/dq_k.
  std::vector<Mat> jacobian_derivatives(const Vec& q) const;

 private:
  KinematicsKind kind_ = KinematicsKind::Identity;
  int n_q_ = 0;
  int dim_ = 0;
  double l1_ = 0.0, l2_ = 0.0;
};

}  // namespace reach
