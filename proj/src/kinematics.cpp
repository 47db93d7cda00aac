#include "reach/kinematics.hpp"

#include <cmath>

namespace reach {

Kinematics Kinematics::identity(int n_q, int dim) {
  if (dim < 1 || dim > n_q) {
    throw std::invalid_argument("identity kinematics: need 1 <= dim <= n_q");
  }
  Kinematics k;
  k.kind_ = KinematicsKind::Identity;
  k.n_q_ = n_q;
  k.dim_ = dim;
  return k;
}

Kinematics Kinematics::two_link_planar(double l1, double l2) {
  if (l1 <= 0.0 || l2 <= 0.0) {
    throw std::invalid_argument("two-link kinematics: link lengths must be positive");
  }
  Kinematics k;
  k.kind_ = KinematicsKind::TwoLinkPlanar;
  k.n_q_ = 2;
  k.dim_ = 2;
  k.l1_ = l1;
  k.l2_ = l2;
  return k;
}

Vec Kinematics::forward(const Vec& q) const {
  if (kind_ == KinematicsKind::Identity) {
    return q.head(dim_);
  }
  const double c1 = std::cos(q(0)), s1 = std::sin(q(0));
  const double c12 = std::cos(q(0) + q(1)), s12 = std::sin(q(0) + q(1));
  Vec x(2);
  x << l1_ * c1 + l2_ * c12, l1_ * s1 + l2_ * s12;
  return x;
}

Mat Kinematics::jacobian(const Vec& q) const {
  if (kind_ == KinematicsKind::Identity) {
    Mat J = Mat::Zero(dim_, n_q_);
    J.leftCols(dim_).setIdentity();
    return J;
  }
  const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
  const double s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
  Mat J(2, 2);
  J << -l1_ * s1 - l2_ * s12, -l2_ * s12,  //
      l1_ * c1 + l2_ * c12, l2_ * c12;
  return J;
}

std::vector<Mat> Kinematics::jacobian_derivatives(const Vec& q) const {
  if (kind_ == KinematicsKind::Identity) {
    return std::vector<Mat>(n_q_, Mat::Zero(dim_, n_q_));
  }
  const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
  const double s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
  Mat dJ1(2, 2), dJ2(2, 2);
  // d/dq1 of J
  dJ1 << -l1_ * c1 - l2_ * c12, -l2_ * c12,  //
      -l1_ * s1 - l2_ * s12, -l2_ * s12;
  // d/dq2 of J
  dJ2 << -l2_ * c12, -l2_ * c12,  //
      -l2_ * s12, -l2_ * s12;
  return {dJ1, dJ2};
}

}  // namespace reach
