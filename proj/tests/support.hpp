#pragma once

// Shared test utilities: Gauss-Legendre quadrature (reference integrals for
// the reward model) and a deterministic value generator for test inputs.

#include <cmath>
#include <functional>
#include <utility>

#include "reach/rollout.hpp"
#include "reach/types.hpp"

namespace test_support {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], computed
// by Newton iteration on the Legendre polynomial (standard construction).
inline std::pair<reach::Vec, reach::Vec> gauss_legendre(int n) {
  constexpr double kPi = 3.14159265358979323846;
  reach::Vec x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(t) and its derivative by the three-term recurrence.
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15) {
        break;
      }
    }
    x(i) = t;
    w(i) = 2.0 / ((1.0 - t * t) * pp * pp);
  }
  return {x, w};
}

// Tensor-product integral of f over [ax,bx] x [ay,by] with n nodes per axis.
inline double integrate_2d(const std::function<double(double, double)>& f,
                           double ax, double bx, double ay, double by,
                           int n = 96) {
  const auto [x, w] = gauss_legendre(n);
  const double cx = 0.5 * (ax + bx), hx = 0.5 * (bx - ax);
  const double cy = 0.5 * (ay + by), hy = 0.5 * (by - ay);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = cx + hx * x(i);
    double inner = 0.0;
    for (int j = 0; j < n; ++j) {
      inner += w(j) * f(xi, cy + hy * x(j));
    }
    total += w(i) * inner;
  }
  return total * hx * hy;
}

// Deterministic stream of standard normals for building test inputs.
class ValueStream {
 public:
  explicit ValueStream(std::uint64_t seed)
      : rng_(reach::splitmix64(seed)) {}

  double normal() { return rng_.next(); }
  double uniform(double lo, double hi) {
    // Uses the normal CDF-free route: fold a normal into (0,1) via erf.
    const double u = 0.5 * (1.0 + std::erf(rng_.next() / std::sqrt(2.0)));
    return lo + (hi - lo) * u;
  }
  reach::Vec normal_vec(int n, double scale = 1.0) {
    reach::Vec v(n);
    for (int i = 0; i < n; ++i) {
      v(i) = scale * rng_.next();
    }
    return v;
  }
  // Random SPD matrix A A^T + floor I with entries of the given scale.
  reach::Mat spd(int n, double scale, double floor) {
    reach::Mat A(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        A(i, j) = scale * rng_.next();
      }
    }
    return A * A.transpose() + floor * reach::Mat::Identity(n, n);
  }

 private:
  reach::GaussianStream rng_;
};

}  // namespace test_support
