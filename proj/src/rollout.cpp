#include "reach/rollout.hpp"

#include <cmath>
#include <random>

namespace reach {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = kTwoPi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

RolloutEnsemble rollout(const Mat& torques, const StateGaussian& s0,
                        const PlantModel& plant, double h, int trials,
                        std::uint64_t seed) {
  const int n = plant.n_q;
  const int H = static_cast<int>(torques.rows());
  const int dim = plant.kinematics.dim();
  const Vec noise_std = plant.noise_cov.cwiseSqrt();

  RolloutEnsemble ens;
  ens.step = h;
  ens.states.reserve(trials);
  ens.ee_paths.reserve(trials);

  for (int t = 0; t < trials; ++t) {
    GaussianStream rng(trial_stream_key(seed, static_cast<std::uint64_t>(t)));

    Mat path(H + 1, 2 * n);
    Mat ee(H + 1, dim);
    Vec x = s0.mean;
    path.row(0) = x.transpose();
    ee.row(0) = plant.kinematics.forward(x.head(n)).transpose();

    for (int i = 0; i < H; ++i) {
      const Vec q = x.head(n), v = x.tail(n);
      Vec tau = torques.row(i).transpose();
      for (int j = 0; j < n; ++j) {
        tau(j) *= 1.0 + noise_std(j) * rng.next();
      }
      const Mat M = plant.inertia_at(q);
      const Vec acc =
          M.ldlt().solve(tau - plant.damping * v - plant.gravity_at(q));
      x.head(n) = q + h * v;
      x.tail(n) = v + h * acc;
      path.row(i + 1) = x.transpose();
      ee.row(i + 1) = plant.kinematics.forward(x.head(n)).transpose();
    }
    ens.states.push_back(std::move(path));
    ens.ee_paths.push_back(std::move(ee));
  }
  return ens;
}

EndpointStats endpoint_stats(const RolloutEnsemble& ens, const GoalSpec& goal) {
  const int trials = ens.trials();
  if (trials == 0) {
    throw std::invalid_argument("endpoint_stats: empty ensemble");
  }
  const int dim = static_cast<int>(ens.ee_paths.front().cols());
  const Vec radius = goal.width.diagonal().cwiseSqrt();

  Mat ends(trials, dim);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const Vec end = ens.ee_paths[t].bottomRows(1).transpose();
    ends.row(t) = end.transpose();
    const Vec err = (end - goal.center).cwiseAbs();
    if ((err.array() < radius.array()).all()) {
      ++hits;
    }
  }

  EndpointStats stats;
  stats.mean = ends.colwise().mean().transpose();
  const Mat centered = ends.rowwise() - stats.mean.transpose();
  stats.cov = (trials > 1)
                  ? Mat((centered.transpose() * centered) / double(trials - 1))
                  : Mat::Zero(dim, dim);
  stats.hit_rate = static_cast<double>(hits) / trials;
  return stats;
}

Vec dispersion_profile(const RolloutEnsemble& ens) {
  const int trials = ens.trials();
  const int steps = ens.steps();
  if (steps == 0) {
    return Vec();
  }
  const int dim = static_cast<int>(ens.ee_paths.front().cols());
  Vec profile = Vec::Zero(steps);
  if (trials < 2) {
    return profile;
  }
  for (int i = 0; i < steps; ++i) {
    Mat pts(trials, dim);
    for (int t = 0; t < trials; ++t) {
      pts.row(t) = ens.ee_paths[t].row(i);
    }
    const Eigen::RowVectorXd mean = pts.colwise().mean();
    const Mat centered = pts.rowwise() - mean;
    const double trace_cov =
        (centered.transpose() * centered).trace() / double(trials - 1);
    profile(i) = std::sqrt(trace_cov);
  }
  return profile;
}

}  // namespace reach
