#include "reach/rollout.hpp"

#include <cmath>

#include "doctest.h"
#include "reach/planner.hpp"
#include "support.hpp"

using namespace reach;

namespace {

struct PlanFixture {
  PlantModel plant = PlantModel::planar_default();
  CostParams cost;
  StateGaussian s0 = StateGaussian::zero(2);
  PlanResult pr;

  explicit PlanFixture(double distance = 0.45, double width = 0.02) {
    Vec center(2);
    center << distance, 0.0;
    cost.goal = GoalSpec(center, width);
    pr = plan(s0, plant, cost);
  }
};

}  // namespace

TEST_CASE("rollout is reproducible for a fixed seed and trial count") {
  PlanFixture fx;
  const RolloutEnsemble a = rollout(fx.pr.torques, fx.s0, fx.plant,
                                    fx.cost.step, 32, 123);
  const RolloutEnsemble b = rollout(fx.pr.torques, fx.s0, fx.plant,
                                    fx.cost.step, 32, 123);
  REQUIRE(a.trials() == 32);
  for (int t = 0; t < 32; ++t) {
    CHECK((a.states[t] - b.states[t]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("trial streams do not depend on the trial count") {
  PlanFixture fx;
  const RolloutEnsemble small = rollout(fx.pr.torques, fx.s0, fx.plant,
                                        fx.cost.step, 8, 7);
  const RolloutEnsemble large = rollout(fx.pr.torques, fx.s0, fx.plant,
                                        fx.cost.step, 64, 7);
  for (int t = 0; t < 8; ++t) {
    CHECK((small.states[t] - large.states[t]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("noise-free rollout reproduces the nominal path") {
  PlanFixture fx;
  PlantModel quiet = fx.plant;
  quiet.noise_cov.setZero();
  const RolloutEnsemble ens = rollout(fx.pr.torques, fx.s0, quiet,
                                      fx.cost.step, 3, 99);
  const Mat path = nominal_path(fx.s0, fx.pr.torques, quiet, fx.cost.step);
  for (int t = 0; t < 3; ++t) {
    CHECK((ens.states[t] - path).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sample moments agree with the propagated belief") {
  PlanFixture fx;
  const int trials = 20000;
  const RolloutEnsemble ens = rollout(fx.pr.torques, fx.s0, fx.plant,
                                      fx.cost.step, trials, 2024);
  const std::vector<StateGaussian> belief =
      propagate_trajectory(fx.s0, fx.pr.torques, fx.pr.steps, fx.plant);
  const int last = ens.steps() - 1;

  Vec mean = Vec::Zero(4);
  for (int t = 0; t < trials; ++t) mean += ens.states[t].row(last).transpose();
  mean /= trials;
  Mat cov = Mat::Zero(4, 4);
  for (int t = 0; t < trials; ++t) {
    const Vec d = ens.states[t].row(last).transpose() - mean;
    cov += d * d.transpose();
  }
  cov /= trials - 1;

  const StateGaussian& ref = belief.back();
  for (int i = 0; i < 4; ++i) {
    const double se = std::sqrt(ref.cov(i, i) / trials);
    CHECK(std::abs(mean(i) - ref.mean(i)) <= 4.0 * se + 1e-12);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double se = std::sqrt(
          (ref.cov(i, i) * ref.cov(j, j) + ref.cov(i, j) * ref.cov(i, j)) /
          trials);
      CHECK(std::abs(cov(i, j) - ref.cov(i, j)) <= 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("endpoint statistics use componentwise containment") {
  // Two synthetic trials around a goal of half-width 0.02: one inside on
  // both axes, one inside only on x.
  RolloutEnsemble ens;
  ens.step = 0.02;
  Mat a(2, 4), b(2, 4);
  a.setZero();
  b.setZero();
  a.row(1) << 0.31, 0.01, 0.0, 0.0;   // |dx|=0.01, |dy|=0.01 -> hit
  b.row(1) << 0.305, 0.025, 0.0, 0.0;  // |dy|=0.025 > 0.02 -> miss
  ens.states = {a, b};
  ens.ee_paths = ens.states;  // identity kinematics: ee == q
  for (auto& p : ens.ee_paths) p = p.leftCols(2).eval();

  Vec center(2);
  center << 0.3, 0.0;
  const GoalSpec goal(center, 0.02);
  const EndpointStats st = endpoint_stats(ens, goal);
  CHECK(st.hit_rate == doctest::Approx(0.5));
  CHECK(st.mean.size() == 2);
  CHECK(st.cov.rows() == 2);
}

TEST_CASE("open-loop dispersion grows monotonically to the final step") {
  // Without feedback nothing contracts the ensemble: torque noise injected at
  // every step only accumulates, so the positional spread at each step
  // dominates every earlier step (up to sampling jitter) and the maximum
  // lands on the final step.
  PlanFixture fx;
  for (std::uint64_t seed : {11ull, 22ull, 33ull, 44ull, 55ull}) {
    const RolloutEnsemble ens = rollout(fx.pr.torques, fx.s0, fx.plant,
                                        fx.cost.step, 400, seed);
    const Vec prof = dispersion_profile(ens);
    int peak = 0;
    prof.maxCoeff(&peak);
    CHECK(peak == prof.size() - 1);
    CHECK(prof(prof.size() - 1) > prof(prof.size() / 2));
    CHECK(prof(prof.size() / 2) > prof(1));
    bool near_monotone = true;
    for (int i = 1; i < prof.size(); ++i) {
      if (prof(i) < 0.95 * prof(i - 1)) near_monotone = false;
    }
    CHECK(near_monotone);
  }
}

TEST_CASE("trial stream key mixes seed and trial index") {
  CHECK(trial_stream_key(1, 0) != trial_stream_key(1, 1));
  CHECK(trial_stream_key(1, 0) != trial_stream_key(2, 0));
  CHECK(trial_stream_key(7, 5) == trial_stream_key(7, 5));
}

TEST_CASE("gaussian stream produces standard-normal-looking samples") {
  GaussianStream gs(987654321);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = gs.next();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
