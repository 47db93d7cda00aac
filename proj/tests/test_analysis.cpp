#include "reach/analysis.hpp"

#include <cmath>

#include "doctest.h"

using namespace reach;

TEST_CASE("path speed is exact on a quadratic path") {
  // p(t) = (a t^2, b t): central differences recover the derivative of a
  // quadratic exactly, so interior speeds must match analytically.
  const double h = 0.01, a = 2.0, b = 0.5;
  const int T = 40;
  Mat path(T + 1, 2);
  for (int i = 0; i <= T; ++i) {
    const double t = h * i;
    path(i, 0) = a * t * t;
    path(i, 1) = b * t;
  }
  const Vec speed = path_speed(path, h);
  REQUIRE(speed.size() == T + 1);
  for (int i = 1; i < T; ++i) {
    const double t = h * i;
    const double want = std::hypot(2.0 * a * t, b);
    CHECK(speed(i) == doctest::Approx(want).epsilon(1e-12));
  }
  // One-sided ends are first-order but finite.
  CHECK(std::isfinite(speed(0)));
  CHECK(std::isfinite(speed(T)));
}

TEST_CASE("velocity metrics on a synthetic bell profile") {
  // Piecewise-linear speed: ramp up to the peak at step 10, down to zero at
  // step 30, then hold at the goal. Built by integrating the speed along +x.
  const double h = 0.01;
  const int T = 40;
  Vec speed(T + 1);
  for (int i = 0; i <= T; ++i) {
    if (i <= 10) {
      speed(i) = 0.1 * i;
    } else if (i <= 30) {
      speed(i) = 1.0 - 0.05 * (i - 10);
    } else {
      speed(i) = 0.0;
    }
  }
  Mat path(T + 1, 2);
  path.setZero();
  for (int i = 1; i <= T; ++i) {
    path(i, 0) = path(i - 1, 0) + h * 0.5 * (speed(i) + speed(i - 1));
  }
  const double travel = path(T, 0);

  Vec center(2);
  center << travel, 0.0;
  const GoalSpec goal(center, 0.05);
  const VelocityMetrics m = velocity_metrics(path, h, goal);

  CHECK(m.peak_speed == doctest::Approx(1.0).epsilon(0.02));
  CHECK(m.peak_time == doctest::Approx(0.10).epsilon(0.05));
  // Speed reaches 5% of the peak within a step or two of step 29.
  CHECK(m.movement_time > 0.25);
  CHECK(m.movement_time < 0.34);
  CHECK(m.asymmetry == doctest::Approx(m.peak_time / m.movement_time));
}

TEST_CASE("velocity metrics reject a path that never arrives") {
  const double h = 0.01;
  Mat path(21, 2);
  for (int i = 0; i <= 20; ++i) {
    path(i, 0) = 0.01 * i;  // crawls to x = 0.2
    path(i, 1) = 0.0;
  }
  Vec center(2);
  center << 5.0, 0.0;  // far beyond the path
  const GoalSpec goal(center, 0.02);
  CHECK_THROWS_AS(velocity_metrics(path, h, goal), MovementIncomplete);
}

TEST_CASE("movement time depends on difficulty, not raw scale") {
  // Same index of difficulty log2(2 D / w): movement times should be close.
  const PlantModel plant = PlantModel::planar_default();
  const StateGaussian s0 = StateGaussian::zero(2);
  CostParams cost;
  cost.goal = GoalSpec(Vec::Zero(2), 0.02);  // placeholder, replaced per cell

  const auto mt_for = [&](double D, double w) {
    const std::vector<FittsDatum> data =
        fitts_sweep({D}, {w}, s0, plant, cost, 0, 1);
    REQUIRE(data.size() == 1);
    return data[0].movement_time;
  };
  const double a = mt_for(0.15, 0.01);
  const double b = mt_for(0.30, 0.02);
  CHECK(std::abs(a - b) / b < 0.15);
}

TEST_CASE("fitts fit recovers an exact linear law") {
  std::vector<FittsDatum> data;
  for (double id : {2.0, 3.0, 4.0, 5.0}) {
    FittsDatum d;
    d.id_bits = id;
    d.movement_time = 0.12 + 0.045 * id;
    data.push_back(d);
  }
  const FittsFit fit = fitts_fit(data);
  CHECK(fit.intercept == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(fit.slope == doctest::Approx(0.045).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.spearman_rho == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fitts fit rejects degenerate inputs") {
  std::vector<FittsDatum> two(2);
  two[0].id_bits = 1.0;
  two[1].id_bits = 2.0;
  CHECK_THROWS_AS(fitts_fit(two), DegenerateRegression);

  std::vector<FittsDatum> flat(4);
  for (auto& d : flat) {
    d.id_bits = 3.0;  // zero variance in the regressor
    d.movement_time = 0.3;
  }
  CHECK_THROWS_AS(fitts_fit(flat), DegenerateRegression);
}

TEST_CASE("mean-plan sweep covers the full grid") {
  const PlantModel plant = PlantModel::planar_default();
  const StateGaussian s0 = StateGaussian::zero(2);
  CostParams cost;
  cost.goal = GoalSpec(Vec::Zero(2), 0.02);

  std::vector<std::string> notes;
  const std::vector<FittsDatum> data =
      fitts_sweep({0.15, 0.3, 0.45}, {0.005, 0.01, 0.02, 0.04}, s0, plant,
                  cost, 0, 1, SolveOptions{}, AnalysisOptions{}, &notes);
  CHECK(data.size() == 12);
  CHECK(notes.empty());
  for (const FittsDatum& d : data) {
    CHECK(d.movement_time > 0.0);
    CHECK(d.movement_time < 1.0);
    CHECK(d.id_bits ==
          doctest::Approx(std::log2(2.0 * d.distance / d.width)));
    CHECK(d.valid_trials == 0);
  }
  // Harder cells take longer on average: check the fit has positive slope.
  const FittsFit fit = fitts_fit(data);
  CHECK(fit.slope > 0.0);
  CHECK(fit.r_squared > 0.8);
}
