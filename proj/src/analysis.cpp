#include "reach/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace reach {

Vec path_speed(const Mat& ee_path, double h) {
  const int T = static_cast<int>(ee_path.rows());
  Vec speed(T);
  if (T == 1) {
    speed(0) = 0.0;
    return speed;
  }
  speed(0) = (ee_path.row(1) - ee_path.row(0)).norm() / h;
  for (int i = 1; i + 1 < T; ++i) {
    speed(i) = (ee_path.row(i + 1) - ee_path.row(i - 1)).norm() / (2.0 * h);
  }
  speed(T - 1) = (ee_path.row(T - 1) - ee_path.row(T - 2)).norm() / h;
  return speed;
}

VelocityMetrics velocity_metrics(const Mat& ee_path, double h,
                                 const GoalSpec& goal,
                                 const AnalysisOptions& opts) {
  const int T = static_cast<int>(ee_path.rows());
  const Vec radius = goal.width.diagonal().cwiseSqrt();

  // Reachability pre-check: the path must at least approach the goal region.
  bool approached = false;
  for (int i = 0; i < T && !approached; ++i) {
    const Vec err =
        (ee_path.row(i).transpose() - goal.center).cwiseAbs();
    approached = (err.array() < 3.0 * radius.array()).all();
  }
  if (!approached) {
    throw MovementIncomplete("path never approaches the goal region");
  }

  const Vec speed = path_speed(ee_path, h);
  int peak = 0;
  for (int i = 1; i < T; ++i) {
    if (speed(i) > speed(peak)) {
      peak = i;
    }
  }
  if (speed(peak) <= 0.0) {
    throw MovementIncomplete("path shows no movement");
  }

  const double threshold = opts.stop_speed_frac * speed(peak);
  int stop = -1;
  for (int i = peak; i < T; ++i) {
    const Vec err = (ee_path.row(i).transpose() - goal.center).cwiseAbs();
    if (speed(i) < threshold && (err.array() < radius.array()).all()) {
      stop = i;
      break;
    }
  }
  if (stop < 0) {
    throw MovementIncomplete("path never settles inside the goal region");
  }

  // Sub-step refinement: interpolate where the last blocking condition
  // (speed under the stop threshold, each axis inside the goal box) clears,
  // so measured times are not quantized to the integration grid.
  double settle = static_cast<double>(stop);
  if (stop > 0) {
    double frac = 0.0;
    bool blocked = false;
    if (speed(stop - 1) >= threshold) {
      blocked = true;
      frac = std::max(frac, (speed(stop - 1) - threshold) /
                                (speed(stop - 1) - speed(stop)));
    }
    for (int a = 0; a < radius.size(); ++a) {
      const double prev = std::abs(ee_path(stop - 1, a) - goal.center(a));
      const double now = std::abs(ee_path(stop, a) - goal.center(a));
      if (prev >= radius(a)) {
        blocked = true;
        frac = std::max(frac, (prev - radius(a)) / (prev - now));
      }
    }
    if (blocked) {
      settle = stop - 1 + frac;
    }
  }

  VelocityMetrics m;
  m.movement_time = settle * h;
  m.peak_speed = speed(peak);
  m.peak_time = peak * h;
  m.asymmetry = (m.movement_time > 0.0) ? m.peak_time / m.movement_time : 0.0;
  return m;
}

std::vector<FittsDatum> fitts_sweep(const std::vector<double>& distances,
                                    const std::vector<double>& widths,
                                    const StateGaussian& s0,
                                    const PlantModel& plant,
                                    const CostParams& cost_template,
                                    int trials, std::uint64_t seed,
                                    const SolveOptions& solver,
                                    const AnalysisOptions& opts,
                                    std::vector<std::string>* notes) {
  const int n = plant.n_q;
  const Vec start_ee = plant.kinematics.forward(s0.mean.head(n));
  const int dim = static_cast<int>(start_ee.size());

  std::vector<FittsDatum> data;
  std::uint64_t cell = 0;
  for (double distance : distances) {
    for (double width : widths) {
      ++cell;
      Vec center = start_ee;
      center(0) += distance;
      CostParams cost = cost_template;
      cost.goal = GoalSpec(center, width);

      const PlanResult pr = plan(s0, plant, cost, solver);

      FittsDatum d;
      d.distance = distance;
      d.width = width;
      d.id_bits = std::log2(2.0 * distance / width);

      auto note = [&](const std::string& why) {
        if (notes != nullptr) {
          char buf[128];
          std::snprintf(buf, sizeof(buf),
                        "cell distance=%g width=%g skipped: ", distance,
                        width);
          notes->push_back(std::string(buf) + why);
        }
      };

      if (trials == 0) {
        Mat mean_path(cost.horizon + 1, dim);
        for (int i = 0; i <= cost.horizon; ++i) {
          mean_path.row(i) =
              plant.kinematics.forward(pr.states[i].mean.head(n)).transpose();
        }
        try {
          d.movement_time =
              velocity_metrics(mean_path, cost.step, cost.goal, opts)
                  .movement_time;
        } catch (const MovementIncomplete& e) {
          note(e.what());
          continue;
        }
        d.valid_trials = 0;
      } else {
        const RolloutEnsemble ens =
            rollout(pr.torques, s0, plant, cost.step, trials,
                    splitmix64(seed ^ splitmix64(cell)));
        double sum = 0.0;
        int valid = 0;
        for (int t = 0; t < trials; ++t) {
          try {
            sum += velocity_metrics(ens.ee_paths[t], cost.step, cost.goal, opts)
                       .movement_time;
            ++valid;
          } catch (const MovementIncomplete&) {
            // Incomplete trials carry no movement time; skip them.
          }
        }
        if (valid == 0) {
          note("no trial completed the movement");
          continue;
        }
        d.movement_time = sum / valid;
        d.valid_trials = valid;
      }
      data.push_back(d);
    }
  }
  return data;
}

namespace {

// Average ranks with ties sharing their mean rank.
Vec ranks_of(const std::vector<double>& v) {
  const int N = static_cast<int>(v.size());
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return v[a] < v[b]; });
  Vec ranks(N);
  int i = 0;
  while (i < N) {
    int j = i;
    while (j + 1 < N && v[order[j + 1]] == v[order[i]]) {
      ++j;
    }
    const double mean_rank = 0.5 * (i + j) + 1.0;
    for (int k = i; k <= j; ++k) {
      ranks(order[k]) = mean_rank;
    }
    i = j + 1;
  }
  return ranks;
}

double pearson(const Vec& a, const Vec& b) {
  const double ma = a.mean(), mb = b.mean();
  const Vec da = a.array() - ma, db = b.array() - mb;
  const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
  return (denom > 0.0) ? da.dot(db) / denom : 0.0;
}

}  // namespace

FittsFit fitts_fit(const std::vector<FittsDatum>& data) {
  const int N = static_cast<int>(data.size());
  if (N < 3) {
    throw DegenerateRegression("need at least three sweep cells to fit");
  }
  std::vector<double> id(N), mt(N);
  for (int i = 0; i < N; ++i) {
    id[i] = data[i].id_bits;
    mt[i] = data[i].movement_time;
  }
  const Vec x = Eigen::Map<const Vec>(id.data(), N);
  const Vec y = Eigen::Map<const Vec>(mt.data(), N);

  const double mx = x.mean(), my = y.mean();
  const Vec dx = x.array() - mx, dy = y.array() - my;
  const double sxx = dx.squaredNorm();
  const double syy = dy.squaredNorm();
  if (sxx <= 0.0 || syy <= 0.0) {
    throw DegenerateRegression(
        "index of difficulty or movement time has zero variance");
  }

  FittsFit fit;
  fit.slope = dx.dot(dy) / sxx;
  fit.intercept = my - fit.slope * mx;
  const Vec resid = y.array() - (fit.intercept + fit.slope * x.array());
  fit.r_squared = 1.0 - resid.squaredNorm() / syy;
  fit.spearman_rho = pearson(ranks_of(id), ranks_of(mt));
  return fit;
}

}  // namespace reach
