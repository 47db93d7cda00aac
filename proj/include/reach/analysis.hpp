#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reach/planner.hpp"
#include "reach/rollout.hpp"
#include "reach/types.hpp"

namespace reach {

struct VelocityMetrics {
  double movement_time = 0.0;  // s, from start to the stop criterion
  double peak_speed = 0.0;     // m/s
  double peak_time = 0.0;      // s, time of the speed maximum
  double asymmetry = 0.0;      // peak_time / movement_time
};

struct AnalysisOptions {
  // Movement ends at the first step after the speed peak where the speed
  // falls below this fraction of the peak while the position sits inside the
  // per-axis goal radius sqrt(diag(W)).
  double stop_speed_frac = 0.05;
};

// Speed along an end-effector path, central differences in the interior and
// one-sided differences at the ends. Path is (T+1) x dim, returns T+1 values.
Vec path_speed(const Mat& ee_path, double h);

// Movement-time and velocity-shape summary of one end-effector path. Throws
// MovementIncomplete when the path never comes within three goal radii of
// the center, or never satisfies the stop criterion.
VelocityMetrics velocity_metrics(const Mat& ee_path, double h,
                                 const GoalSpec& goal,
                                 const AnalysisOptions& opts = {});

// One cell of a speed-accuracy sweep.
struct FittsDatum {
  double distance = 0.0;       // m
  double width = 0.0;          // m (scalar width of the goal)
  double id_bits = 0.0;        // index of difficulty log2(2 D / w)
  double movement_time = 0.0;  // s, mean over valid trials (or the mean plan)
  int valid_trials = 0;        // 0 when measured on the noise-free mean plan
};

// Plan a reach for every (distance, width) cell along the +x axis from the
// start state and measure movement time. With trials == 0 the metric is
// taken on the planned mean path; otherwise it is averaged over that many
// noisy rollouts (trials that never complete are skipped). Cells with no
// valid measurement are omitted and noted in `notes` when given.
std::vector<FittsDatum> fitts_sweep(const std::vector<double>& distances,
                                    const std::vector<double>& widths,
                                    const StateGaussian& s0,
                                    const PlantModel& plant,
                                    const CostParams& cost_template,
                                    int trials, std::uint64_t seed,
                                    const SolveOptions& solver = {},
                                    const AnalysisOptions& opts = {},
                                    std::vector<std::string>* notes = nullptr);

struct FittsFit {
  double intercept = 0.0;  // s
  double slope = 0.0;      // s per bit
  double r_squared = 0.0;
  double spearman_rho = 0.0;  // rank correlation of (ID, MT)
};

// Ordinary least squares of movement time on index of difficulty. Throws
// DegenerateRegression with fewer than three points or when either variable
// has zero variance.
FittsFit fitts_fit(const std::vector<FittsDatum>& data);

}  // namespace reach
