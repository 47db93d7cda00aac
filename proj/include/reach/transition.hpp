#pragma once

#include <cstdint>
#include <vector>

#include "reach/planner.hpp"
#include "reach/types.hpp"

namespace reach {

// One observation of where a reach naturally hands over from ballistic
// transport to its terminal phase: the point of maximum trajectory
// dispersion, expressed as distance from the goal.
struct TransitionSample {
  double norm_distance = 0.0;       // reach distance / arm length
  double width = 0.0;               // scalar goal width (m)
  double transition_distance = 0.0; // mean distance from goal at peak spread (m)
};

struct GpOptions {
  // When true, kernel hyperparameters are tuned by maximizing the log
  // marginal likelihood; otherwise the provided/derived values are kept.
  bool optimize_hyperparameters = true;
  // Initial (or fixed) values; non-positive entries are derived from the
  // data: signal variance from var(y), length scales from input spreads.
  double signal_var = -1.0;
  double length_scale_distance = -1.0;
  double length_scale_width = -1.0;
  double noise_var = 1e-8;
  int max_iters = 100;
};

// Gaussian-process regressor over (norm_distance, width) with a squared-
// exponential kernel and one length scale per input.
struct GpModel {
  Mat inputs;          // N x 2
  Vec alpha;           // K^-1 (y - y_mean)
  Mat chol_lower;      // L with L L^T = K
  double y_mean = 0.0;
  double signal_var = 1.0;
  Vec length_scales;   // 2
  double noise_var = 0.0;
  double jitter = 0.0;  // extra diagonal needed to factor the Gram matrix
};

// Fit the GP to transition samples. The Gram matrix is factored with an
// escalating diagonal jitter (1e-10 upward); IllConditionedGram is thrown if
// 1e-4 still does not produce a positive-definite factorization.
GpModel gp_fit(const std::vector<TransitionSample>& samples,
               const GpOptions& opts = {});

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;  // latent-function variance, >= 0
};

GpPrediction gp_predict(const GpModel& model, double norm_distance,
                        double width);

// Generate transition samples over a (distance, width) grid: plan each
// reach, roll it out `trials` times, locate the dispersion peak, and record
// the mean distance from the goal at that step. Degenerate cells (no
// measurable spread) are dropped.
std::vector<TransitionSample> generate_transition_data(
    const StateGaussian& s0, const PlantModel& plant,
    const CostParams& cost_template, const std::vector<double>& distances,
    const std::vector<double>& widths, int trials, std::uint64_t seed,
    double arm_length = 0.6, const SolveOptions& solver = {});

}  // namespace reach
