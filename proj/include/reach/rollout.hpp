#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "reach/dynamics.hpp"
#include "reach/types.hpp"

namespace reach {

// Monte-Carlo ensemble of noisy open-loop executions of one torque plan.
struct RolloutEnsemble {
  std::vector<Mat> states;    // per trial: (H+1) x 2 n_q joint states
  std::vector<Mat> ee_paths;  // per trial: (H+1) x dim end-effector path
  double step = 0.0;          // h in seconds

  int trials() const { return static_cast<int>(states.size()); }
  int steps() const {
    return states.empty() ? 0 : static_cast<int>(states.front().rows());
  }
};

// Simulate `trials` noisy executions of the torque sequence. Each step
// applies tau .* (1 + eps) with eps ~ N(0, K) drawn per joint, integrated
// with the same semi-implicit Euler update the Gaussian propagation
// discretizes (position from the pre-step velocity), so ensemble moments
// converge to the propagated belief under the zero-mean noise rule.
//
// Trial t consumes an independent counter-keyed RNG stream derived from
// (seed, t), so results are identical regardless of evaluation order and
// reproducible bit-for-bit for a given seed.
RolloutEnsemble rollout(const Mat& torques, const StateGaussian& s0,
                        const PlantModel& plant, double h, int trials,
                        std::uint64_t seed);

struct EndpointStats {
  Vec mean;             // mean final end-effector position
  Mat cov;              // sample covariance of final positions
  double hit_rate = 0;  // fraction of trials ending inside the goal box
};

// Endpoint summary; a trial scores a hit when every component of
// |end - goal.center| is below the per-axis radius sqrt(diag(W)).
EndpointStats endpoint_stats(const RolloutEnsemble& ens, const GoalSpec& goal);

// Per-step spread of the ensemble: sqrt(trace(sample covariance)) of the
// end-effector position at each step (zeros when trials < 2).
Vec dispersion_profile(const RolloutEnsemble& ens);

// SplitMix64 mix function; used to key per-trial RNG streams.
std::uint64_t splitmix64(std::uint64_t x);

// Key for the RNG stream of one trial under a base seed.
inline std::uint64_t trial_stream_key(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(seed ^ splitmix64(trial + 1));
}

// Standard-normal stream: mt19937_64 under the given key, uniforms mapped to
// (0, 1] from the top 53 bits, converted in Box-Muller pairs. Every stage is
// fully specified, so streams are reproducible across platforms.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t key) : engine_(key) {}
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace reach
