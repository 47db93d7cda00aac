#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reach/analysis.hpp"
#include "reach/planner.hpp"
#include "reach/scenarios.hpp"
#include "reach/types.hpp"

namespace reach {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment configuration: INI-style file with [plant], [cost], [solver],
// [rollout], [scenario] and [output] sections. Unknown sections or keys are
// rejected; every value is validated on load. Defaults reproduce the planar
// point-to-point benchmark.
struct ExperimentConfig {
  // [plant]
  int n_q = 2;
  std::string kinematics = "identity";  // identity | two_link
  std::vector<double> inertia_diag = {2.0, 2.0};
  std::vector<double> damping_diag = {0.3, 0.3};
  std::vector<double> kappa_diag = {5e-4, 5e-4};
  double sigma_tau = 0.0;  // recorded torque-noise scale; not used directly
  std::string noise_form = "corrected";  // corrected | literal
  bool gravity = false;
  std::vector<double> link_lengths = {0.3, 0.3};
  std::vector<double> link_masses = {1.0, 1.0};
  double arm_length = 0.6;

  // [cost]
  std::vector<double> goal = {0.3, 0.0};
  double width = 0.02;
  double discount = 0.995;
  double effort = 1e-5;
  int horizon = 30;
  double step = 0.02;
  std::vector<double> widths = {0.005, 0.01, 0.02, 0.04};
  std::vector<double> distances = {0.15, 0.3, 0.45};

  // [solver]
  double grad_tol = 1e-6;
  double step_tol = 1e-12;
  int max_iters = 500;
  double constraint_tol = 1e-6;
  double penalty_start = 1e2;
  double penalty_factor = 10.0;
  int penalty_rounds = 6;
  double goal_reg = 1.0;

  // [rollout]
  int trials = 200;
  std::uint64_t seed = 1;
  double mt_speed_frac = 0.05;

  // [scenario]
  std::vector<double> sync_true_goal = {0.35, 0.15, 0.3};
  std::vector<double> sync_prior_goal = {0.29, 0.2, 0.3};
  std::vector<double> sync_stiffness = {0.0, 0.0, 400.0};
  double sync_width = 0.05;
  double sync_goal_reg = 300.0;
  double t_obs = 0.2;
  std::vector<double> handover_true_goal = {0.3, 0.0};
  std::vector<double> handover_believed_goal = {0.315, 0.01};
  double handover_stiffness = 400.0;
  double handover_width = 0.02;
  double ramp_duration = 0.5;
  double robot_width_factor = 2.0;
  double corrective_width_factor = 0.5;
  double corrective_discount_drop = 0.02;
  double transition_distance = -1.0;  // <= 0: derive from the reach distance
  std::string policy = "switch_opt";

  // [output]
  std::string directory = ".";
  bool csv = true;
  bool svg = true;

  // Derived objects.
  PlantModel plant() const;
  CostParams cost() const;       // goal from the [cost] section
  SolveOptions solver() const;
  EstimateOptions estimate() const;
  AnalysisOptions analysis() const;
  SyncScenarioParams sync_params() const;
  HandoverScenarioParams handover_params() const;

  void validate() const;  // throws ConfigError naming field and constraint
};

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);
// Parse from text (used by load_config and the tests).
ExperimentConfig parse_config(const std::string& text);
// Serialize to the canonical text form (used by save_config and the tests).
std::string format_config(const ExperimentConfig& config);

}  // namespace reach
