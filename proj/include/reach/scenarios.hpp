#pragma once

#include <cstdint>
#include <string>

#include "reach/planner.hpp"
#include "reach/types.hpp"

namespace reach {

// Robot stiffness policies for the co-manipulation handover: when the robot
// starts ramping its Cartesian stiffness toward zero as the object
// approaches the (believed) goal.
enum class HandoverPolicy {
  HighStiffness,  // never ramps: robot stays stiff throughout
  Switch90,       // ramp once 90% of the reach distance remains
  Switch60,       // ramp once 60% of the reach distance remains
  SwitchOptimal,  // ramp at the predicted natural transition distance
};

std::string to_string(HandoverPolicy policy);
HandoverPolicy handover_policy_from_string(const std::string& name);

// Common result of one simulated interaction episode.
struct ScenarioReport {
  Mat human_path;   // T x dim actual (noisy) object path
  Mat robot_path;   // T x dim robot reference path
  Mat force;        // T x dim spring force applied by the robot
  Mat stiffness;    // T x dim per-axis stiffness over time
  Vec sync_error;   // T per-step |robot - human|
  double step = 0.0;
  double human_movement_time = 0.0;  // capped at the episode length when
  double robot_movement_time = 0.0;  // the motion never settles
  double interaction_work = 0.0;     // sum |F . v| h over the episode (J)
  double transition_time = 0.0;  // stiffness-ramp trigger (or observation) time
  bool completed = true;         // human motion settled inside the goal
  Vec estimated_goal;            // goal inferred by the robot (sync scenario)
  Vec true_goal;
};

// Synchronization episode: the human starts reaching toward their true goal;
// after t_obs seconds the robot observes the state, infers the goal, and
// replays the inferred plan as its reference while assisting the coupled
// axes (default: vertical) through a spring. The true goal differs from the
// robot's prior only in the human-led axes.
struct SyncScenarioParams {
  Vec true_goal;   // size 3, defaults to [0.35, 0.15, 0.3]
  Vec prior_goal;  // size 3, defaults to true_goal + [-0.06, 0.05, 0]
  double width = 0.05;
  double t_obs = 0.2;
  Vec stiffness;  // per-axis spring gains, defaults to [0, 0, 400]
  double discount = 0.97;
  int horizon = 50;
  double step = 0.055;
  // Weight on the goal prior in the estimation step. The robot's prior comes
  // from the known task layout (table height, goal region), so it carries far
  // more confidence than a generic estimate would: a weak prior lets the
  // joint estimate explain a brief observation with a degenerate
  // "arrive-sooner-at-a-nearer-goal" trajectory, because dwelling at the goal
  // accrues reward at every remaining step. Calibrated so the default
  // observation refines the prior without that collapse, while observations
  // taken mid-movement still override the prior (their braking distance pins
  // the landing zone).
  double goal_reg = 300.0;
  std::uint64_t seed = 1;

  static SyncScenarioParams defaults();
};

ScenarioReport scenario_sync(const PlantModel& plant,
                             const SyncScenarioParams& params,
                             const SolveOptions& solver = {});

// Handover episode: the object moves under the human's motor plan toward the
// true goal while the robot renders a spring toward its own reference
// trajectory (planned toward a slightly wrong believed goal, with a widened
// target so its transport is faster). The policy decides when the spring
// stiffness ramps to zero; the human issues one corrective re-plan when the
// object first comes within the natural transition distance of their goal.
struct HandoverScenarioParams {
  Vec true_goal;      // size 2, defaults to [0.3, 0]
  Vec believed_goal;  // size 2, defaults to true_goal + [0.015, 0.01]
  double width = 0.02;
  double stiffness = 400.0;       // N/m while engaged
  double ramp_duration = 0.5;     // s, linear ramp to zero after the trigger
  double robot_width_factor = 2.0;
  double corrective_width_factor = 0.5;
  double corrective_discount_drop = 0.02;
  // Distance from the goal at which a natural reach hands over from
  // transport to its terminal phase; non-positive means use 7% of the reach
  // distance. Feed a GP prediction here for the SwitchOptimal policy.
  double transition_distance = -1.0;
  HandoverPolicy policy = HandoverPolicy::SwitchOptimal;
  double discount = 1.0;
  int horizon = 30;
  double step = 0.02;
  std::uint64_t seed = 1;

  static HandoverScenarioParams defaults();
};

ScenarioReport scenario_handover(const PlantModel& plant,
                                 const HandoverScenarioParams& params,
                                 const SolveOptions& solver = {});

}  // namespace reach
