#include "reach/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "reach/analysis.hpp"
#include "reach/rollout.hpp"

namespace reach {

std::string to_string(HandoverPolicy policy) {
  switch (policy) {
    case HandoverPolicy::HighStiffness: return "high_stiff";
    case HandoverPolicy::Switch90: return "switch_90";
    case HandoverPolicy::Switch60: return "switch_60";
    case HandoverPolicy::SwitchOptimal: return "switch_opt";
  }
  return "unknown";
}

HandoverPolicy handover_policy_from_string(const std::string& name) {
  if (name == "high_stiff") return HandoverPolicy::HighStiffness;
  if (name == "switch_90") return HandoverPolicy::Switch90;
  if (name == "switch_60") return HandoverPolicy::Switch60;
  if (name == "switch_opt") return HandoverPolicy::SwitchOptimal;
  throw std::invalid_argument("unknown handover policy: " + name);
}

SyncScenarioParams SyncScenarioParams::defaults() {
  SyncScenarioParams p;
  p.true_goal = Vec(3);
  p.true_goal << 0.35, 0.15, 0.3;
  p.prior_goal = Vec(3);
  p.prior_goal << 0.29, 0.2, 0.3;
  p.stiffness = Vec(3);
  p.stiffness << 0.0, 0.0, 400.0;
  return p;
}

HandoverScenarioParams HandoverScenarioParams::defaults() {
  HandoverScenarioParams p;
  p.true_goal = Vec(2);
  p.true_goal << 0.3, 0.0;
  p.believed_goal = Vec(2);
  p.believed_goal << 0.315, 0.01;
  return p;
}

namespace {

// One coupled simulation step: the object follows the human plant driven by
// the human torque (with signal-dependent noise) plus the robot's spring
// force mapped into joint space (identity for the plants used here).
void coupled_step(const PlantModel& plant, double h, const Vec& tau_noisy,
                  const Vec& spring_force, Vec& x) {
  const int n = plant.n_q;
  const Vec q = x.head(n), v = x.tail(n);
  Vec generalized = tau_noisy - plant.damping * v - plant.gravity_at(q);
  generalized += plant.kinematics.jacobian(q).transpose() * spring_force;
  const Vec acc = plant.inertia_at(q).ldlt().solve(generalized);
  x.head(n) = q + h * v;
  x.tail(n) = v + h * acc;
}

// Impedance coupling force: a spring toward the reference plus a critically
// damped virtual damper (2*sqrt(k*m) per axis), which any physical impedance
// controller provides. A bare stiffness under explicit integration is
// unstable at the couplings used here (k = 400 N/m against a ~2 kg plant).
Vec impedance_force(const Vec& k_axes, const Vec& m_axes, const Vec& ref_pos,
                    const Vec& pos, const Vec& ref_vel, const Vec& vel) {
  const Vec d_axes = 2.0 * k_axes.cwiseProduct(m_axes).cwiseSqrt();
  return k_axes.cwiseProduct(ref_pos - pos) +
         d_axes.cwiseProduct(ref_vel - vel);
}

Vec noisy_torque(const Vec& tau, const Vec& noise_std, GaussianStream& rng) {
  Vec out = tau;
  for (int j = 0; j < tau.size(); ++j) {
    out(j) *= 1.0 + noise_std(j) * rng.next();
  }
  return out;
}

// Movement time with an episode-length cap; sets `completed` accordingly.
double capped_movement_time(const Mat& path, double h, const GoalSpec& goal,
                            bool* completed) {
  try {
    const VelocityMetrics m = velocity_metrics(path, h, goal);
    if (completed != nullptr) {
      *completed = true;
    }
    return m.movement_time;
  } catch (const MovementIncomplete&) {
    if (completed != nullptr) {
      *completed = false;
    }
    return (static_cast<double>(path.rows()) - 1.0) * h;
  }
}

}  // namespace

ScenarioReport scenario_sync(const PlantModel& plant,
                             const SyncScenarioParams& params,
                             const SolveOptions& solver) {
  const int n = plant.n_q;
  const int dim = plant.kinematics.dim();
  const int H = params.horizon;
  const double h = params.step;
  const int n_obs = static_cast<int>(std::floor(params.t_obs / h));
  if (n_obs < 1 || n_obs >= H) {
    throw std::out_of_range("observation time must fall inside the horizon");
  }

  CostParams cost;
  cost.goal = GoalSpec(params.true_goal, params.width);
  cost.discount = params.discount;
  cost.horizon = H;
  cost.step = h;

  // The human's own plan targets the true goal.
  const StateGaussian s0 = StateGaussian::zero(n);
  const PlanResult human_plan = plan(s0, plant, cost, solver);

  const Vec noise_std = plant.noise_cov.cwiseSqrt();
  GaussianStream rng(trial_stream_key(params.seed, 0));

  Mat human_states(H + 1, 2 * n);
  Vec x = s0.mean;
  human_states.row(0) = x.transpose();

  // Phase 1 (before the observation): the robot has not engaged yet.
  for (int i = 0; i < n_obs; ++i) {
    const Vec tau =
        noisy_torque(human_plan.torques.row(i).transpose(), noise_std, rng);
    coupled_step(plant, h, tau, Vec::Zero(dim), x);
    human_states.row(i + 1) = x.transpose();
  }

  // The robot observes the state and infers the goal against its prior.
  const Vec observed = human_states.row(n_obs).transpose();
  const GoalSpec prior(params.prior_goal, params.width);
  EstimateOptions eopts;
  eopts.goal_reg = params.goal_reg;
  eopts.solver.grad_tol = solver.grad_tol;
  eopts.solver.step_tol = solver.step_tol;
  eopts.solver.max_iters = std::max(eopts.solver.max_iters, solver.max_iters);
  const GoalEstimate est =
      estimate_goal(s0, observed, params.t_obs, prior, plant, cost, eopts);

  Mat robot_path(H + 1, dim);
  Mat robot_vel(H + 1, dim);
  for (int i = 0; i <= H; ++i) {
    const Vec q_ref = est.states[i].mean.head(n);
    robot_path.row(i) = plant.kinematics.forward(q_ref).transpose();
    robot_vel.row(i) = (plant.kinematics.jacobian(q_ref) *
                        est.states[i].mean.tail(n))
                           .transpose();
  }

  // Phase 2: robot assists the coupled axes through the per-axis impedance.
  Mat force = Mat::Zero(H + 1, dim);
  Mat stiffness = Mat::Zero(H + 1, dim);
  for (int i = n_obs; i < H; ++i) {
    const Vec q = x.head(n);
    const Vec pos = plant.kinematics.forward(q);
    const Vec vel_ee = plant.kinematics.jacobian(q) * x.tail(n);
    const Vec f = impedance_force(
        params.stiffness, plant.inertia_at(q).diagonal(),
        robot_path.row(i).transpose(), pos, robot_vel.row(i).transpose(),
        vel_ee);
    force.row(i) = f.transpose();
    stiffness.row(i) = params.stiffness.transpose();
    const Vec tau =
        noisy_torque(human_plan.torques.row(i).transpose(), noise_std, rng);
    coupled_step(plant, h, tau, f, x);
    human_states.row(i + 1) = x.transpose();
  }
  stiffness.row(H) = params.stiffness.transpose();

  ScenarioReport report;
  report.step = h;
  report.true_goal = params.true_goal;
  report.estimated_goal = est.goal;
  report.human_path.resize(H + 1, dim);
  for (int i = 0; i <= H; ++i) {
    report.human_path.row(i) =
        plant.kinematics.forward(human_states.row(i).head(n).transpose())
            .transpose();
  }
  report.robot_path = robot_path;
  report.force = force;
  report.stiffness = stiffness;
  report.sync_error =
      (report.robot_path - report.human_path).rowwise().norm();
  report.transition_time = params.t_obs;

  bool human_done = false, robot_done = false;
  report.human_movement_time = capped_movement_time(
      report.human_path, h, GoalSpec(params.true_goal, params.width),
      &human_done);
  report.robot_movement_time = capped_movement_time(
      report.robot_path, h, GoalSpec(est.goal, params.width), &robot_done);
  report.completed = human_done && robot_done;

  double work = 0.0;
  for (int i = 0; i < H; ++i) {
    const Vec v = human_states.row(i).tail(n).transpose();
    const Vec vel_ee = plant.kinematics.jacobian(human_states.row(i).head(n).transpose()) * v;
    work += std::abs(force.row(i).dot(vel_ee.transpose())) * h;
  }
  report.interaction_work = work;
  return report;
}

ScenarioReport scenario_handover(const PlantModel& plant,
                                 const HandoverScenarioParams& params,
                                 const SolveOptions& solver) {
  const int n = plant.n_q;
  const int dim = plant.kinematics.dim();
  const int H = params.horizon;
  const double h = params.step;
  const int T = 2 * H;  // episode runs past the plan to let the object settle

  const StateGaussian s0 = StateGaussian::zero(n);
  const Vec start_ee = plant.kinematics.forward(s0.mean.head(n));
  const double reach_true = (params.true_goal - start_ee).norm();
  const double reach_believed = (params.believed_goal - start_ee).norm();
  const double d_trans = params.transition_distance > 0.0
                             ? params.transition_distance
                             : 0.07 * reach_true;

  // Human plan toward the true goal; robot reference toward its believed
  // goal with a widened target (fast transport, terminal accuracy delegated
  // to the human).
  CostParams human_cost;
  human_cost.goal = GoalSpec(params.true_goal, params.width);
  human_cost.discount = params.discount;
  human_cost.horizon = H;
  human_cost.step = h;
  const PlanResult human_plan = plan(s0, plant, human_cost, solver);

  CostParams robot_cost = human_cost;
  robot_cost.goal = GoalSpec(params.believed_goal,
                             params.width * params.robot_width_factor);
  const PlanResult robot_plan = plan(s0, plant, robot_cost, solver);

  Mat robot_path(T + 1, dim);
  Mat robot_vel = Mat::Zero(T + 1, dim);
  for (int i = 0; i <= T; ++i) {
    const int j = std::min(i, H);
    const Vec q_ref = robot_plan.states[j].mean.head(n);
    robot_path.row(i) = plant.kinematics.forward(q_ref).transpose();
    if (i < H) {
      robot_vel.row(i) = (plant.kinematics.jacobian(q_ref) *
                          robot_plan.states[j].mean.tail(n))
                             .transpose();
    }
  }

  const Vec noise_std = plant.noise_cov.cwiseSqrt();
  GaussianStream rng(trial_stream_key(params.seed, 0));
  const int ramp_steps = std::max(1, static_cast<int>(std::lround(params.ramp_duration / h)));

  Mat human_states(T + 1, 2 * n);
  Mat ee(T + 1, dim);
  Mat force = Mat::Zero(T + 1, dim);
  Mat stiffness = Mat::Zero(T + 1, dim);
  Vec x = s0.mean;
  human_states.row(0) = x.transpose();
  ee.row(0) = start_ee.transpose();

  // Human torque source: base plan, replaced once by a corrective re-plan
  // when the object first comes within the natural transition distance of
  // the true goal.
  Mat torques = human_plan.torques;
  int torque_offset = 0;
  bool corrected = false;

  int trigger_step = -1;  // stiffness ramp trigger
  double work = 0.0;

  for (int i = 0; i < T; ++i) {
    const Vec pos = ee.row(i).transpose();

    // Robot policy: decide whether the ramp starts this step.
    if (trigger_step < 0) {
      const double remaining = (pos - params.believed_goal).norm();
      bool fire = false;
      switch (params.policy) {
        case HandoverPolicy::HighStiffness: fire = false; break;
        case HandoverPolicy::Switch90: fire = remaining <= 0.9 * reach_believed; break;
        case HandoverPolicy::Switch60: fire = remaining <= 0.6 * reach_believed; break;
        case HandoverPolicy::SwitchOptimal: fire = remaining <= d_trans; break;
      }
      if (fire) {
        trigger_step = i;
      }
    }
    double k = params.stiffness;
    if (trigger_step >= 0) {
      const double progress = static_cast<double>(i - trigger_step) / ramp_steps;
      k = params.stiffness * std::max(0.0, 1.0 - progress);
    }

    // Human corrective re-plan at the natural transition point.
    if (!corrected && (pos - params.true_goal).norm() <= d_trans && i + 3 < T) {
      StateGaussian s_now = StateGaussian::zero(n);
      s_now.mean = x;
      CostParams corrective = human_cost;
      corrective.goal = GoalSpec(params.true_goal,
                                 params.width * params.corrective_width_factor);
      corrective.discount = std::max(
          0.01, params.discount - params.corrective_discount_drop);
      corrective.horizon = T - i;
      const PlanResult redo = plan(s_now, plant, corrective, solver);
      torques = redo.torques;
      torque_offset = i;
      corrected = true;
    }

    const int row = i - torque_offset;
    Vec tau = Vec::Zero(n);
    if (row >= 0 && row < torques.rows()) {
      tau = torques.row(row).transpose();
    }
    tau = noisy_torque(tau, noise_std, rng);

    const Vec v = x.tail(n);
    const Vec vel_ee = plant.kinematics.jacobian(x.head(n)) * v;
    const Vec f = impedance_force(
        Vec::Constant(dim, k), plant.inertia_at(x.head(n)).diagonal(),
        robot_path.row(i).transpose(), pos, robot_vel.row(i).transpose(),
        vel_ee);
    force.row(i) = f.transpose();
    stiffness.row(i) = Vec::Constant(dim, k).transpose();

    work += std::abs(f.dot(vel_ee)) * h;

    coupled_step(plant, h, tau, f, x);
    human_states.row(i + 1) = x.transpose();
    ee.row(i + 1) = plant.kinematics.forward(x.head(n)).transpose();
  }
  stiffness.row(T) = stiffness.row(T - 1);

  ScenarioReport report;
  report.step = h;
  report.true_goal = params.true_goal;
  report.estimated_goal = params.believed_goal;
  report.human_path = ee;
  report.robot_path = robot_path;
  report.force = force;
  report.stiffness = stiffness;
  report.sync_error = (robot_path - ee).rowwise().norm();
  report.interaction_work = work;
  report.transition_time = (trigger_step >= 0) ? trigger_step * h : -1.0;

  bool done = false;
  report.human_movement_time = capped_movement_time(
      ee, h, GoalSpec(params.true_goal, params.width), &done);
  report.completed = done;
  report.robot_movement_time = capped_movement_time(
      robot_path, h, robot_cost.goal, nullptr);
  return report;
}

}  // namespace reach
