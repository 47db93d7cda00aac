#include "reach/planner.hpp"

#include <chrono>
#include <cmath>

namespace reach {

namespace {

// Optional extra terms threaded through the core objective: a goal-center
// gradient accumulator (goal inference) and an observation-matching penalty
//   multiplier^T c + penalty * |c|^2,  c = mean_{index} - observed.
struct ObservationTerm {
  int index = -1;
  Vec observed;
  Vec multiplier;
  double penalty = 0.0;
};

// Shared forward/adjoint evaluation. Computes
//   J = sum_{i=0..H} -gamma^i R(x_i) + effort sum |tau_i|^2  (+ observation term)
// and, on request, dJ/dtau (H x n) and dJ/dgoal (dim).
double core_objective(const Mat& torques, const StateGaussian& s0,
                      const std::vector<LtiStep>& steps,
                      const PlantModel& plant, const CostParams& cost,
                      const ObservationTerm* obs, Mat* grad_tau,
                      Vec* grad_goal) {
  const int n = plant.n_q;
  const int H = static_cast<int>(torques.rows());
  const int dim = cost.goal.dim();
  const Kinematics& kin = plant.kinematics;
  const bool want_grad = (grad_tau != nullptr) || (grad_goal != nullptr);

  std::vector<StateGaussian> states =
      propagate_trajectory(s0, torques, steps, plant);

  double value = cost.effort * torques.squaredNorm();

  // Per-state cost gradients (filled only when gradients are requested).
  std::vector<Vec> g_mean(want_grad ? H + 1 : 0);
  std::vector<Mat> g_cov(want_grad ? H + 1 : 0);
  if (grad_goal != nullptr) {
    grad_goal->setZero(dim);
  }

  double gamma_pow = 1.0;
  for (int i = 0; i <= H; ++i, gamma_pow *= cost.discount) {
    const Vec q = states[i].mean.head(n);
    const Mat sig_q = states[i].cov.topLeftCorner(n, n);
    const Mat J = kin.jacobian(q);
    const Vec mu_x = kin.forward(q);
    const Mat sig_x = J * sig_q * J.transpose();

    RewardGradients rg;
    const double r =
        expected_reward_grad(mu_x, sig_x, cost.goal, want_grad ? &rg : nullptr);
    value -= gamma_pow * r;

    if (want_grad) {
      const Vec dl_dmu = -gamma_pow * rg.d_mean;  // d(step cost)/d(mu_x)
      const Mat dl_dsig = -gamma_pow * rg.d_cov;  // d(step cost)/d(sig_x)

      Vec gm = Vec::Zero(2 * n);
      gm.head(n) = J.transpose() * dl_dmu;
      if (kin.kind() != KinematicsKind::Identity) {
        // Covariance pushed through the map depends on q via the Jacobian:
        // d/dq_k <dl_dsig, J sig_q J^T> = 2 <dl_dsig, dJ_k sig_q J^T>.
        const std::vector<Mat> dJ = kin.jacobian_derivatives(q);
        for (int k = 0; k < n; ++k) {
          const Mat X = dJ[k] * sig_q * J.transpose();
          gm(k) += 2.0 * dl_dsig.cwiseProduct(X).sum();
        }
      }
      g_mean[i] = gm;

      Mat gc = Mat::Zero(2 * n, 2 * n);
      gc.topLeftCorner(n, n) = J.transpose() * dl_dsig * J;
      g_cov[i] = gc;

      if (grad_goal != nullptr) {
        // The reward depends on mu_x - goal, so d/dgoal = -d/dmu_x.
        *grad_goal -= dl_dmu;
      }
    }
  }

  if (obs != nullptr && obs->index >= 0) {
    const Vec c = states[obs->index].mean - obs->observed;
    value += obs->multiplier.dot(c) + obs->penalty * c.squaredNorm();
    if (want_grad) {
      g_mean[obs->index] += obs->multiplier + 2.0 * obs->penalty * c;
    }
  }

  if (grad_tau != nullptr) {
    grad_tau->resize(H, n);
    // Adjoint sweep: lambda/Lambda carry d(value)/d(mean_i+1), d/d(cov_i+1).
    Vec lambda = g_mean[H];
    Mat Lambda = g_cov[H];
    for (int i = H - 1; i >= 0; --i) {
      const Vec tau = torques.row(i).transpose();
      const Mat& A = steps[i].A;
      const Mat& B = steps[i].B;

      Vec g = 2.0 * cost.effort * tau + B.transpose() * lambda;
      const Mat BtLB = B.transpose() * Lambda * B;
      // d/dtau <Lambda, B diag(tau) K diag(tau) B^T> = 2 K_j tau_j (B^T Lambda B)_jj
      g += 2.0 * plant.noise_cov.cwiseProduct(tau).cwiseProduct(BtLB.diagonal());
      if (plant.noise_form == NoiseForm::Literal) {
        g += 2.0 * (BtLB * tau);
      }
      grad_tau->row(i) = g.transpose();

      lambda = g_mean[i] + A.transpose() * lambda;
      Lambda = g_cov[i] + A.transpose() * Lambda * A;
    }
  }
  return value;
}

// Surrogate goal used by the coarse-to-fine schedule: the true width matrix
// inflated isotropically so its smallest standard deviation becomes `sigma`.
GoalSpec widened_goal(const GoalSpec& goal, double sigma, double sigma_min) {
  GoalSpec wide = goal;
  const double extra = sigma * sigma - sigma_min * sigma_min;
  if (extra > 0.0) {
    wide.width += extra * Mat::Identity(goal.dim(), goal.dim());
  }
  return wide;
}

// Solve min_tau objective for a fixed goal, re-linearizing nonlinear plants
// between passes. Returns the solve report plus the final step models.
struct StageResult {
  Mat torques;
  std::vector<LtiStep> steps;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

StageResult solve_stage(const StateGaussian& s0, const PlantModel& plant,
                        const CostParams& cost, const SolveOptions& solver,
                        Mat tau_init) {
  const int n = plant.n_q;
  const int H = cost.horizon;
  const bool time_varying = (plant.inertia_model != InertiaModel::Constant) ||
                            plant.gravity_enabled;
  const int max_outer = time_varying ? 20 : 1;

  StageResult result;
  Mat tau = std::move(tau_init);
  for (int outer = 0; outer < max_outer; ++outer) {
    const Mat path = nominal_path(s0, tau, plant, cost.step);
    std::vector<LtiStep> steps = linearize_along(plant, path, cost.step);

    auto fn = [&](const Vec& z, Vec* grad) -> double {
      const Mat t = Eigen::Map<const Mat>(z.data(), H, n);
      Mat gt;
      const double v = core_objective(t, s0, steps, plant, cost, nullptr,
                                      grad ? &gt : nullptr, nullptr);
      if (grad != nullptr) {
        *grad = Eigen::Map<const Vec>(gt.data(), H * n);
      }
      return v;
    };

    const Vec z0 = Eigen::Map<const Vec>(tau.data(), H * n);
    const SolveReport rep = minimize(fn, z0, solver);
    const Mat tau_new = Eigen::Map<const Mat>(rep.x.data(), H, n);

    const double change = (tau_new - tau).lpNorm<Eigen::Infinity>();
    tau = tau_new;
    result.steps = std::move(steps);
    result.objective = rep.objective;
    result.grad_norm = rep.grad_norm;
    result.iterations += rep.iterations;
    result.converged = rep.converged;
    if (change < 1e-8) {
      break;
    }
  }
  result.torques = std::move(tau);
  return result;
}

}  // namespace

double objective_value(const Mat& torques, const StateGaussian& s0,
                       const std::vector<LtiStep>& steps,
                       const PlantModel& plant, const CostParams& cost,
                       Mat* grad) {
  return core_objective(torques, s0, steps, plant, cost, nullptr, grad,
                        nullptr);
}

double objective(const Mat& torques, const StateGaussian& s0,
                 const PlantModel& plant, const CostParams& cost) {
  const Mat path = nominal_path(s0, torques, plant, cost.step);
  const std::vector<LtiStep> steps = linearize_along(plant, path, cost.step);
  return core_objective(torques, s0, steps, plant, cost, nullptr, nullptr,
                        nullptr);
}

PlanResult plan(const StateGaussian& s0, const PlantModel& plant,
                const CostParams& cost, const SolveOptions& solver,
                const Mat* warm_start) {
  validate_goal(cost.goal);
  if (cost.discount <= 0.0 || cost.discount > 1.0) {
    throw std::invalid_argument("discount must lie in (0, 1]");
  }
  const auto t_start = std::chrono::steady_clock::now();

  const int n = plant.n_q;
  const int H = cost.horizon;
  Mat tau = (warm_start != nullptr) ? *warm_start : Mat::Zero(H, n);

  // Width schedule: start at half the reach distance (where the reward is
  // broad enough to pull zero torques off their plateau) and halve down to
  // the true width.
  const double sigma_min =
      std::sqrt(cost.goal.width.diagonal().minCoeff());
  const double dist =
      (plant.kinematics.forward(s0.mean.head(n)) - cost.goal.center).norm();
  std::vector<double> schedule;
  for (double s = 0.5 * dist; s > sigma_min; s *= 0.5) {
    schedule.push_back(s);
  }
  schedule.push_back(sigma_min);

  PlanResult result;
  StageResult stage;
  for (double sigma : schedule) {
    CostParams stage_cost = cost;
    stage_cost.goal = widened_goal(cost.goal, sigma, sigma_min);
    stage = solve_stage(s0, plant, stage_cost, solver, std::move(tau));
    tau = stage.torques;
    result.iterations += stage.iterations;
  }

  result.torques = std::move(tau);
  result.steps = std::move(stage.steps);
  result.states = propagate_trajectory(s0, result.torques, result.steps, plant);
  result.objective = stage.objective;
  result.grad_norm = stage.grad_norm;
  result.converged = stage.converged;
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

GoalEstimate estimate_goal(const StateGaussian& s0, const Vec& observed_state,
                           double t_obs, const GoalSpec& prior,
                           const PlantModel& plant, const CostParams& cost,
                           const EstimateOptions& opts) {
  validate_goal(prior);
  const int n = plant.n_q;
  const int H = cost.horizon;
  const int dim = prior.dim();
  if (observed_state.size() != 2 * n) {
    throw std::invalid_argument("observed state must have size 2 n_q");
  }
  const int n_obs = static_cast<int>(std::floor(t_obs / cost.step));
  if (n_obs < 1 || n_obs > H) {
    throw std::out_of_range("observation time must fall inside the horizon");
  }

  const Mat prior_metric = prior.width.llt().solve(Mat::Identity(dim, dim));

  // Start from the plan the prior goal would produce: the estimator's best
  // guess before seeing any data.
  CostParams prior_cost = cost;
  prior_cost.goal = prior;
  const PlanResult warm = plan(s0, plant, prior_cost, opts.solver);

  Mat tau = warm.torques;
  Vec ghat = prior.center;

  ObservationTerm obs;
  obs.index = n_obs;
  obs.observed = observed_state;
  obs.multiplier = Vec::Zero(2 * n);
  obs.penalty = opts.penalty_start;

  const bool time_varying = (plant.inertia_model != InertiaModel::Constant) ||
                            plant.gravity_enabled;

  Vec residual = Vec::Zero(2 * n);
  double plain_objective = 0.0;
  for (int round = 0; round < opts.penalty_rounds; ++round) {
    // Freeze the linearization along the current nominal path (identity for
    // constant-inertia plants), then solve the penalized subproblem. The goal
    // center stays frozen at the prior while the penalty is still loose:
    // releasing it early lets the relaxed problem trade the observation away
    // for "arrive sooner at a nearer goal" explanations, abandoning the
    // prior's basin. Once the constraint carries real weight, the joint solve
    // refines the goal locally.
    const bool free_goal = round >= opts.goal_freeze_rounds;
    const Mat path = nominal_path(s0, tau, plant, cost.step);
    std::vector<LtiStep> steps = linearize_along(plant, path, cost.step);

    auto fn = [&](const Vec& z, Vec* grad) -> double {
      const Mat t = Eigen::Map<const Mat>(z.data(), H, n);
      CostParams c = cost;
      c.goal = GoalSpec(free_goal ? Vec(z.tail(dim)) : ghat, prior.width);
      Mat gt;
      Vec gg;
      double v = core_objective(t, s0, steps, plant, c, &obs,
                                grad ? &gt : nullptr, grad ? &gg : nullptr);
      const Vec dg = c.goal.center - prior.center;
      v += opts.goal_reg * dg.dot(prior_metric * dg);
      if (grad != nullptr) {
        grad->resize(z.size());
        grad->head(H * n) = Eigen::Map<const Vec>(gt.data(), H * n);
        if (free_goal) {
          grad->tail(dim) = gg + 2.0 * opts.goal_reg * (prior_metric * dg);
        }
      }
      return v;
    };

    Vec z0(H * n + (free_goal ? dim : 0));
    z0.head(H * n) = Eigen::Map<const Vec>(tau.data(), H * n);
    if (free_goal) {
      z0.tail(dim) = ghat;
    }
    const SolveReport rep = minimize(fn, z0, opts.solver);
    tau = Eigen::Map<const Mat>(rep.x.data(), H, n);
    if (free_goal) {
      ghat = rep.x.tail(dim);
    }

    // Multiplier and penalty updates from the achieved constraint violation.
    const std::vector<StateGaussian> states =
        propagate_trajectory(s0, tau, steps, plant);
    residual = states[n_obs].mean - observed_state;
    obs.multiplier += 2.0 * obs.penalty * residual;
    obs.penalty *= opts.penalty_factor;

    if (residual.lpNorm<Eigen::Infinity>() < 1e-2 * opts.constraint_tol &&
        !time_varying) {
      break;
    }
  }

  GoalEstimate est;
  est.goal = ghat;
  est.torques = tau;
  const Mat path = nominal_path(s0, tau, plant, cost.step);
  const std::vector<LtiStep> steps = linearize_along(plant, path, cost.step);
  est.states = propagate_trajectory(s0, tau, steps, plant);
  est.constraint_residual =
      (est.states[n_obs].mean - observed_state).lpNorm<Eigen::Infinity>();
  CostParams final_cost = cost;
  final_cost.goal = GoalSpec(ghat, prior.width);
  plain_objective = core_objective(tau, s0, steps, plant, final_cost, nullptr,
                                   nullptr, nullptr);
  est.objective = plain_objective;
  est.converged = est.constraint_residual <= opts.constraint_tol;
  if (est.constraint_residual > 1e3 * opts.constraint_tol) {
    throw ConstraintInfeasible(
        "observation-consistency constraint stalled at residual " +
        std::to_string(est.constraint_residual));
  }
  return est;
}

}  // namespace reach
