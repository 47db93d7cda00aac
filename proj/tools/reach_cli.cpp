// Command-line front end: plans reaches, rolls them out, runs the
// speed-accuracy sweep, goal inference, transition-model fitting, and the
// two interaction scenarios, emitting CSV (and optional SVG) artifacts.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reach/analysis.hpp"
#include "reach/config.hpp"
#include "reach/csv.hpp"
#include "reach/planner.hpp"
#include "reach/rollout.hpp"
#include "reach/scenarios.hpp"
#include "reach/svg.hpp"
#include "reach/transition.hpp"

namespace {

using namespace reach;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = -1;
  int jobs = 1;  // accepted for interface stability; execution is serial
  std::vector<double> goal_override;
  double width_override = -1.0;
};

ExperimentConfig resolve_config(const CliOptions& cli) {
  ExperimentConfig cfg;
  if (!cli.config_path.empty()) {
    cfg = load_config(cli.config_path);
  }
  if (!cli.out_dir.empty()) {
    cfg.directory = cli.out_dir;
  }
  if (cli.seed_set) {
    cfg.seed = cli.seed;
  }
  if (cli.trials >= 0) {
    cfg.trials = cli.trials;
  }
  if (!cli.goal_override.empty()) {
    cfg.goal = cli.goal_override;
  }
  if (cli.width_override > 0.0) {
    cfg.width = cli.width_override;
  }
  cfg.validate();
  std::filesystem::create_directories(cfg.directory);
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.directory) / name).string();
}

std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Mean end-effector path of a plan, one row per step.
Mat mean_ee_path(const PlanResult& pr, const PlantModel& plant) {
  const int n = plant.n_q;
  const int T = static_cast<int>(pr.states.size());
  Mat path(T, plant.kinematics.dim());
  for (int i = 0; i < T; ++i) {
    path.row(i) = plant.kinematics.forward(pr.states[i].mean.head(n)).transpose();
  }
  return path;
}

void write_plan_csv(const ExperimentConfig& cfg, const PlantModel& plant,
                    const CostParams& cost, const PlanResult& pr) {
  const int n = plant.n_q;
  const int dim = plant.kinematics.dim();
  const int H = cost.horizon;

  std::vector<std::string> header = {"step", "time_s"};
  for (int j = 0; j < n; ++j) header.push_back("q" + std::to_string(j));
  for (int j = 0; j < n; ++j) header.push_back("qd" + std::to_string(j));
  for (int j = 0; j < dim; ++j) header.push_back("ee" + std::to_string(j));
  header.push_back("speed");
  for (int j = 0; j < n; ++j) header.push_back("torque" + std::to_string(j));
  header.push_back("reward");
  header.push_back("cum_discounted_reward");

  const Mat ee = mean_ee_path(pr, plant);
  const Vec speed = path_speed(ee, cost.step);

  CsvWriter csv(out_path(cfg, "plan.csv"), header);
  double cum = 0.0;
  double gamma_pow = 1.0;
  for (int i = 0; i <= H; ++i, gamma_pow *= cost.discount) {
    const Vec q = pr.states[i].mean.head(n);
    const Mat J = plant.kinematics.jacobian(q);
    const Mat sig_x =
        J * pr.states[i].cov.topLeftCorner(n, n) * J.transpose();
    const double r = expected_reward(ee.row(i).transpose(), sig_x, cost.goal);
    cum += gamma_pow * r;

    std::vector<double> row = {static_cast<double>(i), i * cost.step};
    for (int j = 0; j < n; ++j) row.push_back(pr.states[i].mean(j));
    for (int j = 0; j < n; ++j) row.push_back(pr.states[i].mean(n + j));
    for (int j = 0; j < dim; ++j) row.push_back(ee(i, j));
    row.push_back(speed(i));
    for (int j = 0; j < n; ++j) {
      row.push_back(i < H ? pr.torques(i, j) : 0.0);
    }
    row.push_back(r);
    row.push_back(cum);
    csv.row(row);
  }

  if (cfg.svg) {
    std::vector<double> t, sp;
    for (int i = 0; i <= H; ++i) {
      t.push_back(i * cost.step);
      sp.push_back(speed(i));
    }
    SvgPlot plot("Planned speed profile", "time (s)", "speed (m/s)");
    plot.add_series(t, sp, "mean plan");
    plot.write(out_path(cfg, "plan_speed.svg"));

    if (dim >= 2) {
      SvgPlot path_plot("Planned end-effector path", "x (m)", "y (m)");
      std::vector<double> xs, ys;
      for (int i = 0; i <= H; ++i) {
        xs.push_back(ee(i, 0));
        ys.push_back(ee(i, 1));
      }
      path_plot.add_series(xs, ys, "mean path");
      path_plot.add_points({cost.goal.center(0)}, {cost.goal.center(1)},
                           "goal");
      path_plot.write(out_path(cfg, "plan_path.svg"));
    }
  }
}

int cmd_plan(const CliOptions& cli) {
  const ExperimentConfig cfg = resolve_config(cli);
  const PlantModel plant = cfg.plant();
  const CostParams cost = cfg.cost();
  const StateGaussian s0 = StateGaussian::zero(plant.n_q);
  const PlanResult pr = plan(s0, plant, cost, cfg.solver());
  write_plan_csv(cfg, plant, cost, pr);
  std::printf("plan: objective=%s grad_norm=%s iterations=%d time=%ss -> %s\n",
              format_value(pr.objective).c_str(),
              format_value(pr.grad_norm).c_str(), pr.iterations,
              format_value(pr.wall_time_s).c_str(),
              out_path(cfg, "plan.csv").c_str());
  return 0;
}

int cmd_rollout(const CliOptions& cli) {
  const ExperimentConfig cfg = resolve_config(cli);
  const PlantModel plant = cfg.plant();
  const CostParams cost = cfg.cost();
  const StateGaussian s0 = StateGaussian::zero(plant.n_q);
  const PlanResult pr = plan(s0, plant, cost, cfg.solver());
  const int trials = std::max(cfg.trials, 1);
  const RolloutEnsemble ens =
      rollout(pr.torques, s0, plant, cost.step, trials, cfg.seed);
  const int dim = plant.kinematics.dim();

  std::vector<std::string> header = {"trial"};
  for (int j = 0; j < dim; ++j) header.push_back("end" + std::to_string(j));
  header.push_back("hit");
  CsvWriter endpoints(out_path(cfg, "rollout_endpoints.csv"), header);
  const Vec radius = cost.goal.width.diagonal().cwiseSqrt();
  for (int t = 0; t < trials; ++t) {
    const Vec end = ens.ee_paths[t].bottomRows(1).transpose();
    std::vector<double> row = {static_cast<double>(t)};
    for (int j = 0; j < dim; ++j) row.push_back(end(j));
    const Vec err = (end - cost.goal.center).cwiseAbs();
    row.push_back((err.array() < radius.array()).all() ? 1.0 : 0.0);
    endpoints.row(row);
  }

  const Vec profile = dispersion_profile(ens);
  CsvWriter disp(out_path(cfg, "rollout_dispersion.csv"),
                 {"step", "time_s", "dispersion_m"});
  for (int i = 0; i < profile.size(); ++i) {
    disp.row(std::vector<double>{static_cast<double>(i), i * cost.step,
                                 profile(i)});
  }

  const EndpointStats stats = endpoint_stats(ens, cost.goal);
  std::printf("rollout: trials=%d hit_rate=%s -> %s\n", trials,
              format_value(stats.hit_rate).c_str(),
              out_path(cfg, "rollout_endpoints.csv").c_str());

  if (cfg.svg) {
    SvgPlot plot("Trajectory dispersion", "time (s)", "spread (m)");
    std::vector<double> t, d;
    for (int i = 0; i < profile.size(); ++i) {
      t.push_back(i * cost.step);
      d.push_back(profile(i));
    }
    plot.add_series(t, d, "sqrt(tr cov)");
    plot.write(out_path(cfg, "rollout_dispersion.svg"));
  }
  return 0;
}

int cmd_fitts(const CliOptions& cli) {
  const ExperimentConfig cfg = resolve_config(cli);
  const PlantModel plant = cfg.plant();
  const CostParams cost = cfg.cost();
  const StateGaussian s0 = StateGaussian::zero(plant.n_q);

  std::vector<std::string> notes;
  const std::vector<FittsDatum> data =
      fitts_sweep(cfg.distances, cfg.widths, s0, plant, cost, cfg.trials,
                  cfg.seed, cfg.solver(), cfg.analysis(), &notes);
  for (const std::string& note : notes) {
    std::fprintf(stderr, "note: %s\n", note.c_str());
  }

  CsvWriter csv(out_path(cfg, "fitts.csv"),
                {"distance_m", "width_m", "id_bits", "mt_s"});
  for (const FittsDatum& d : data) {
    csv.row(std::vector<double>{d.distance, d.width, d.id_bits,
                                d.movement_time});
  }

  const FittsFit fit = fitts_fit(data);
  std::printf(
      "fitts: cells=%zu intercept=%s slope=%s r2=%s spearman=%s -> %s\n",
      data.size(), format_value(fit.intercept).c_str(),
      format_value(fit.slope).c_str(), format_value(fit.r_squared).c_str(),
      format_value(fit.spearman_rho).c_str(),
      out_path(cfg, "fitts.csv").c_str());

  if (cfg.svg) {
    SvgPlot plot("Movement time vs index of difficulty", "ID (bits)",
                 "movement time (s)");
    std::vector<double> id, mt;
    for (const FittsDatum& d : data) {
      id.push_back(d.id_bits);
      mt.push_back(d.movement_time);
    }
    plot.add_points(id, mt, "sweep cells");
    double id_min = id.front(), id_max = id.front();
    for (double v : id) {
      id_min = std::min(id_min, v);
      id_max = std::max(id_max, v);
    }
    plot.add_series({id_min, id_max},
                    {fit.intercept + fit.slope * id_min,
                     fit.intercept + fit.slope * id_max},
                    "linear fit");
    plot.write(out_path(cfg, "fitts.svg"));
  }
  return 0;
}

int cmd_estimate(const CliOptions& cli, const std::vector<double>& true_goal,
                 double t_obs_flag) {
  const ExperimentConfig cfg = resolve_config(cli);
  const PlantModel plant = cfg.plant();
  const CostParams cost = cfg.cost();
  const int n = plant.n_q;
  const StateGaussian s0 = StateGaussian::zero(n);
  const double t_obs = t_obs_flag > 0.0 ? t_obs_flag : cfg.t_obs;

  // The prior is the configured goal; the actual reach (which the estimator
  // only sees through one observed state) heads to the true goal.
  const GoalSpec prior = cost.goal;
  Vec truth = prior.center;
  if (!true_goal.empty()) {
    if (static_cast<int>(true_goal.size()) != prior.dim()) {
      throw std::invalid_argument("--true-goal must match the goal dimension");
    }
    truth = Eigen::Map<const Vec>(true_goal.data(), prior.dim());
  } else {
    truth(0) += 0.02;  // default probe: slightly farther along the reach
  }

  CostParams true_cost = cost;
  true_cost.goal = GoalSpec(truth, prior.width);
  const PlanResult pr = plan(s0, plant, true_cost, cfg.solver());
  const RolloutEnsemble ens =
      rollout(pr.torques, s0, plant, cost.step, 1, cfg.seed);
  const int n_obs = static_cast<int>(t_obs / cost.step);
  if (n_obs < 1 || n_obs >= cost.horizon) {
    throw std::out_of_range("observation time must fall inside the horizon");
  }
  const Vec observed = ens.states[0].row(n_obs).transpose();

  const GoalEstimate est = estimate_goal(s0, observed, t_obs, prior, plant,
                                         cost, cfg.estimate());

  std::vector<std::string> header;
  const int dim = prior.dim();
  for (int j = 0; j < dim; ++j) header.push_back("true" + std::to_string(j));
  for (int j = 0; j < dim; ++j) header.push_back("prior" + std::to_string(j));
  for (int j = 0; j < dim; ++j)
    header.push_back("estimated" + std::to_string(j));
  header.push_back("error_m");
  header.push_back("constraint_residual");
  header.push_back("converged");
  CsvWriter csv(out_path(cfg, "estimate.csv"), header);
  std::vector<double> row;
  for (int j = 0; j < dim; ++j) row.push_back(truth(j));
  for (int j = 0; j < dim; ++j) row.push_back(prior.center(j));
  for (int j = 0; j < dim; ++j) row.push_back(est.goal(j));
  row.push_back((est.goal - truth).norm());
  row.push_back(est.constraint_residual);
  row.push_back(est.converged ? 1.0 : 0.0);
  csv.row(row);

  std::printf("estimate: error=%s residual=%s converged=%d -> %s\n",
              format_value((est.goal - truth).norm()).c_str(),
              format_value(est.constraint_residual).c_str(),
              est.converged ? 1 : 0, out_path(cfg, "estimate.csv").c_str());
  return 0;
}

int cmd_transition(const CliOptions& cli, const std::string& mode,
                   double query_distance, double query_width) {
  const ExperimentConfig cfg = resolve_config(cli);
  const PlantModel plant = cfg.plant();
  const CostParams cost = cfg.cost();
  const StateGaussian s0 = StateGaussian::zero(plant.n_q);

  const int trials = std::max(cfg.trials, 2);
  const std::vector<TransitionSample> samples = generate_transition_data(
      s0, plant, cost, cfg.distances, cfg.widths, trials, cfg.seed,
      cfg.arm_length, cfg.solver());

  CsvWriter csv(out_path(cfg, "transition_samples.csv"),
                {"norm_distance", "width", "transition_distance"});
  for (const TransitionSample& s : samples) {
    csv.row(std::vector<double>{s.norm_distance, s.width,
                                s.transition_distance});
  }
  std::printf("transition: %zu samples -> %s\n", samples.size(),
              out_path(cfg, "transition_samples.csv").c_str());
  if (mode == "generate") {
    return 0;
  }

  const GpModel model = gp_fit(samples);
  std::printf(
      "transition fit: signal_var=%s length_scales=(%s, %s) noise_var=%s\n",
      format_value(model.signal_var).c_str(),
      format_value(model.length_scales(0)).c_str(),
      format_value(model.length_scales(1)).c_str(),
      format_value(model.noise_var).c_str());

  if (mode == "predict") {
    if (query_distance <= 0.0 || query_width <= 0.0) {
      throw std::invalid_argument(
          "transition predict requires --distance and --width");
    }
    const GpPrediction pred =
        gp_predict(model, query_distance / cfg.arm_length, query_width);
    CsvWriter out(out_path(cfg, "transition_predict.csv"),
                  {"norm_distance", "width", "predicted_transition",
                   "stddev"});
    out.row(std::vector<double>{query_distance / cfg.arm_length, query_width,
                                pred.mean, std::sqrt(pred.variance)});
    std::printf("transition predict: distance=%s width=%s -> mean=%s sd=%s\n",
                format_value(query_distance).c_str(),
                format_value(query_width).c_str(),
                format_value(pred.mean).c_str(),
                format_value(std::sqrt(pred.variance)).c_str());
    return 0;
  }

  // mode == "fit": tabulate predictions over a dense grid.
  CsvWriter grid(out_path(cfg, "transition_fit.csv"),
                 {"norm_distance", "width", "predicted_transition", "stddev"});
  double d_min = cfg.distances.front(), d_max = cfg.distances.front();
  for (double d : cfg.distances) {
    d_min = std::min(d_min, d);
    d_max = std::max(d_max, d);
  }
  const int grid_n = 25;
  for (int i = 0; i < grid_n; ++i) {
    const double d = d_min + (d_max - d_min) * i / (grid_n - 1.0);
    for (double w : cfg.widths) {
      const GpPrediction pred = gp_predict(model, d / cfg.arm_length, w);
      grid.row(std::vector<double>{d / cfg.arm_length, w, pred.mean,
                                   std::sqrt(pred.variance)});
    }
  }

  if (cfg.svg) {
    SvgPlot plot("Predicted transition distance", "normalized distance",
                 "distance from goal (m)");
    for (double w : cfg.widths) {
      std::vector<double> xs, ys;
      for (int i = 0; i < grid_n; ++i) {
        const double d = d_min + (d_max - d_min) * i / (grid_n - 1.0);
        xs.push_back(d / cfg.arm_length);
        ys.push_back(gp_predict(model, d / cfg.arm_length, w).mean);
      }
      plot.add_series(xs, ys, "width " + format_value(w));
    }
    plot.write(out_path(cfg, "transition_fit.svg"));
  }
  return 0;
}

void write_scenario_outputs(const ExperimentConfig& cfg,
                            const std::string& name,
                            const ScenarioReport& report) {
  const int T = static_cast<int>(report.human_path.rows());
  const int dim = static_cast<int>(report.human_path.cols());

  std::vector<std::string> header = {"step", "time_s"};
  for (int j = 0; j < dim; ++j) header.push_back("human" + std::to_string(j));
  for (int j = 0; j < dim; ++j) header.push_back("robot" + std::to_string(j));
  for (int j = 0; j < dim; ++j) header.push_back("force" + std::to_string(j));
  for (int j = 0; j < dim; ++j)
    header.push_back("stiffness" + std::to_string(j));
  header.push_back("sync_error_m");

  CsvWriter csv(out_path(cfg, name + ".csv"), header);
  for (int i = 0; i < T; ++i) {
    std::vector<double> row = {static_cast<double>(i), i * report.step};
    for (int j = 0; j < dim; ++j) row.push_back(report.human_path(i, j));
    for (int j = 0; j < dim; ++j) row.push_back(report.robot_path(i, j));
    for (int j = 0; j < dim; ++j) row.push_back(report.force(i, j));
    for (int j = 0; j < dim; ++j) row.push_back(report.stiffness(i, j));
    row.push_back(report.sync_error(i));
    csv.row(row);
  }

  if (cfg.svg) {
    SvgPlot plot("Scenario " + name, "time (s)", "value");
    std::vector<double> t, err, stiff;
    for (int i = 0; i < T; ++i) {
      t.push_back(i * report.step);
      err.push_back(report.sync_error(i));
      stiff.push_back(report.stiffness(i, dim - 1) / 1000.0);
    }
    plot.add_series(t, err, "sync error (m)");
    plot.add_series(t, stiff, "stiffness (kN/m)");
    plot.write(out_path(cfg, name + ".svg"));
  }
}

int cmd_scenario(const CliOptions& cli, const std::string& kind,
                 const std::string& policy_flag) {
  const ExperimentConfig cfg = resolve_config(cli);

  if (kind == "sync") {
    PlantModel plant = PlantModel::cartesian_default();
    plant.noise_cov = Vec::Constant(3, cfg.kappa_diag[0]);
    SyncScenarioParams params = cfg.sync_params();
    const ScenarioReport report = scenario_sync(plant, params, cfg.solver());
    write_scenario_outputs(cfg, "scenario_sync", report);
    std::printf(
        "scenario sync: human_mt=%s robot_mt=%s estimated_goal=(%s, %s, %s) "
        "work=%s -> %s\n",
        format_value(report.human_movement_time).c_str(),
        format_value(report.robot_movement_time).c_str(),
        format_value(report.estimated_goal(0)).c_str(),
        format_value(report.estimated_goal(1)).c_str(),
        format_value(report.estimated_goal(2)).c_str(),
        format_value(report.interaction_work).c_str(),
        out_path(cfg, "scenario_sync.csv").c_str());
    return 0;
  }
  if (kind == "handover") {
    const PlantModel plant = cfg.plant();
    HandoverScenarioParams params = cfg.handover_params();
    if (!policy_flag.empty()) {
      params.policy = handover_policy_from_string(policy_flag);
    }
    const ScenarioReport report =
        scenario_handover(plant, params, cfg.solver());
    write_scenario_outputs(cfg, "scenario_handover", report);
    std::printf(
        "scenario handover: policy=%s time=%s work=%s transition_time=%s "
        "completed=%d -> %s\n",
        to_string(params.policy).c_str(),
        format_value(report.human_movement_time).c_str(),
        format_value(report.interaction_work).c_str(),
        format_value(report.transition_time).c_str(),
        report.completed ? 1 : 0,
        out_path(cfg, "scenario_handover.csv").c_str());
    return 0;
  }
  throw std::invalid_argument("unknown scenario kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory-optimization toolkit for reaching movements"};
  app.require_subcommand(1);

  CliOptions cli;
  app.add_option("--config", cli.config_path, "Configuration file (INI)");
  app.add_option("--out", cli.out_dir, "Output directory");
  app.add_option("--seed", cli.seed, "RNG seed override")
      ->each([&cli](const std::string&) { cli.seed_set = true; });
  app.add_option("--trials", cli.trials, "Rollout trial count override");
  app.add_option("--jobs", cli.jobs, "Worker count (currently serial)");

  auto* p_plan = app.add_subcommand("plan", "Plan a reach, write plan.csv");
  p_plan->add_option("--goal", cli.goal_override, "Goal center override");
  p_plan->add_option("--width", cli.width_override, "Goal width override");

  auto* p_roll =
      app.add_subcommand("rollout", "Plan, then simulate noisy executions");
  p_roll->add_option("--goal", cli.goal_override, "Goal center override");
  p_roll->add_option("--width", cli.width_override, "Goal width override");

  app.add_subcommand("fitts", "Speed-accuracy sweep and linear fit");

  std::vector<double> true_goal;
  double t_obs_flag = -1.0;
  auto* p_est = app.add_subcommand("estimate", "Infer a goal from one state");
  p_est->add_option("--true-goal", true_goal, "Goal the simulated reach uses");
  p_est->add_option("--t-obs", t_obs_flag, "Observation time (s)");

  std::string transition_mode = "fit";
  double query_distance = -1.0, query_width = -1.0;
  auto* p_tr = app.add_subcommand(
      "transition", "Generate transition data and fit the GP model");
  p_tr->add_option("mode", transition_mode, "generate | fit | predict")
      ->check(CLI::IsMember({"generate", "fit", "predict"}));
  p_tr->add_option("--distance", query_distance, "Query distance (m)");
  p_tr->add_option("--width", query_width, "Query width (m)");

  auto* p_cfg = app.add_subcommand(
      "config", "Print the effective configuration (defaults + overrides)");

  std::string scenario_kind;
  std::string policy_flag;
  auto* p_sc = app.add_subcommand("scenario", "Simulate an interaction episode");
  p_sc->add_option("kind", scenario_kind, "sync | handover")
      ->required()
      ->check(CLI::IsMember({"sync", "handover"}));
  p_sc->add_option("--policy", policy_flag,
                   "high_stiff | switch_90 | switch_60 | switch_opt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    app.exit(e);
    return 2;
  }

  try {
    if (p_plan->parsed()) return cmd_plan(cli);
    if (p_roll->parsed()) return cmd_rollout(cli);
    if (app.get_subcommand("fitts")->parsed()) return cmd_fitts(cli);
    if (p_est->parsed()) return cmd_estimate(cli, true_goal, t_obs_flag);
    if (p_tr->parsed())
      return cmd_transition(cli, transition_mode, query_distance, query_width);
    if (p_cfg->parsed()) {
      ExperimentConfig cfg;
      if (!cli.config_path.empty()) {
        cfg = load_config(cli.config_path);
      }
      if (cli.seed_set) cfg.seed = cli.seed;
      if (cli.trials >= 0) cfg.trials = cli.trials;
      cfg.validate();
      std::fputs(format_config(cfg).c_str(), stdout);
      return 0;
    }
    if (p_sc->parsed()) return cmd_scenario(cli, scenario_kind, policy_flag);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
