#include "reach/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace reach {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" +
                      value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(parse_double(key, item));
    }
  }
  if (out.empty()) {
    throw ConfigError(key + ": expected a comma-separated list of numbers");
  }
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += format_number(v[i]);
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<int>(v.size()));
}

Mat diag_from(const std::vector<double>& d) {
  Vec v = to_vec(d);
  return v.asDiagonal();
}

}  // namespace

PlantModel ExperimentConfig::plant() const {
  PlantModel p;
  p.n_q = n_q;
  p.damping = diag_from(damping_diag);
  p.noise_cov = to_vec(kappa_diag);
  p.noise_form =
      (noise_form == "literal") ? NoiseForm::Literal : NoiseForm::Corrected;
  p.gravity_enabled = gravity;
  if (kinematics == "two_link") {
    p.inertia_model = InertiaModel::TwoLinkPlanar;
    p.inertia = Mat::Identity(2, 2);
    p.kinematics = Kinematics::two_link_planar(link_lengths[0], link_lengths[1]);
    p.link_mass1 = link_masses[0];
    p.link_mass2 = link_masses[1];
  } else {
    p.inertia_model = InertiaModel::Constant;
    p.inertia = diag_from(inertia_diag);
    p.kinematics = Kinematics::identity(n_q, n_q);
  }
  return p;
}

CostParams ExperimentConfig::cost() const {
  CostParams c;
  c.goal = GoalSpec(to_vec(goal), width);
  c.discount = discount;
  c.effort = effort;
  c.horizon = horizon;
  c.step = step;
  return c;
}

SolveOptions ExperimentConfig::solver() const {
  SolveOptions s;
  s.grad_tol = grad_tol;
  s.step_tol = step_tol;
  s.max_iters = max_iters;
  return s;
}

EstimateOptions ExperimentConfig::estimate() const {
  EstimateOptions e;
  e.constraint_tol = constraint_tol;
  e.penalty_start = penalty_start;
  e.penalty_factor = penalty_factor;
  e.penalty_rounds = penalty_rounds;
  e.goal_reg = goal_reg;
  // Adopt the configured tolerances but keep the estimator's deeper inner
  // budget: the penalty subproblems are much worse conditioned than planning.
  e.solver.grad_tol = grad_tol;
  e.solver.step_tol = step_tol;
  e.solver.max_iters = std::max(e.solver.max_iters, max_iters);
  return e;
}

AnalysisOptions ExperimentConfig::analysis() const {
  AnalysisOptions a;
  a.stop_speed_frac = mt_speed_frac;
  return a;
}

SyncScenarioParams ExperimentConfig::sync_params() const {
  SyncScenarioParams p;
  p.true_goal = to_vec(sync_true_goal);
  p.prior_goal = to_vec(sync_prior_goal);
  p.stiffness = to_vec(sync_stiffness);
  p.width = sync_width;
  p.goal_reg = sync_goal_reg;
  p.t_obs = t_obs;
  p.seed = seed;
  return p;
}

HandoverScenarioParams ExperimentConfig::handover_params() const {
  HandoverScenarioParams p;
  p.true_goal = to_vec(handover_true_goal);
  p.believed_goal = to_vec(handover_believed_goal);
  p.width = handover_width;
  p.stiffness = handover_stiffness;
  p.ramp_duration = ramp_duration;
  p.robot_width_factor = robot_width_factor;
  p.corrective_width_factor = corrective_width_factor;
  p.corrective_discount_drop = corrective_discount_drop;
  p.transition_distance = transition_distance;
  p.policy = handover_policy_from_string(policy);
  p.discount = 1.0;
  p.seed = seed;
  return p;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) {
      throw ConfigError(message);
    }
  };
  require(n_q >= 1, "plant.n_q must be at least 1");
  require(kinematics == "identity" || kinematics == "two_link",
          "plant.kinematics must be 'identity' or 'two_link'");
  require(kinematics != "two_link" || n_q == 2,
          "plant.kinematics two_link requires n_q = 2");
  require(static_cast<int>(inertia_diag.size()) == n_q,
          "plant.inertia must list n_q diagonal entries");
  require(static_cast<int>(damping_diag.size()) == n_q,
          "plant.damping must list n_q diagonal entries");
  require(static_cast<int>(kappa_diag.size()) == n_q,
          "plant.kappa must list n_q diagonal entries");
  for (double v : inertia_diag) {
    require(v > 0.0, "plant.inertia entries must be positive");
  }
  for (double v : kappa_diag) {
    require(v >= 0.0, "plant.kappa entries must be non-negative");
  }
  require(noise_form == "corrected" || noise_form == "literal",
          "plant.noise_form must be 'corrected' or 'literal'");
  require(link_lengths.size() == 2 && link_lengths[0] > 0 && link_lengths[1] > 0,
          "plant.link_lengths must list two positive lengths");
  require(link_masses.size() == 2 && link_masses[0] > 0 && link_masses[1] > 0,
          "plant.link_masses must list two positive masses");
  require(arm_length > 0.0, "plant.arm_length must be positive");

  const int dim = (kinematics == "two_link") ? 2 : n_q;
  require(static_cast<int>(goal.size()) == dim,
          "cost.goal must match the end-effector dimension");
  require(width > 0.0, "cost.width must be positive");
  require(discount > 0.0 && discount <= 1.0,
          "cost.discount must lie in (0, 1]");
  require(effort >= 0.0, "cost.effort must be non-negative");
  require(horizon >= 1, "cost.horizon must be at least 1");
  require(step > 0.0, "cost.step must be positive");
  require(!widths.empty(), "cost.widths must not be empty");
  for (double v : widths) {
    require(v > 0.0, "cost.widths entries must be positive");
  }
  require(!distances.empty(), "cost.distances must not be empty");
  for (double v : distances) {
    require(v > 0.0, "cost.distances entries must be positive");
  }

  require(grad_tol > 0.0, "solver.grad_tol must be positive");
  require(step_tol > 0.0, "solver.step_tol must be positive");
  require(max_iters >= 1, "solver.max_iters must be at least 1");
  require(constraint_tol > 0.0, "solver.constraint_tol must be positive");
  require(penalty_start > 0.0, "solver.penalty_start must be positive");
  require(penalty_factor > 1.0, "solver.penalty_factor must exceed 1");
  require(penalty_rounds >= 1, "solver.penalty_rounds must be at least 1");
  require(goal_reg >= 0.0, "solver.goal_reg must be non-negative");

  require(trials >= 0, "rollout.trials must be non-negative");
  require(mt_speed_frac > 0.0 && mt_speed_frac < 1.0,
          "rollout.mt_speed_frac must lie in (0, 1)");

  require(sync_true_goal.size() == 3 && sync_prior_goal.size() == 3 &&
              sync_stiffness.size() == 3,
          "scenario.sync goals and stiffness must have three entries");
  require(sync_width > 0.0, "scenario.sync_width must be positive");
  require(sync_goal_reg > 0.0, "scenario.sync_goal_reg must be positive");
  require(t_obs > 0.0, "scenario.t_obs must be positive");
  require(handover_true_goal.size() == 2 && handover_believed_goal.size() == 2,
          "scenario.handover goals must have two entries");
  require(handover_stiffness >= 0.0,
          "scenario.handover_stiffness must be non-negative");
  require(handover_width > 0.0, "scenario.handover_width must be positive");
  require(ramp_duration > 0.0, "scenario.ramp_duration must be positive");
  require(robot_width_factor > 0.0,
          "scenario.robot_width_factor must be positive");
  require(corrective_width_factor > 0.0,
          "scenario.corrective_width_factor must be positive");
  require(corrective_discount_drop >= 0.0,
          "scenario.corrective_discount_drop must be non-negative");
  try {
    handover_policy_from_string(policy);
  } catch (const std::exception&) {
    throw ConfigError(
        "scenario.policy must be one of high_stiff, switch_90, switch_60, "
        "switch_opt (got '" + policy + "')");
  }

  require(!directory.empty(), "output.directory must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;

  auto fail = [&](const std::string& message) {
    throw ConfigError("line " + std::to_string(line_no) + ": " + message);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail("malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "plant" && section != "cost" && section != "solver" &&
          section != "rollout" && section != "scenario" &&
          section != "output") {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail("expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      fail("key '" + key + "' outside any section");
    }
    const std::string qual = section + "." + key;

    bool known = true;
    if (section == "plant") {
      if (key == "n_q") cfg.n_q = parse_int(qual, value);
      else if (key == "kinematics") cfg.kinematics = value;
      else if (key == "inertia") cfg.inertia_diag = parse_list(qual, value);
      else if (key == "damping") cfg.damping_diag = parse_list(qual, value);
      else if (key == "kappa") cfg.kappa_diag = parse_list(qual, value);
      else if (key == "sigma_tau") cfg.sigma_tau = parse_double(qual, value);
      else if (key == "noise_form") cfg.noise_form = value;
      else if (key == "gravity") cfg.gravity = parse_bool(qual, value);
      else if (key == "link_lengths") cfg.link_lengths = parse_list(qual, value);
      else if (key == "link_masses") cfg.link_masses = parse_list(qual, value);
      else if (key == "arm_length") cfg.arm_length = parse_double(qual, value);
      else known = false;
    } else if (section == "cost") {
      if (key == "goal") cfg.goal = parse_list(qual, value);
      else if (key == "width") cfg.width = parse_double(qual, value);
      else if (key == "discount") cfg.discount = parse_double(qual, value);
      else if (key == "effort") cfg.effort = parse_double(qual, value);
      else if (key == "horizon") cfg.horizon = parse_int(qual, value);
      else if (key == "step") cfg.step = parse_double(qual, value);
      else if (key == "widths") cfg.widths = parse_list(qual, value);
      else if (key == "distances") cfg.distances = parse_list(qual, value);
      else known = false;
    } else if (section == "solver") {
      if (key == "grad_tol") cfg.grad_tol = parse_double(qual, value);
      else if (key == "step_tol") cfg.step_tol = parse_double(qual, value);
      else if (key == "max_iters") cfg.max_iters = parse_int(qual, value);
      else if (key == "constraint_tol") cfg.constraint_tol = parse_double(qual, value);
      else if (key == "penalty_start") cfg.penalty_start = parse_double(qual, value);
      else if (key == "penalty_factor") cfg.penalty_factor = parse_double(qual, value);
      else if (key == "penalty_rounds") cfg.penalty_rounds = parse_int(qual, value);
      else if (key == "goal_reg") cfg.goal_reg = parse_double(qual, value);
      else known = false;
    } else if (section == "rollout") {
      if (key == "trials") cfg.trials = parse_int(qual, value);
      else if (key == "seed") cfg.seed = parse_u64(qual, value);
      else if (key == "mt_speed_frac") cfg.mt_speed_frac = parse_double(qual, value);
      else known = false;
    } else if (section == "scenario") {
      if (key == "sync_true_goal") cfg.sync_true_goal = parse_list(qual, value);
      else if (key == "sync_prior_goal") cfg.sync_prior_goal = parse_list(qual, value);
      else if (key == "sync_stiffness") cfg.sync_stiffness = parse_list(qual, value);
      else if (key == "sync_width") cfg.sync_width = parse_double(qual, value);
      else if (key == "sync_goal_reg") cfg.sync_goal_reg = parse_double(qual, value);
      else if (key == "t_obs") cfg.t_obs = parse_double(qual, value);
      else if (key == "handover_true_goal") cfg.handover_true_goal = parse_list(qual, value);
      else if (key == "handover_believed_goal") cfg.handover_believed_goal = parse_list(qual, value);
      else if (key == "handover_stiffness") cfg.handover_stiffness = parse_double(qual, value);
      else if (key == "handover_width") cfg.handover_width = parse_double(qual, value);
      else if (key == "ramp_duration") cfg.ramp_duration = parse_double(qual, value);
      else if (key == "robot_width_factor") cfg.robot_width_factor = parse_double(qual, value);
      else if (key == "corrective_width_factor") cfg.corrective_width_factor = parse_double(qual, value);
      else if (key == "corrective_discount_drop") cfg.corrective_discount_drop = parse_double(qual, value);
      else if (key == "transition_distance") cfg.transition_distance = parse_double(qual, value);
      else if (key == "policy") cfg.policy = value;
      else known = false;
    } else if (section == "output") {
      if (key == "directory") cfg.directory = value;
      else if (key == "csv") cfg.csv = parse_bool(qual, value);
      else if (key == "svg") cfg.svg = parse_bool(qual, value);
      else known = false;
    }
    if (!known) {
      fail("unknown key '" + key + "' in section [" + section + "]");
    }
  }
  cfg.validate();
  return cfg;
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[plant]\n";
  out << "n_q = " << c.n_q << "\n";
  out << "kinematics = " << c.kinematics << "\n";
  out << "inertia = " << format_list(c.inertia_diag) << "\n";
  out << "damping = " << format_list(c.damping_diag) << "\n";
  out << "kappa = " << format_list(c.kappa_diag) << "\n";
  out << "sigma_tau = " << format_number(c.sigma_tau) << "\n";
  out << "noise_form = " << c.noise_form << "\n";
  out << "gravity = " << (c.gravity ? "true" : "false") << "\n";
  out << "link_lengths = " << format_list(c.link_lengths) << "\n";
  out << "link_masses = " << format_list(c.link_masses) << "\n";
  out << "arm_length = " << format_number(c.arm_length) << "\n";
  out << "\n[cost]\n";
  out << "goal = " << format_list(c.goal) << "\n";
  out << "width = " << format_number(c.width) << "\n";
  out << "discount = " << format_number(c.discount) << "\n";
  out << "effort = " << format_number(c.effort) << "\n";
  out << "horizon = " << c.horizon << "\n";
  out << "step = " << format_number(c.step) << "\n";
  out << "widths = " << format_list(c.widths) << "\n";
  out << "distances = " << format_list(c.distances) << "\n";
  out << "\n[solver]\n";
  out << "grad_tol = " << format_number(c.grad_tol) << "\n";
  out << "step_tol = " << format_number(c.step_tol) << "\n";
  out << "max_iters = " << c.max_iters << "\n";
  out << "constraint_tol = " << format_number(c.constraint_tol) << "\n";
  out << "penalty_start = " << format_number(c.penalty_start) << "\n";
  out << "penalty_factor = " << format_number(c.penalty_factor) << "\n";
  out << "penalty_rounds = " << c.penalty_rounds << "\n";
  out << "goal_reg = " << format_number(c.goal_reg) << "\n";
  out << "\n[rollout]\n";
  out << "trials = " << c.trials << "\n";
  out << "seed = " << c.seed << "\n";
  out << "mt_speed_frac = " << format_number(c.mt_speed_frac) << "\n";
  out << "\n[scenario]\n";
  out << "sync_true_goal = " << format_list(c.sync_true_goal) << "\n";
  out << "sync_prior_goal = " << format_list(c.sync_prior_goal) << "\n";
  out << "sync_stiffness = " << format_list(c.sync_stiffness) << "\n";
  out << "sync_width = " << format_number(c.sync_width) << "\n";
  out << "sync_goal_reg = " << format_number(c.sync_goal_reg) << "\n";
  out << "t_obs = " << format_number(c.t_obs) << "\n";
  out << "handover_true_goal = " << format_list(c.handover_true_goal) << "\n";
  out << "handover_believed_goal = " << format_list(c.handover_believed_goal)
      << "\n";
  out << "handover_stiffness = " << format_number(c.handover_stiffness) << "\n";
  out << "handover_width = " << format_number(c.handover_width) << "\n";
  out << "ramp_duration = " << format_number(c.ramp_duration) << "\n";
  out << "robot_width_factor = " << format_number(c.robot_width_factor) << "\n";
  out << "corrective_width_factor = "
      << format_number(c.corrective_width_factor) << "\n";
  out << "corrective_discount_drop = "
      << format_number(c.corrective_discount_drop) << "\n";
  out << "transition_distance = " << format_number(c.transition_distance)
      << "\n";
  out << "policy = " << c.policy << "\n";
  out << "\n[output]\n";
  out << "directory = " << c.directory << "\n";
  out << "csv = " << (c.csv ? "true" : "false") << "\n";
  out << "svg = " << (c.svg ? "true" : "false") << "\n";
  return out.str();
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  config.validate();
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write config file: " + path);
  }
  out << format_config(config);
}

}  // namespace reach
