#include "reach/transition.hpp"

#include <cmath>

#include "reach/rollout.hpp"
#include "reach/solver.hpp"

namespace reach {

namespace {

// Squared-exponential Gram matrix (no noise/jitter on the diagonal).
Mat se_kernel(const Mat& X, double signal_var, const Vec& ls) {
  const int N = static_cast<int>(X.rows());
  Mat K(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j <= i; ++j) {
      double d2 = 0.0;
      for (int c = 0; c < X.cols(); ++c) {
        const double d = (X(i, c) - X(j, c)) / ls(c);
        d2 += d * d;
      }
      K(i, j) = K(j, i) = signal_var * std::exp(-0.5 * d2);
    }
  }
  return K;
}

// Cholesky with escalating jitter; records the jitter actually used.
Eigen::LLT<Mat> jittered_llt(const Mat& K, double* jitter_used) {
  const int N = static_cast<int>(K.rows());
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LLT<Mat> llt(K + jitter * Mat::Identity(N, N));
    if (llt.info() == Eigen::Success) {
      if (jitter_used != nullptr) {
        *jitter_used = jitter;
      }
      return llt;
    }
    jitter = (jitter == 0.0) ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-4) {
      break;
    }
  }
  throw IllConditionedGram(
      "Gram matrix not positive definite even with 1e-4 jitter");
}

struct LmlResult {
  double value = 0.0;  // log marginal likelihood
  Vec grad;            // d/d(log theta), theta = (sv, ls0, ls1, noise)
};

// Log marginal likelihood of centered targets and its gradient in the log
// hyperparameters. Standard identities: dL/dtheta = 1/2 tr((aa^T - K^-1) dK).
LmlResult log_marginal(const Mat& X, const Vec& yc, const Vec& log_theta) {
  const int N = static_cast<int>(X.rows());
  const double sv = std::exp(log_theta(0));
  const Vec ls = log_theta.segment(1, 2).array().exp();
  const double noise = std::exp(log_theta(3));

  const Mat Kse = se_kernel(X, sv, ls);
  Mat K = Kse + noise * Mat::Identity(N, N);
  double jitter = 0.0;
  const Eigen::LLT<Mat> llt = jittered_llt(K, &jitter);

  const Vec a = llt.solve(yc);
  double log_det = 0.0;
  for (int i = 0; i < N; ++i) {
    log_det += std::log(llt.matrixL()(i, i));
  }
  LmlResult res;
  res.value = -0.5 * yc.dot(a) - log_det -
              0.5 * N * std::log(2.0 * 3.14159265358979323846);

  const Mat Kinv = llt.solve(Mat::Identity(N, N));
  const Mat W = a * a.transpose() - Kinv;  // dL = 1/2 <W, dK>

  res.grad.resize(4);
  res.grad(0) = 0.5 * W.cwiseProduct(Kse).sum();  // d/d log sv
  for (int c = 0; c < 2; ++c) {
    Mat dK(N, N);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double d = (X(i, c) - X(j, c)) / ls(c);
        dK(i, j) = dK(j, i) = Kse(i, j) * d * d;  // d/d log ls_c
      }
    }
    res.grad(1 + c) = 0.5 * W.cwiseProduct(dK).sum();
  }
  res.grad(3) = 0.5 * noise * W.trace();  // d/d log noise
  return res;
}

}  // namespace

GpModel gp_fit(const std::vector<TransitionSample>& samples,
               const GpOptions& opts) {
  const int N = static_cast<int>(samples.size());
  if (N < 2) {
    throw std::invalid_argument("gp_fit: need at least two samples");
  }
  Mat X(N, 2);
  Vec y(N);
  for (int i = 0; i < N; ++i) {
    X(i, 0) = samples[i].norm_distance;
    X(i, 1) = samples[i].width;
    y(i) = samples[i].transition_distance;
  }
  const double y_mean = y.mean();
  const Vec yc = y.array() - y_mean;

  auto column_spread = [&](int c) {
    const double mean = X.col(c).mean();
    const double var = (X.col(c).array() - mean).square().sum() / N;
    return std::max(std::sqrt(var), 1e-3);
  };

  double sv = opts.signal_var > 0.0 ? opts.signal_var
                                    : std::max(yc.squaredNorm() / N, 1e-10);
  Vec ls(2);
  ls(0) = opts.length_scale_distance > 0.0 ? opts.length_scale_distance
                                           : column_spread(0);
  ls(1) = opts.length_scale_width > 0.0 ? opts.length_scale_width
                                        : column_spread(1);
  double noise = std::max(opts.noise_var, 1e-12);

  if (opts.optimize_hyperparameters) {
    Vec log_theta(4);
    log_theta << std::log(sv), std::log(ls(0)), std::log(ls(1)),
        std::log(noise);
    auto fn = [&](const Vec& z, Vec* grad) -> double {
      // Bound the search box to keep the Gram matrix well conditioned.
      for (int i = 0; i < z.size(); ++i) {
        if (std::abs(z(i)) > 25.0) {
          if (grad != nullptr) {
            grad->setZero(z.size());
          }
          return 1e30;
        }
      }
      const LmlResult r = log_marginal(X, yc, z);
      if (grad != nullptr) {
        *grad = -r.grad;
      }
      return -r.value;
    };
    SolveOptions sopts;
    sopts.max_iters = opts.max_iters;
    sopts.grad_tol = 1e-7;
    const SolveReport rep = minimize(fn, log_theta, sopts);
    sv = std::exp(rep.x(0));
    ls(0) = std::exp(rep.x(1));
    ls(1) = std::exp(rep.x(2));
    noise = std::exp(rep.x(3));
  }

  GpModel model;
  model.inputs = X;
  model.y_mean = y_mean;
  model.signal_var = sv;
  model.length_scales = ls;
  model.noise_var = noise;

  const Mat K = se_kernel(X, sv, ls) + noise * Mat::Identity(N, N);
  const Eigen::LLT<Mat> llt = jittered_llt(K, &model.jitter);
  model.chol_lower = llt.matrixL();
  model.alpha = llt.solve(yc);
  return model;
}

GpPrediction gp_predict(const GpModel& model, double norm_distance,
                        double width) {
  const int N = static_cast<int>(model.inputs.rows());
  Vec k_star(N);
  for (int i = 0; i < N; ++i) {
    const double d0 =
        (model.inputs(i, 0) - norm_distance) / model.length_scales(0);
    const double d1 = (model.inputs(i, 1) - width) / model.length_scales(1);
    k_star(i) = model.signal_var * std::exp(-0.5 * (d0 * d0 + d1 * d1));
  }
  GpPrediction pred;
  pred.mean = model.y_mean + k_star.dot(model.alpha);
  const Vec v = model.chol_lower.triangularView<Eigen::Lower>().solve(k_star);
  pred.variance = std::max(model.signal_var - v.squaredNorm(), 0.0);
  return pred;
}

std::vector<TransitionSample> generate_transition_data(
    const StateGaussian& s0, const PlantModel& plant,
    const CostParams& cost_template, const std::vector<double>& distances,
    const std::vector<double>& widths, int trials, std::uint64_t seed,
    double arm_length, const SolveOptions& solver) {
  const int n = plant.n_q;
  const Vec start_ee = plant.kinematics.forward(s0.mean.head(n));

  std::vector<TransitionSample> samples;
  std::uint64_t cell = 0;
  for (double distance : distances) {
    for (double width : widths) {
      ++cell;
      Vec center = start_ee;
      center(0) += distance;
      CostParams cost = cost_template;
      cost.goal = GoalSpec(center, width);

      const PlanResult pr = plan(s0, plant, cost, solver);
      const RolloutEnsemble ens =
          rollout(pr.torques, s0, plant, cost.step, trials,
                  splitmix64(seed ^ splitmix64(cell)));
      const Vec profile = dispersion_profile(ens);
      int peak = 0;
      for (int i = 1; i < profile.size(); ++i) {
        if (profile(i) > profile(peak)) {
          peak = i;
        }
      }
      if (profile(peak) < 1e-12) {
        continue;  // no measurable spread; nothing to learn from this cell
      }
      double mean_distance = 0.0;
      for (int t = 0; t < ens.trials(); ++t) {
        mean_distance +=
            (ens.ee_paths[t].row(peak).transpose() - center).norm();
      }
      mean_distance /= ens.trials();

      TransitionSample s;
      s.norm_distance = distance / arm_length;
      s.width = width;
      s.transition_distance = mean_distance;
      samples.push_back(s);
    }
  }
  return samples;
}

}  // namespace reach
