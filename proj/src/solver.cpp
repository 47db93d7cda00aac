#include "reach/solver.hpp"

#include <cmath>
#include <deque>
#include <vector>

namespace reach {

namespace {

struct Correction {
  Vec s;       // x_{k+1} - x_k
  Vec y;       // g_{k+1} - g_k
  double rho;  // 1 / (y^T s)
};

// Two-loop recursion producing the L-BFGS descent direction -H g.
Vec lbfgs_direction(const Vec& g, const std::deque<Correction>& hist) {
  Vec q = g;
  std::vector<double> alpha(hist.size());
  for (int i = static_cast<int>(hist.size()) - 1; i >= 0; --i) {
    alpha[i] = hist[i].rho * hist[i].s.dot(q);
    q -= alpha[i] * hist[i].y;
  }
  if (!hist.empty()) {
    const Correction& last = hist.back();
    const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
    q *= gamma;
  }
  for (size_t i = 0; i < hist.size(); ++i) {
    const double beta = hist[i].rho * hist[i].y.dot(q);
    q += (alpha[i] - beta) * hist[i].s;
  }
  return -q;
}

struct LineSearchResult {
  bool ok = false;
  double f = 0.0;
  Vec x;
  Vec g;
};

// Wolfe line search with bracketing and zoom: finds a step satisfying both
// sufficient decrease and the curvature condition, expanding past the unit
// step when the slope stays steep. An Armijo-only backtracking search would
// accept unit steps along badly scaled quasi-Newton directions and crawl;
// the curvature condition is what forces useful step sizes and keeps the
// curvature pairs it feeds back to L-BFGS well formed (y^T s > 0).
LineSearchResult wolfe_search(const ObjectiveFn& f, const Vec& x0, double f0,
                              const Vec& g0, const Vec& dir, double a_init) {
  constexpr double kSufficientDecrease = 1e-4;  // c1
  constexpr double kCurvature = 0.9;            // c2
  constexpr int kMaxBracket = 20;
  constexpr int kMaxZoom = 30;
  const double dphi0 = g0.dot(dir);

  LineSearchResult out;

  auto eval = [&](double a, double& fa, double& dfa, Vec& xa, Vec& ga) {
    xa = x0 + a * dir;
    fa = f(xa, &ga);
    dfa = ga.dot(dir);
  };

  auto zoom = [&](double lo, double f_lo, double d_lo, Vec x_lo, Vec g_lo,
                  double hi, double f_hi) {
    for (int i = 0; i < kMaxZoom; ++i) {
      // Quadratic interpolation, safeguarded toward bisection.
      double a = lo + 0.5 * (hi - lo);
      const double denom = 2.0 * (f_hi - f_lo - d_lo * (hi - lo));
      if (std::abs(denom) > 0.0) {
        const double quad = lo - d_lo * (hi - lo) * (hi - lo) / denom;
        const double lo2 = std::min(lo, hi), hi2 = std::max(lo, hi);
        const double margin = 0.1 * (hi2 - lo2);
        if (quad > lo2 + margin && quad < hi2 - margin) {
          a = quad;
        }
      }
      double fa, dfa;
      Vec xa, ga;
      eval(a, fa, dfa, xa, ga);
      if (!std::isfinite(fa) || fa > f0 + kSufficientDecrease * a * dphi0 ||
          fa >= f_lo) {
        hi = a;
        f_hi = fa;
      } else {
        if (std::abs(dfa) <= -kCurvature * dphi0) {
          out.ok = true;
          out.f = fa;
          out.x = std::move(xa);
          out.g = std::move(ga);
          return;
        }
        if (dfa * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
        }
        lo = a;
        f_lo = fa;
        d_lo = dfa;
        x_lo = std::move(xa);
        g_lo = std::move(ga);
      }
      if (std::abs(hi - lo) < 1e-14 * std::max(1.0, std::abs(lo))) {
        break;
      }
    }
    // Interval collapsed: fall back to the best sufficient-decrease point.
    if (lo > 0.0 && f_lo <= f0 + kSufficientDecrease * lo * dphi0) {
      out.ok = true;
      out.f = f_lo;
      out.x = std::move(x_lo);
      out.g = std::move(g_lo);
    }
  };

  double a_prev = 0.0, f_prev = f0, d_prev = dphi0;
  Vec x_prev = x0, g_prev = g0;
  double a = a_init;
  for (int i = 0; i < kMaxBracket; ++i) {
    double fa, dfa;
    Vec xa, ga;
    eval(a, fa, dfa, xa, ga);
    if (!std::isfinite(fa) || fa > f0 + kSufficientDecrease * a * dphi0 ||
        (i > 0 && fa >= f_prev)) {
      zoom(a_prev, f_prev, d_prev, std::move(x_prev), std::move(g_prev), a,
           fa);
      return out;
    }
    if (std::abs(dfa) <= -kCurvature * dphi0) {
      out.ok = true;
      out.f = fa;
      out.x = std::move(xa);
      out.g = std::move(ga);
      return out;
    }
    if (dfa >= 0.0) {
      zoom(a, fa, dfa, std::move(xa), std::move(ga), a_prev, f_prev);
      return out;
    }
    a_prev = a;
    f_prev = fa;
    d_prev = dfa;
    x_prev = std::move(xa);
    g_prev = std::move(ga);
    a = std::min(2.0 * a, 1e6);
  }
  return out;
}

double steepest_start_step(const Vec& g) {
  return std::min(1.0, 1.0 / std::max(1e-12, g.norm()));
}

}  // namespace

SolveReport minimize(const ObjectiveFn& f, const Vec& x0,
                     const SolveOptions& opts) {
  SolveReport report;
  Vec x = x0;
  Vec g(x.size());
  double fx = f(x, &g);
  std::deque<Correction> hist;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm < opts.grad_tol * (1.0 + std::abs(fx))) {
      report.converged = true;
      break;
    }

    Vec dir = lbfgs_direction(g, hist);
    if (!(g.dot(dir) < 0.0)) {
      // Curvature information went stale; restart from steepest descent.
      hist.clear();
      dir = -g;
    }

    const double a0 = hist.empty() ? steepest_start_step(g) : 1.0;
    LineSearchResult ls = wolfe_search(f, x, fx, g, dir, a0);
    if (!ls.ok && !hist.empty()) {
      // The quasi-Newton direction failed; retry once along the gradient.
      hist.clear();
      dir = -g;
      ls = wolfe_search(f, x, fx, g, dir, steepest_start_step(g));
    }
    if (!ls.ok) {
      break;  // no acceptable step in any direction: numerical floor
    }

    const Vec s = ls.x - x;
    const Vec y = ls.g - g;
    const double ys = y.dot(s);
    if (ys > 1e-12 * s.norm() * y.norm()) {
      hist.push_back({s, y, 1.0 / ys});
      if (static_cast<int>(hist.size()) > opts.history) {
        hist.pop_front();
      }
    }

    const double step_norm = s.lpNorm<Eigen::Infinity>();
    x = std::move(ls.x);
    fx = ls.f;
    g = std::move(ls.g);
    report.iterations = iter + 1;
    if (step_norm < opts.step_tol) {
      report.converged = true;
      break;
    }
  }

  report.x = std::move(x);
  report.objective = fx;
  report.grad_norm = g.lpNorm<Eigen::Infinity>();
  if (report.grad_norm < opts.grad_tol * (1.0 + std::abs(fx))) {
    report.converged = true;
  }
  return report;
}

}  // namespace reach
