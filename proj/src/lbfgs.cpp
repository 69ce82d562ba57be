#include "hat/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace hat {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;
constexpr int kMaxBracketSteps = 40;
constexpr int kMaxZoomSteps = 60;

struct Trial {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative
};

class LineSearch {
 public:
  LineSearch(const Objective& objective, const Eigen::VectorXd& x, const Eigen::VectorXd& direction, double f0,
             double d0)
      : objective_(objective), x_(x), p_(direction), f0_(f0), d0_(d0), g_(x.size()) {}

  // Returns true and fills the accepted point on success.
  bool run(double initial_step, Eigen::VectorXd& x_out, Eigen::VectorXd& g_out, double& f_out) {
    Trial prev{0.0, f0_, d0_};
    double step = initial_step;
    for (int i = 0; i < kMaxBracketSteps; ++i) {
      Trial cur = evaluate(step);
      if (!std::isfinite(cur.value)) {
        step *= 0.5;
        continue;
      }
      if (acceptable(cur)) return accept(cur, x_out, g_out, f_out);
      if (cur.value > f0_ + kArmijo * cur.step * d0_ || (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur, x_out, g_out, f_out);
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, x_out, g_out, f_out);
      prev = cur;
      step *= 2.0;
    }
    return false;
  }

 private:
  Trial evaluate(double step) {
    trial_x_ = x_ + step * p_;
    double f = objective_(trial_x_, g_);
    return {step, f, g_.dot(p_)};
  }

  // Strong Wolfe, or the approximate Wolfe test used near the optimum where
  // function differences drown in rounding.
  bool acceptable(const Trial& t) const {
    const bool curvature = std::abs(t.slope) <= -kCurvature * d0_;
    if (t.value <= f0_ + kArmijo * t.step * d0_ && curvature) return true;
    const double slack = 1e-12 * std::abs(f0_);
    return t.value <= f0_ + slack && curvature && t.slope <= (2.0 * kArmijo - 1.0) * d0_;
  }

  bool accept(const Trial& t, Eigen::VectorXd& x_out, Eigen::VectorXd& g_out, double& f_out) {
    // g_ always holds the gradient of the most recent evaluation, which is t.
    x_out = x_ + t.step * p_;
    g_out = g_;
    f_out = t.value;
    return true;
  }

  bool zoom(Trial lo, Trial hi, Eigen::VectorXd& x_out, Eigen::VectorXd& g_out, double& f_out) {
    for (int i = 0; i < kMaxZoomSteps; ++i) {
      const double width = hi.step - lo.step;
      if (std::abs(width) <= 1e-16 * std::max(1.0, std::abs(lo.step))) break;
      double step = cubic_minimizer(lo, hi);
      const double a = std::min(lo.step, hi.step);
      const double b = std::max(lo.step, hi.step);
      const double margin = 0.1 * (b - a);
      if (!std::isfinite(step) || step < a + margin || step > b - margin) step = 0.5 * (lo.step + hi.step);
      Trial cur = evaluate(step);
      if (acceptable(cur)) return accept(cur, x_out, g_out, f_out);
      if (cur.value > f0_ + kArmijo * cur.step * d0_ || cur.value >= lo.value) {
        hi = cur;
      } else {
        if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = cur;
      }
    }
    // Fall back to the best sufficient-decrease point found, if any.
    if (lo.step > 0.0 && lo.value < f0_) {
      evaluate(lo.step);
      return accept(lo, x_out, g_out, f_out);
    }
    return false;
  }

  static double cubic_minimizer(const Trial& a, const Trial& b) {
    const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
    const double disc = d1 * d1 - a.slope * b.slope;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
    return b.step - (b.step - a.step) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
  }

  const Objective& objective_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& p_;
  double f0_;
  double d0_;
  Eigen::VectorXd g_;
  Eigen::VectorXd trial_x_;
};

}  // namespace

SolverReport minimize_lbfgs(const Objective& objective, Eigen::VectorXd& x, const SolverOptions& options) {
  SolverReport report;
  Eigen::VectorXd g(x.size());
  double f = objective(x, g);
  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha(static_cast<std::size_t>(options.history));

  Eigen::VectorXd x_next(x.size());
  Eigen::VectorXd g_next(x.size());
  double f_next = f;
  for (report.iterations = 0; report.iterations < options.max_iterations; ++report.iterations) {
    const double gnorm = g.norm();
    if (gnorm <= options.gradient_tolerance) {
      report.converged = true;
      break;
    }

    // Two-loop recursion.
    Eigen::VectorXd q = g;
    const std::size_t k = s_hist.size();
    for (std::size_t i = k; i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (k > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < k; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    double slope = g.dot(direction);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -g;
      slope = -gnorm * gnorm;
    }

    double initial = s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    LineSearch search(objective, x, direction, f, slope);
    if (!search.run(initial, x_next, g_next, f_next)) {
      if (s_hist.empty()) break;
      // Retry once from a steepest-descent step with fresh memory.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -g;
      LineSearch restart(objective, x, direction, f, -gnorm * gnorm);
      if (!restart.run(std::min(1.0, 1.0 / gnorm), x_next, g_next, f_next)) break;
    }

    Eigen::VectorXd s = x_next - x;
    Eigen::VectorXd y = g_next - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (static_cast<int>(s_hist.size()) == options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    x.swap(x_next);
    g.swap(g_next);
    f = f_next;
  }
  report.objective = f;
  report.gradient_norm = g.norm();
  if (report.gradient_norm <= options.gradient_tolerance) report.converged = true;
  return report;
}

}  // namespace hat
