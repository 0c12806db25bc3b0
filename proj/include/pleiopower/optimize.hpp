#pragma once

// Unconstrained minimizers used by the likelihood fitters: a Nelder-Mead
// simplex search and a BFGS quasi-Newton method with backtracking line search.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace pleiopower::optim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Returns f(x); fills *grad when non-null. Non-finite values are treated as
/// +infinity (the step is rejected).
using Objective = std::function<double(const VectorXd& x, VectorXd* grad)>;

struct Result {
  VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  long evaluations = 0;
  int iterations = 0;
};

namespace detail {
inline double sanitize(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }
}  // namespace detail

inline Result nelder_mead(const Objective& f, const VectorXd& x0, double step, long max_evaluations,
                          double rel_tol = 1e-10) {
  const auto n = x0.size();
  Result r;
  std::vector<VectorXd> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  auto eval = [&](const VectorXd& x) {
    ++r.evaluations;
    return detail::sanitize(f(x, nullptr));
  };
  values[0] = eval(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    simplex[i + 1](i) += step * std::max(1.0, std::abs(x0(i)));
    values[i + 1] = eval(simplex[i + 1]);
  }
  std::vector<std::size_t> order(n + 1);
  while (r.evaluations < max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second = order[n - 1];
    if (std::isfinite(values[worst]) &&
        std::abs(values[worst] - values[best]) <= rel_tol * std::max(1.0, std::abs(values[best]))) {
      r.converged = true;
      break;
    }
    ++r.iterations;
    VectorXd centroid = VectorXd::Zero(n);
    for (auto i : order)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const VectorXd contracted =
        outside ? VectorXd(centroid + 0.5 * (reflected - centroid)) : VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (auto i : order) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  r.x = simplex[best];
  r.value = values[best];
  return r;
}

/// Central-difference gradient, for objectives without an analytic one and
/// for checking those that have one.
inline VectorXd numerical_gradient(const Objective& f, const VectorXd& x, double h = 1e-6) {
  VectorXd g(x.size());
  VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + step;
    const double fp = f(xp, nullptr);
    xp(i) = x(i) - step;
    const double fm = f(xp, nullptr);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

struct BfgsOptions {
  double rel_tol = 1e-9;
  /// Bound on the predicted remaining decrease 0.5 g'Hg, in units of f.
  double abs_tol = 1e-8;
  int max_iterations = 5000;
  /// Use central differences instead of the objective's gradient.
  bool numerical_gradient = false;
};

/// BFGS on the inverse Hessian. Converged when, for two consecutive accepted
/// steps, the relative change in f stays below rel_tol and the quadratic model
/// predicts less than abs_tol further decrease; or when the gradient vanishes.
inline Result bfgs(const Objective& f, const VectorXd& x0, const BfgsOptions& opt = {}) {
  const auto n = x0.size();
  Result r;
  auto eval = [&](const VectorXd& x, VectorXd& g) {
    ++r.evaluations;
    double v;
    if (opt.numerical_gradient) {
      v = f(x, nullptr);
      if (std::isfinite(v)) {
        g = numerical_gradient(f, x);
        r.evaluations += 2 * n;
      }
    } else {
      v = f(x, &g);
    }
    if (!std::isfinite(v) || !g.allFinite()) return std::numeric_limits<double>::infinity();
    return v;
  };
  VectorXd x = x0;
  VectorXd g(n);
  double fx = eval(x, g);
  r.x = x;
  r.value = fx;
  if (!std::isfinite(fx)) return r;
  MatrixXd h = MatrixXd::Identity(n, n);
  bool fresh_hessian = true;
  int small_changes = 0;
  VectorXd g_new(n);
  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= 1e-12 * std::max(1.0, std::abs(fx))) {
      r.converged = true;
      break;
    }
    VectorXd dir = -h * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      h.setIdentity();
      fresh_hessian = true;
      dir = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    if (fresh_hessian) t = std::min(1.0, 1.0 / std::max(gnorm, 1e-300));
    double f_new = std::numeric_limits<double>::infinity();
    VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + t * dir;
      f_new = eval(x_new, g_new);
      if (f_new <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!fresh_hessian) {
        h.setIdentity();
        fresh_hessian = true;
        continue;
      }
      // no descent possible along the gradient at machine precision
      r.converged = gnorm <= 1e-5 * std::max(1.0, std::abs(fx)) || small_changes > 0;
      break;
    }
    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    const double change = std::abs(fx - f_new);
    x = x_new;
    g = g_new;
    const double f_prev = fx;
    fx = f_new;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_hessian) h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const VectorXd hy = h * y;
      h += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
      fresh_hessian = false;
    }
    // a small step only counts when the quadratic model also predicts little
    // remaining decrease; slow progress along a flat valley does not
    if (change <= opt.rel_tol * std::max(1.0, std::abs(f_prev)) && 0.5 * g.dot(h * g) <= opt.abs_tol) {
      if (++small_changes >= 2) {
        r.converged = true;
        ++r.iterations;
        break;
      }
    } else {
      small_changes = 0;
    }
  }
  r.x = x;
  r.value = fx;
  return r;
}

}  // namespace pleiopower::optim
