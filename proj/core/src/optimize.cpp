#include "glmsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace glmsim {

namespace {

double step_for(double xi, double scale) { return scale * std::max(1.0, std::abs(xi)); }

bool finite(double v) { return std::isfinite(v); }

// Backtracks from a full step until the Armijo condition holds on a finite value.
bool line_search(const Objective& f, const Eigen::VectorXd& x, double fx, const Eigen::VectorXd& g,
                 const Eigen::VectorXd& dir, Eigen::VectorXd& x_new, double& f_new) {
  const double slope = g.dot(dir);
  if (!(slope < 0.0)) return false;
  double alpha = 1.0;
  for (int k = 0; k < 60; ++k) {
    x_new = x + alpha * dir;
    f_new = f(x_new);
    if (finite(f_new) && f_new <= fx + 1e-4 * alpha * slope) return true;
    alpha *= 0.5;
  }
  return false;
}

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step_for(x[i], 1e-5);
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x) {
  const Eigen::Index p = x.size();
  Eigen::MatrixXd H(p, p);
  const double f0 = f(x);
  Eigen::VectorXd xt = x;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double hi = step_for(x[i], 1e-4);
    xt[i] = x[i] + hi;
    const double fp = f(xt);
    xt[i] = x[i] - hi;
    const double fm = f(xt);
    xt[i] = x[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double hj = step_for(x[j], 1e-4);
      xt[i] = x[i] + hi;
      xt[j] = x[j] + hj;
      const double fpp = f(xt);
      xt[j] = x[j] - hj;
      const double fpm = f(xt);
      xt[i] = x[i] - hi;
      const double fmm = f(xt);
      xt[j] = x[j] + hj;
      const double fmp = f(xt);
      xt[i] = x[i];
      xt[j] = x[j];
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
    }
  }
  return H;
}

MinimizeResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& start,
                             const MinimizeOptions& options) {
  const Eigen::Index p = start.size();
  MinimizeResult r;
  r.x = start;
  r.value = f(start);
  if (!finite(r.value)) {
    r.gradient = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    return r;
  }
  r.gradient = numeric_gradient(f, r.x);
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(p, p);
  bool scaled = false;
  Eigen::VectorXd x_new(p);
  double f_new = 0.0;

  for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
    if (!r.gradient.allFinite()) break;
    if (r.gradient.norm() < options.gradient_tolerance) break;
    Eigen::VectorXd dir = -Hinv * r.gradient;
    if (!(r.gradient.dot(dir) < 0.0)) {
      Hinv.setIdentity();
      dir = -r.gradient;
    }
    if (!line_search(f, r.x, r.value, r.gradient, dir, x_new, f_new)) {
      // Retry along steepest descent before giving up.
      Hinv.setIdentity();
      dir = -r.gradient;
      if (!line_search(f, r.x, r.value, r.gradient, dir, x_new, f_new)) break;
    }
    const Eigen::VectorXd g_new = numeric_gradient(f, x_new);
    const Eigen::VectorXd s = x_new - r.x;
    const Eigen::VectorXd y = g_new - r.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        Hinv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(p, p);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    const double improvement = r.value - f_new;
    r.x = x_new;
    r.value = f_new;
    r.gradient = g_new;
    if (improvement <= 1e-14 * std::max(1.0, std::abs(f_new)) &&
        r.gradient.norm() >= options.gradient_tolerance) {
      // Stalled on the finite-difference noise floor; let Newton polishing try.
      break;
    }
  }

  for (int k = 0; k < options.newton_polish_steps; ++k) {
    if (!r.gradient.allFinite() || r.gradient.norm() < options.gradient_tolerance) break;
    const Eigen::MatrixXd H = numeric_hessian(f, r.x);
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd dir = -llt.solve(r.gradient);
    if (!line_search(f, r.x, r.value, r.gradient, dir, x_new, f_new)) break;
    r.x = x_new;
    r.value = f_new;
    r.gradient = numeric_gradient(f, r.x);
  }

  r.converged = r.gradient.allFinite() && r.gradient.norm() < options.gradient_tolerance;
  return r;
}

}  // namespace glmsim
