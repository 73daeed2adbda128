#include "omnitraj/solver.hpp"

#include <cmath>
#include <deque>

namespace omnitraj::solver {

const char* statusName(Status status) {
  switch (status) {
    case Status::Converged: return "converged";
    case Status::MaxIterations: return "max-iterations";
    case Status::LineSearchFailure: return "line-search-failure";
    case Status::NonFiniteObjective: return "non-finite-objective";
  }
  return "unknown";
}

Result minimize(const ObjectiveFn& f, Eigen::VectorXd x0, const Config& config) {
  Result res;
  res.x = std::move(x0);
  const int n = static_cast<int>(res.x.size());
  res.grad.resize(n);
  res.value = f(res.x, res.grad);
  if (!std::isfinite(res.value) || !res.grad.allFinite()) {
    res.status = Status::NonFiniteObjective;
    return res;
  }

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho;
  Eigen::VectorXd d(n), x_new(n), g_new(n);
  std::vector<double> alpha;

  res.status = Status::MaxIterations;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    if (res.grad.norm() <= config.grad_tol * std::max(1.0, res.x.norm())) {
      res.status = Status::Converged;
      return res;
    }

    // Two-loop recursion on the stored curvature pairs.
    d = -res.grad;
    const int m = static_cast<int>(s_hist.size());
    alpha.assign(m, 0.0);
    for (int k = m - 1; k >= 0; --k) {
      alpha[k] = rho[k] * s_hist[k].dot(d);
      d -= alpha[k] * y_hist[k];
    }
    if (m > 0) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (int k = 0; k < m; ++k) {
      const double beta = rho[k] * y_hist[k].dot(d);
      d += (alpha[k] - beta) * s_hist[k];
    }
    double dg = d.dot(res.grad);
    if (!(dg < 0.0)) {  // fall back to steepest descent on a bad direction
      d = -res.grad;
      dg = -res.grad.squaredNorm();
    }

    double step = iter == 1 ? 1.0 / std::max(1e-12, res.grad.norm()) : 1.0;
    bool accepted = false;
    double f_new = 0.0;
    // The floor applies to the trial move |step * d|, not the bare
    // multiplier: on stiff starts |d| can be enormous and a multiplier
    // floor would rule out every genuinely local trial.
    const double d_norm = d.norm();
    for (int ls = 0;
         ls < config.max_line_search && step * d_norm >= config.min_step;
         ++ls) {
      x_new = res.x + step * d;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && g_new.allFinite() &&
          f_new <= res.value + config.armijo_c1 * step * dg) {
        accepted = true;
        break;
      }
      step *= config.backtrack;
    }
    if (!accepted) {
      res.status = Status::LineSearchFailure;
      return res;
    }

    Eigen::VectorXd s_vec = x_new - res.x;
    Eigen::VectorXd y_vec = g_new - res.grad;
    const double sy = s_vec.dot(y_vec);
    if (sy > 1e-12 * s_vec.norm() * y_vec.norm()) {
      if (static_cast<int>(s_hist.size()) == config.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho.pop_front();
      }
      rho.push_back(1.0 / sy);
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
    }
    res.x.swap(x_new);
    res.grad.swap(g_new);
    res.value = f_new;
    res.iterations = iter;
    res.trace.push_back({res.value, res.grad.norm(), step});
  }
  if (res.grad.norm() <= config.grad_tol * std::max(1.0, res.x.norm()))
    res.status = Status::Converged;
  return res;
}

}  // namespace omnitraj::solver
