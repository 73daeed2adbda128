#include "omnitraj/problem.hpp"

#include <chrono>
#include <stdexcept>
#include <utility>

namespace omnitraj::problem {

Objective::Objective(Spec spec)
    : spec_(std::move(spec)),
      containers_(elimination::buildContainers(spec_.corridor)),
      M_(spec_.corridor.pieces()) {
  if (spec_.s < 2) throw std::invalid_argument("spline order must be >= 2");
  layout_ = elimination::Layout::build(containers_, M_);
}

Eigen::VectorXd Objective::initialState() const {
  return elimination::initialize(containers_, spec_.bc, spec_.penalty.v_max,
                                 layout_);
}

Eigen::MatrixXd Objective::waypoints(const Eigen::VectorXd& x,
                                     Eigen::VectorXd& T, int* clamps) const {
  int c = elimination::forwardT(layout_.tau(x), T);
  Eigen::MatrixXd q(6, M_ - 1);
  for (int j = 0; j + 1 < M_; ++j) {
    q.col(j).head<3>() =
        elimination::forwardQ(layout_.xi(x, j), containers_.vertices[j]);
    q.col(j).tail<3>() = layout_.qSigma(x, j);
  }
  if (clamps) *clamps = c;
  return q;
}

double Objective::evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                           Diagnostics* diag) const {
  Eigen::VectorXd T;
  int clamps = 0;
  Eigen::MatrixXd q = waypoints(x, T, &clamps);

  spline::MincoSpline minco(spec_.s, M_, spec_.bc);
  spline::Trajectory traj = minco.solve(q, T);
  clamps += minco.clampEvents();

  Eigen::MatrixXd grad_coeffs;
  Eigen::VectorXd grad_T;
  double J = spline::smoothnessCost(traj, grad_coeffs, grad_T);

  double time_cost = spec_.k_rho * traj.durations().sum();
  grad_T.array() += spec_.k_rho;

  penalty::Report report = penalty::evaluate(traj, spec_.corridor, spec_.shape,
                                             spec_.penalty, &grad_coeffs,
                                             &grad_T);

  Eigen::MatrixXd grad_q;
  Eigen::VectorXd grad_T_total;
  minco.propagateGradient(grad_coeffs, grad_T, grad_q, grad_T_total);

  grad.resize(layout_.dim);
  for (int j = 0; j + 1 < M_; ++j) {
    grad.segment(layout_.xi_offset[j], layout_.xi_dim[j]) =
        elimination::pullbackQ(layout_.xi(x, j), containers_.vertices[j],
                               q.col(j).head<3>(), grad_q.col(j).head<3>());
    grad.segment<3>(layout_.q_offset + 3 * j) = grad_q.col(j).tail<3>();
  }
  grad.segment(layout_.tau_offset, M_) = elimination::pullbackT(T, grad_T_total);

  if (diag) {
    diag->smoothness = J;
    diag->time_cost = time_cost;
    diag->penalty = report;
    diag->clamp_events = clamps;
  }
  return J + time_cost + report.total;
}

spline::Trajectory Objective::trajectory(const Eigen::VectorXd& x) const {
  Eigen::VectorXd T;
  Eigen::MatrixXd q = waypoints(x, T, nullptr);
  spline::MincoSpline minco(spec_.s, M_, spec_.bc);
  return minco.solve(q, T);
}

OptimizeResult optimize(const Spec& spec, const solver::Config& config) {
  Objective objective(spec);
  return optimize(spec, config, objective.initialState());
}

OptimizeResult optimize(const Spec& spec, const solver::Config& config,
                        const Eigen::VectorXd& x0) {
  Objective objective(spec);
  auto fn = [&objective](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    return objective.evaluate(x, grad);
  };

  auto t0 = std::chrono::steady_clock::now();
  solver::Result solve = solver::minimize(fn, x0, config);
  auto t1 = std::chrono::steady_clock::now();

  OptimizeResult result;
  result.solve = std::move(solve);
  result.trajectory = objective.trajectory(result.solve.x);
  Eigen::VectorXd scratch;
  objective.evaluate(result.solve.x, scratch, &result.diagnostics);
  result.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

}  // namespace omnitraj::problem
