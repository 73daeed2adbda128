#pragma once

#include <Eigen/Dense>

#include "omnitraj/elimination.hpp"
#include "omnitraj/geometry.hpp"
#include "omnitraj/penalty.hpp"
#include "omnitraj/solver.hpp"
#include "omnitraj/spline.hpp"

namespace omnitraj::problem {

struct Spec {
  geometry::Corridor corridor;
  geometry::VehicleShape shape;
  spline::BoundaryCondition bc;  // attitude rows hold sigma-chart values
  int s = 4;
  penalty::Config penalty;
  double k_rho = 1.0;  // weight of the total-time term
};

struct Diagnostics {
  double smoothness = 0.0;
  double time_cost = 0.0;
  penalty::Report penalty;
  int clamp_events = 0;
};

// Penalty-augmented control-effort objective over the unconstrained decision
// vector [xi | q_sigma | tau].  Each evaluation maps the variables through the
// elimination layer, rebuilds the interpolating spline, accumulates
// smoothness + k_rho |T|_1 + sampled penalties, and transports all gradients
// back through the spline adjoint and the elimination pullbacks.
class Objective {
 public:
  explicit Objective(Spec spec);

  const Spec& spec() const { return spec_; }
  const elimination::Containers& containers() const { return containers_; }
  const elimination::Layout& layout() const { return layout_; }
  int dim() const { return layout_.dim; }

  Eigen::VectorXd initialState() const;
  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                  Diagnostics* diag = nullptr) const;
  spline::Trajectory trajectory(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd waypoints(const Eigen::VectorXd& x, Eigen::VectorXd& T,
                            int* clamps) const;

  Spec spec_;
  elimination::Containers containers_;
  elimination::Layout layout_;
  int M_;
};

struct OptimizeResult {
  solver::Result solve;
  spline::Trajectory trajectory;
  Diagnostics diagnostics;
  double wall_time_s = 0.0;
};

OptimizeResult optimize(const Spec& spec, const solver::Config& config);
OptimizeResult optimize(const Spec& spec, const solver::Config& config,
                        const Eigen::VectorXd& x0);

}  // namespace omnitraj::problem
