#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace omnitraj::solver {

struct Config {
  int memory = 16;              // L-BFGS history length
  double grad_tol = 1e-5;       // stop when |g| <= grad_tol * max(1, |x|)
  int max_iterations = 3000;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;       // step shrink factor
  int max_line_search = 60;
  double min_step = 1e-16;      // floor on the trial move length |step * d|
};

enum class Status { Converged, MaxIterations, LineSearchFailure, NonFiniteObjective };

const char* statusName(Status status);

struct IterRecord {
  double value = 0.0, grad_norm = 0.0, step = 0.0;
};

struct Result {
  Status status = Status::Converged;
  Eigen::VectorXd x, grad;
  double value = 0.0;
  int iterations = 0;              // accepted steps
  std::vector<IterRecord> trace;   // one record per accepted step
};

// Objective callback: fills `grad` and returns the value.
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Limited-memory BFGS (two-loop recursion) with Armijo-only backtracking.
// Curvature pairs with s.y <= 1e-12 |s||y| are skipped.  On line-search
// failure or an exhausted iteration budget the best accepted iterate is
// returned with the corresponding status.
Result minimize(const ObjectiveFn& f, Eigen::VectorXd x0, const Config& config = {});

}  // namespace omnitraj::solver
