#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "omnitraj/geometry.hpp"
#include "omnitraj/spline.hpp"

namespace omnitraj::penalty {

struct AssignmentMismatch : std::runtime_error {
  explicit AssignmentMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct Config {
  int kappa = 16;  // samples per piece
  double v_max = 0.8, a_max = 5.0, omega_max = 0.8;
  double w_v = 1e4, w_a = 1e4, w_omega = 1e4, w_c = 9e4;
  int threads = 0;  // 0: OpenMP default
};

struct Report {
  double total = 0.0;
  double velocity = 0.0, acceleration = 0.0, omega = 0.0, safety = 0.0;
  // Maxima over the penalty sample grid (diagnostics, not oversampled).
  double max_speed = 0.0, max_acceleration = 0.0, max_omega = 0.0;
  double max_penetration = -std::numeric_limits<double>::infinity();
};

// Sampled cubed-hinge penalties over speed, acceleration, body rate, and
// whole-body corridor containment, with analytic gradients accumulated into
// grad_coeffs ((2 s M) x 6) and grad_T (M); buffers of any other shape are
// resized and zeroed first.  Pass nullptr to skip gradients.
// Pieces are evaluated in parallel (OpenMP) and reduced in a fixed order, so
// results are bit-identical for any thread count.
Report evaluate(const spline::Trajectory& traj, const geometry::Corridor& corridor,
                const geometry::VehicleShape& shape, const Config& config,
                Eigen::MatrixXd* grad_coeffs, Eigen::VectorXd* grad_T);

// Serial reference implementation (no face rejection, no buffering); the test
// oracle for the parallel kernel and the baseline of the benchmark target.
Report evaluateReference(const spline::Trajectory& traj,
                         const geometry::Corridor& corridor,
                         const geometry::VehicleShape& shape, const Config& config,
                         Eigen::MatrixXd* grad_coeffs, Eigen::VectorXd* grad_T);

struct ViolationProfile {
  double max_speed = 0.0, max_acceleration = 0.0, max_omega = 0.0;
  double max_penetration = -std::numeric_limits<double>::infinity();
  int samples = 0;
};

// Dense sweep (samples_per_piece + 1 points per piece, both ends included) of
// the kinematic magnitudes and the worst face slack over all body vertices.
ViolationProfile maxViolationProfile(const spline::Trajectory& traj,
                                     const geometry::Corridor& corridor,
                                     const geometry::VehicleShape& shape,
                                     int samples_per_piece);

}  // namespace omnitraj::penalty
