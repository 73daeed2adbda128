#pragma once

#include <vector>

#include <Eigen/Dense>

#include "omnitraj/spline.hpp"

namespace omnitraj::flatness {

inline const Eigen::Vector3d kGravity{0.0, 0.0, -9.8};

struct VehicleParams {
  double mass = 4.0;
  Eigen::Vector3d inertia{0.08, 0.08, 0.14};  // body-frame principal moments
};

struct State {
  double t = 0.0;
  Eigen::Vector3d position;
  Eigen::Vector3d velocity;
  Eigen::Vector3d acceleration;
  Eigen::Vector4d quaternion;  // (w, x, y, z)
  Eigen::Matrix3d rotation;
  Eigen::Vector3d omega;       // world frame
  Eigen::Vector3d omega_dot;
};

struct Input {
  Eigen::Vector3d force_body;
  Eigen::Vector3d torque_body;
};

State stateAt(const spline::Trajectory& traj, double t);
Input inputAt(const State& state, const VehicleParams& params);

// Dense state/input samples every dt seconds; always includes t = 0 and the
// final time even when the duration is not a multiple of dt.
std::vector<std::pair<State, Input>> sampleProfile(
    const spline::Trajectory& traj, const VehicleParams& params, double dt);

}  // namespace omnitraj::flatness
