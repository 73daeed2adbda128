#include "omnitraj/flatness.hpp"

#include <cmath>
#include <stdexcept>

#include "omnitraj/attitude.hpp"

namespace omnitraj::flatness {

State stateAt(const spline::Trajectory& traj, double t) {
  Eigen::Matrix<double, 6, 1> d0 = traj.derivative(t, 0);
  Eigen::Matrix<double, 6, 1> d1 = traj.derivative(t, 1);
  Eigen::Matrix<double, 6, 1> d2 = traj.derivative(t, 2);

  State state;
  state.t = t;
  state.position = d0.head<3>();
  state.velocity = d1.head<3>();
  state.acceleration = d2.head<3>();

  attitude::AttitudeEval eval = attitude::evalAttitude(d0.tail<3>());
  attitude::AttitudeRates rates =
      attitude::evalRates(eval, d1.tail<3>(), d2.tail<3>());
  state.quaternion = eval.Q;
  state.rotation = eval.R;
  state.omega = rates.omega;
  state.omega_dot = rates.omega_dot;
  return state;
}

Input inputAt(const State& state, const VehicleParams& params) {
  if (params.mass <= 0.0) throw std::invalid_argument("mass must be positive");
  const Eigen::Matrix3d& R = state.rotation;
  Eigen::Matrix3d J_world =
      R * params.inertia.asDiagonal() * R.transpose();

  Input input;
  input.force_body =
      params.mass * (R.transpose() * (state.acceleration - kGravity));
  input.torque_body =
      R.transpose() *
      (state.omega.cross(J_world * state.omega) + J_world * state.omega_dot);
  return input;
}

std::vector<std::pair<State, Input>> sampleProfile(
    const spline::Trajectory& traj, const VehicleParams& params, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("sample step must be positive");
  double total = traj.duration();
  std::vector<std::pair<State, Input>> samples;
  int n = static_cast<int>(std::floor(total / dt + 1e-9));
  samples.reserve(static_cast<size_t>(n) + 2);
  for (int i = 0; i <= n; ++i) {
    State st = stateAt(traj, i * dt);
    Input in = inputAt(st, params);
    samples.emplace_back(st, in);
  }
  if (total - n * dt > 1e-9) {
    State st = stateAt(traj, total);
    Input in = inputAt(st, params);
    samples.emplace_back(st, in);
  }
  return samples;
}

}  // namespace omnitraj::flatness
