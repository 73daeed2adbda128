#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

namespace omnitraj::attitude {

struct NonUnitQuaternion : std::runtime_error {
  explicit NonUnitQuaternion(const std::string& msg) : std::runtime_error(msg) {}
};

// Stereographic chart of SO(3): sigma in R^3 maps to the unit quaternion
//   Q(sigma) = ((n-1)/(n+1), 2 sigma / (n+1)),  n = |sigma|^2,
// which covers every rotation; only the chart pole (1,0,0,0) is unreachable.
// Quaternions are Hamilton (w,x,y,z), R is body-to-world, and the angular
// velocity lives in the world frame (Rdot = skew(omega) R).
struct AttitudeEval {
  Eigen::Vector3d sigma;
  Eigen::Vector4d Q;                   // unit quaternion (w, x, y, z)
  Eigen::Matrix3d R;                   // body-to-world rotation
  Eigen::Matrix<double, 3, 4> G;       // G(k,a) = dQ_a / dsigma_k
  std::array<Eigen::Matrix3d, 4> H;    // Hessians of each quaternion component
  Eigen::Matrix<double, 3, 4> U;       // [-r | w I + skew(r)]
  Eigen::Matrix3d Gamma;               // U G^T;  omega = 2 Gamma sigma_dot
};

// First/second time derivatives along a sigma(t) curve.
struct AttitudeRates {
  Eigen::Vector4d Qdot, Qddot;
  Eigen::Matrix<double, 3, 4> Gdot, Udot;
  Eigen::Vector3d omega, omega_dot;
};

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

Eigen::Vector4d quatFromSigma(const Eigen::Vector3d& sigma);

// Throws NonUnitQuaternion when | |Q| - 1 | > 1e-9.
Eigen::Matrix3d rotationFromQuat(const Eigen::Vector4d& Q);

// Inverse chart: extracts the quaternion of R and picks the w <= 0 lift, so
// sigma = r / (1 - w) stays in the closed unit ball away from the pole.
Eigen::Vector3d sigmaFromRotation(const Eigen::Matrix3d& R);

// U(Q) = [-r | w I + skew(r)];  omega = 2 U Qdot.
Eigen::Matrix<double, 3, 4> panelU(const Eigen::Vector4d& Q);

AttitudeEval evalAttitude(const Eigen::Vector3d& sigma);

Eigen::Vector3d angularVelocity(const AttitudeEval& at, const Eigen::Vector3d& sigma_dot);

AttitudeRates evalRates(const AttitudeEval& at, const Eigen::Vector3d& sigma_dot,
                        const Eigen::Vector3d& sigma_ddot);

// J(a,k) = d omega_a / d sigma_k at fixed sigma_dot.
Eigen::Matrix3d omegaJacobianSigma(const AttitudeEval& at, const Eigen::Vector3d& sigma_dot);

// Partials of the rotation matrix w.r.t. each quaternion component.
std::array<Eigen::Matrix3d, 4> rotationQuatPartials(const Eigen::Vector4d& Q);

}  // namespace omnitraj::attitude
