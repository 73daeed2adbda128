#include "omnitraj/attitude.hpp"

#include <cmath>

namespace omnitraj::attitude {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d S;
  S << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return S;
}

Eigen::Vector4d quatFromSigma(const Eigen::Vector3d& sigma) {
  const double n = sigma.squaredNorm();
  const double D = n + 1.0;
  Eigen::Vector4d Q;
  Q(0) = (n - 1.0) / D;
  Q.tail<3>() = 2.0 * sigma / D;
  return Q;
}

namespace {

// Unit-norm assumed; evalAttitude feeds exactly unit quaternions and must not
// throw (it runs inside parallel kernels).
Eigen::Matrix3d rotationUnchecked(const Eigen::Vector4d& Q) {
  const double w = Q(0), x = Q(1), y = Q(2), z = Q(3);
  Eigen::Matrix3d R;
  R << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return R;
}

}  // namespace

Eigen::Matrix3d rotationFromQuat(const Eigen::Vector4d& Q) {
  if (!(std::abs(Q.norm() - 1.0) <= 1e-9))
    throw NonUnitQuaternion("rotationFromQuat: |Q| deviates from 1 by more than 1e-9");
  return rotationUnchecked(Q);
}

Eigen::Vector3d sigmaFromRotation(const Eigen::Matrix3d& R) {
  // Shepperd-style extraction: branch on the largest diagonal combination.
  Eigen::Vector4d Q;
  const double tr = R.trace();
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    Q << 0.25 * s, (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s,
        (R(1, 0) - R(0, 1)) / s;
  } else if (R(0, 0) > R(1, 1) && R(0, 0) > R(2, 2)) {
    double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2.0;
    Q << (R(2, 1) - R(1, 2)) / s, 0.25 * s, (R(0, 1) + R(1, 0)) / s,
        (R(0, 2) + R(2, 0)) / s;
  } else if (R(1, 1) > R(2, 2)) {
    double s = std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2)) * 2.0;
    Q << (R(0, 2) - R(2, 0)) / s, (R(0, 1) + R(1, 0)) / s, 0.25 * s,
        (R(1, 2) + R(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1)) * 2.0;
    Q << (R(1, 0) - R(0, 1)) / s, (R(0, 2) + R(2, 0)) / s, (R(1, 2) + R(2, 1)) / s,
        0.25 * s;
  }
  Q.normalize();
  if (Q(0) > 0.0) Q = -Q;  // lift with w <= 0 keeps sigma in the unit ball
  return Q.tail<3>() / (1.0 - Q(0));
}

Eigen::Matrix<double, 3, 4> panelU(const Eigen::Vector4d& Q) {
  Eigen::Matrix<double, 3, 4> U;
  const Eigen::Vector3d r = Q.tail<3>();
  U.col(0) = -r;
  U.rightCols<3>() = Q(0) * Eigen::Matrix3d::Identity() + skew(r);
  return U;
}

AttitudeEval evalAttitude(const Eigen::Vector3d& sigma) {
  AttitudeEval at;
  at.sigma = sigma;
  at.Q = quatFromSigma(sigma);
  at.R = rotationUnchecked(at.Q);

  const double n = sigma.squaredNorm();
  const double D = n + 1.0;
  const double D2 = D * D, D3 = D2 * D;
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();

  at.G.col(0) = 4.0 * sigma / D2;
  at.G.rightCols<3>() = (2.0 / D) * I - (4.0 / D2) * sigma * sigma.transpose();

  at.H[0] = (4.0 / D2) * I - (16.0 / D3) * sigma * sigma.transpose();
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix3d Hi = (16.0 / D3) * sigma(i) * sigma * sigma.transpose();
    Hi -= (4.0 / D2) * sigma(i) * I;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if (j == i) Hi(j, k) -= (4.0 / D2) * sigma(k);
        if (k == i) Hi(j, k) -= (4.0 / D2) * sigma(j);
      }
    at.H[i + 1] = Hi;
  }

  at.U = panelU(at.Q);
  at.Gamma = at.U * at.G.transpose();
  return at;
}

Eigen::Vector3d angularVelocity(const AttitudeEval& at, const Eigen::Vector3d& sigma_dot) {
  return 2.0 * at.Gamma * sigma_dot;
}

AttitudeRates evalRates(const AttitudeEval& at, const Eigen::Vector3d& sigma_dot,
                        const Eigen::Vector3d& sigma_ddot) {
  AttitudeRates r;
  r.Qdot = at.G.transpose() * sigma_dot;
  for (int a = 0; a < 4; ++a) r.Gdot.col(a) = at.H[a] * sigma_dot;
  r.Qddot = r.Gdot.transpose() * sigma_dot + at.G.transpose() * sigma_ddot;
  r.Udot = panelU(r.Qdot);  // U is linear in Q
  r.omega = 2.0 * at.U * r.Qdot;
  r.omega_dot = 2.0 * (r.Udot * r.Qdot + at.U * r.Qddot);
  return r;
}

Eigen::Matrix3d omegaJacobianSigma(const AttitudeEval& at, const Eigen::Vector3d& sigma_dot) {
  const Eigen::Vector4d Qdot = at.G.transpose() * sigma_dot;
  std::array<Eigen::Vector3d, 4> h;  // h[a] = H_a sigma_dot
  for (int a = 0; a < 4; ++a) h[a] = at.H[a] * sigma_dot;
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector4d dQ = at.G.row(k);               // dQ/dsigma_k
    const Eigen::Vector4d dGT_sd(h[0](k), h[1](k), h[2](k), h[3](k));
    J.col(k) = 2.0 * (panelU(dQ) * Qdot + at.U * dGT_sd);
  }
  return J;
}

std::array<Eigen::Matrix3d, 4> rotationQuatPartials(const Eigen::Vector4d& Q) {
  const double w = Q(0), x = Q(1), y = Q(2), z = Q(3);
  std::array<Eigen::Matrix3d, 4> P;
  P[0] << 0, -z, y, z, 0, -x, -y, x, 0;
  P[1] << 0, y, z, y, -2 * x, -w, z, w, -2 * x;
  P[2] << -2 * y, x, w, x, 0, z, -w, z, -2 * y;
  P[3] << -2 * z, -w, x, w, -2 * z, y, x, y, 0;
  for (auto& M : P) M *= 2.0;
  return P;
}

}  // namespace omnitraj::attitude
