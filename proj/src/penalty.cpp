#include "omnitraj/penalty.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "omnitraj/attitude.hpp"

namespace omnitraj::penalty {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PieceAccum {
  double vel = 0.0, acc = 0.0, om = 0.0, safe = 0.0, grad_T = 0.0;
  double max_speed = 0.0, max_acc = 0.0, max_omega = 0.0, max_pen = kNegInf;
  Eigen::MatrixXd grad_c;
};

// All kappa samples of one piece.  Safety faces whose plane is further than
// the vehicle circumradius plus 1 m from the center never contribute (the
// hinge is exactly zero), so they are rejected before the vertex loop.
void evaluatePiece(const spline::Trajectory& traj, const geometry::Polyhedron& poly,
                   const geometry::VehicleShape& shape, const Config& cfg, int i,
                   bool want_grad, PieceAccum& out) {
  const int s = traj.order();
  const int rows = 2 * s;
  const auto C = traj.pieceCoefficients(i);
  const double T = traj.durations()(i);
  const double dt = T / cfg.kappa;
  const auto& faces = poly.faces();
  const auto& vb = shape.vertices();
  const int K = poly.numFaces();
  const int L = shape.numVertices();
  const double reject = shape.circumradius() + 1.0;
  const double v2 = cfg.v_max * cfg.v_max;
  const double a2 = cfg.a_max * cfg.a_max;
  const double o2 = cfg.omega_max * cfg.omega_max;
  if (want_grad) out.grad_c = Eigen::MatrixXd::Zero(rows, 6);

  for (int j = 1; j <= cfg.kappa; ++j) {
    const double frac = static_cast<double>(j) / cfg.kappa;
    const double tb = frac * T;
    const Eigen::VectorXd b0 = spline::basis(s, 0, tb);
    const Eigen::VectorXd b1 = spline::basis(s, 1, tb);
    const Eigen::VectorXd b2 = spline::basis(s, 2, tb);
    const Eigen::VectorXd b3 = spline::basis(s, 3, tb);
    const Eigen::Matrix<double, 6, 1> z0 = C.transpose() * b0;
    const Eigen::Matrix<double, 6, 1> z1 = C.transpose() * b1;
    const Eigen::Matrix<double, 6, 1> z2 = C.transpose() * b2;
    const Eigen::Vector3d p = z0.head<3>(), sg = z0.tail<3>();
    const Eigen::Vector3d pd = z1.head<3>(), sgd = z1.tail<3>();
    const Eigen::Vector3d pdd = z2.head<3>(), sgdd = z2.tail<3>();
    const Eigen::Vector3d pddd = (C.transpose() * b3).head<3>();

    const attitude::AttitudeEval at = attitude::evalAttitude(sg);
    const attitude::AttitudeRates rt = attitude::evalRates(at, sgd, sgdd);

    out.max_speed = std::max(out.max_speed, pd.norm());
    out.max_acc = std::max(out.max_acc, pdd.norm());
    out.max_omega = std::max(out.max_omega, rt.omega.norm());

    const double gv = pd.squaredNorm() - v2;
    if (gv > 0.0) {
      const double gv2 = gv * gv;
      out.vel += cfg.w_v * gv2 * gv * dt;
      if (want_grad) {
        out.grad_c.leftCols<3>() += (cfg.w_v * dt * 6.0 * gv2) * (b1 * pd.transpose());
        out.grad_T += cfg.w_v * (gv2 * gv / cfg.kappa + 6.0 * gv2 * pd.dot(pdd) * frac * dt);
      }
    }

    const double ga = pdd.squaredNorm() - a2;
    if (ga > 0.0) {
      const double ga2 = ga * ga;
      out.acc += cfg.w_a * ga2 * ga * dt;
      if (want_grad) {
        out.grad_c.leftCols<3>() += (cfg.w_a * dt * 6.0 * ga2) * (b2 * pdd.transpose());
        out.grad_T += cfg.w_a * (ga2 * ga / cfg.kappa + 6.0 * ga2 * pdd.dot(pddd) * frac * dt);
      }
    }

    const double go = rt.omega.squaredNorm() - o2;
    if (go > 0.0) {
      const double go2 = go * go;
      out.om += cfg.w_omega * go2 * go * dt;
      if (want_grad) {
        const Eigen::Matrix3d D = attitude::omegaJacobianSigma(at, sgd);
        const Eigen::Vector3d dg_sg = 2.0 * D.transpose() * rt.omega;
        const Eigen::Vector3d dg_sgd = 4.0 * at.Gamma.transpose() * rt.omega;
        out.grad_c.rightCols<3>() += (cfg.w_omega * dt * 3.0 * go2) *
                                     (b0 * dg_sg.transpose() + b1 * dg_sgd.transpose());
        out.grad_T += cfg.w_omega *
                      (go2 * go / cfg.kappa +
                       6.0 * go2 * rt.omega.dot(rt.omega_dot) * frac * dt);
      }
    }

    const Eigen::Matrix3Xd RV = at.R * vb;
    std::array<Eigen::Matrix3Xd, 4> PV;
    if (want_grad) {
      const auto P = attitude::rotationQuatPartials(at.Q);
      for (int a = 0; a < 4; ++a) PV[a] = P[a] * vb;
    }
    for (int k = 0; k < K; ++k) {
      const Eigen::Vector3d n = faces.row(k).head<3>();
      const double slack0 = n.dot(p) - faces(k, 3);
      if (slack0 < -reject) {
        out.max_pen = std::max(out.max_pen, slack0 + shape.circumradius());
        continue;
      }
      for (int l = 0; l < L; ++l) {
        const double gc = slack0 + n.dot(RV.col(l));
        out.max_pen = std::max(out.max_pen, gc);
        if (gc <= 0.0) continue;
        const double gc2 = gc * gc;
        out.safe += cfg.w_c * gc2 * gc * dt;
        if (want_grad) {
          const double mult = cfg.w_c * dt * 3.0 * gc2;
          out.grad_c.leftCols<3>() += mult * (b0 * n.transpose());
          Eigen::Vector4d sv;
          for (int a = 0; a < 4; ++a) sv(a) = n.dot(PV[a].col(l));
          const Eigen::Vector3d dg_sg = at.G * sv;
          out.grad_c.rightCols<3>() += mult * (b0 * dg_sg.transpose());
          const double dgdt = n.dot(pd) + n.dot(rt.omega.cross(RV.col(l)));
          out.grad_T += cfg.w_c * (gc2 * gc / cfg.kappa + 3.0 * gc2 * dgdt * frac * dt);
        }
      }
    }
  }
}

void checkInputs(const spline::Trajectory& traj, const geometry::Corridor& corridor) {
  if (corridor.pieces() != traj.pieces())
    throw AssignmentMismatch("penalty: corridor assigns " +
                             std::to_string(corridor.pieces()) + " pieces, trajectory has " +
                             std::to_string(traj.pieces()));
}

}  // namespace

Report evaluate(const spline::Trajectory& traj, const geometry::Corridor& corridor,
                const geometry::VehicleShape& shape, const Config& config,
                Eigen::MatrixXd* grad_coeffs, Eigen::VectorXd* grad_T) {
  checkInputs(traj, corridor);
  const int s = traj.order();
  const int M = traj.pieces();
  const bool want_grad = grad_coeffs != nullptr || grad_T != nullptr;
  std::vector<PieceAccum> acc(M);

  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int i = 0; i < M; ++i) {
    evaluatePiece(traj, corridor.polyhedra[corridor.assignment[i]], shape, config, i,
                  want_grad, acc[i]);
  }

  // Fixed-order reduction: results are independent of the thread count.
  if (grad_coeffs && (grad_coeffs->rows() != 2 * s * M || grad_coeffs->cols() != 6))
    *grad_coeffs = Eigen::MatrixXd::Zero(2 * s * M, 6);
  if (grad_T && grad_T->size() != M) *grad_T = Eigen::VectorXd::Zero(M);
  Report rep;
  for (int i = 0; i < M; ++i) {
    rep.velocity += acc[i].vel;
    rep.acceleration += acc[i].acc;
    rep.omega += acc[i].om;
    rep.safety += acc[i].safe;
    rep.max_speed = std::max(rep.max_speed, acc[i].max_speed);
    rep.max_acceleration = std::max(rep.max_acceleration, acc[i].max_acc);
    rep.max_omega = std::max(rep.max_omega, acc[i].max_omega);
    rep.max_penetration = std::max(rep.max_penetration, acc[i].max_pen);
    if (grad_coeffs) grad_coeffs->middleRows(2 * s * i, 2 * s) += acc[i].grad_c;
    if (grad_T) (*grad_T)(i) += acc[i].grad_T;
  }
  rep.total = rep.velocity + rep.acceleration + rep.omega + rep.safety;
  return rep;
}

Report evaluateReference(const spline::Trajectory& traj, const geometry::Corridor& corridor,
                         const geometry::VehicleShape& shape, const Config& config,
                         Eigen::MatrixXd* grad_coeffs, Eigen::VectorXd* grad_T) {
  checkInputs(traj, corridor);
  const int s = traj.order();
  const int M = traj.pieces();
  const bool wg = grad_coeffs != nullptr || grad_T != nullptr;
  if (grad_coeffs && (grad_coeffs->rows() != 2 * s * M || grad_coeffs->cols() != 6))
    *grad_coeffs = Eigen::MatrixXd::Zero(2 * s * M, 6);
  if (grad_T && grad_T->size() != M) *grad_T = Eigen::VectorXd::Zero(M);
  Report rep;

  auto cube = [](double x) { return x > 0.0 ? x * x * x : 0.0; };
  auto dcube = [](double x) { return x > 0.0 ? 3.0 * x * x : 0.0; };

  for (int i = 0; i < M; ++i) {
    const auto& poly = corridor.polyhedra[corridor.assignment[i]];
    const auto C = traj.pieceCoefficients(i);
    const double T = traj.durations()(i);
    for (int j = 1; j <= config.kappa; ++j) {
      const double frac = static_cast<double>(j) / config.kappa;
      const double tb = frac * T;
      const Eigen::VectorXd b0 = spline::basis(s, 0, tb);
      const Eigen::VectorXd b1 = spline::basis(s, 1, tb);
      const Eigen::VectorXd b2 = spline::basis(s, 2, tb);
      const Eigen::VectorXd b3 = spline::basis(s, 3, tb);
      const Eigen::Vector3d p = (C.transpose() * b0).head<3>();
      const Eigen::Vector3d sg = (C.transpose() * b0).tail<3>();
      const Eigen::Vector3d pd = (C.transpose() * b1).head<3>();
      const Eigen::Vector3d sgd = (C.transpose() * b1).tail<3>();
      const Eigen::Vector3d pdd = (C.transpose() * b2).head<3>();
      const Eigen::Vector3d sgdd = (C.transpose() * b2).tail<3>();
      const Eigen::Vector3d pddd = (C.transpose() * b3).head<3>();
      const auto at = attitude::evalAttitude(sg);
      const auto rt = attitude::evalRates(at, sgd, sgdd);

      rep.max_speed = std::max(rep.max_speed, pd.norm());
      rep.max_acceleration = std::max(rep.max_acceleration, pdd.norm());
      rep.max_omega = std::max(rep.max_omega, rt.omega.norm());

      auto gcp = [&]() { return grad_coeffs->block(2 * s * i, 0, 2 * s, 3); };
      auto gcs = [&]() { return grad_coeffs->block(2 * s * i, 3, 2 * s, 3); };

      const double gv = pd.squaredNorm() - config.v_max * config.v_max;
      rep.velocity += config.w_v * cube(gv) * T / config.kappa;
      if (wg && gv > 0.0) {
        if (grad_coeffs)
          gcp() += config.w_v * (T / config.kappa) * dcube(gv) * 2.0 * b1 * pd.transpose();
        if (grad_T)
          (*grad_T)(i) += config.w_v / config.kappa *
                          (cube(gv) + dcube(gv) * 2.0 * pd.dot(pdd) * frac * T);
      }

      const double ga = pdd.squaredNorm() - config.a_max * config.a_max;
      rep.acceleration += config.w_a * cube(ga) * T / config.kappa;
      if (wg && ga > 0.0) {
        if (grad_coeffs)
          gcp() += config.w_a * (T / config.kappa) * dcube(ga) * 2.0 * b2 * pdd.transpose();
        if (grad_T)
          (*grad_T)(i) += config.w_a / config.kappa *
                          (cube(ga) + dcube(ga) * 2.0 * pdd.dot(pddd) * frac * T);
      }

      const double go = rt.omega.squaredNorm() - config.omega_max * config.omega_max;
      rep.omega += config.w_omega * cube(go) * T / config.kappa;
      if (wg && go > 0.0) {
        const Eigen::Matrix3d D = attitude::omegaJacobianSigma(at, sgd);
        if (grad_coeffs)
          gcs() += config.w_omega * (T / config.kappa) * dcube(go) *
                   (b0 * (2.0 * D.transpose() * rt.omega).transpose() +
                    b1 * (4.0 * at.Gamma.transpose() * rt.omega).transpose());
        if (grad_T)
          (*grad_T)(i) += config.w_omega / config.kappa *
                          (cube(go) + dcube(go) * 2.0 * rt.omega.dot(rt.omega_dot) * frac * T);
      }

      const auto P = attitude::rotationQuatPartials(at.Q);
      for (int l = 0; l < shape.numVertices(); ++l) {
        const Eigen::Vector3d vl = shape.vertices().col(l);
        const Eigen::Vector3d world = p + at.R * vl;
        for (int k = 0; k < poly.numFaces(); ++k) {
          const Eigen::Vector3d n = poly.faces().row(k).head<3>();
          const double gch = n.dot(world) - poly.faces()(k, 3);
          rep.max_penetration = std::max(rep.max_penetration, gch);
          rep.safety += config.w_c * cube(gch) * T / config.kappa;
          if (wg && gch > 0.0) {
            if (grad_coeffs) {
              gcp() += config.w_c * (T / config.kappa) * dcube(gch) * b0 * n.transpose();
              Eigen::Vector4d sv;
              for (int a = 0; a < 4; ++a) sv(a) = n.dot(P[a] * vl);
              gcs() += config.w_c * (T / config.kappa) * dcube(gch) * b0 *
                       (at.G * sv).transpose();
            }
            if (grad_T) {
              const double dgdt = n.dot(pd) + n.dot(rt.omega.cross(at.R * vl));
              (*grad_T)(i) += config.w_c / config.kappa *
                              (cube(gch) + dcube(gch) * dgdt * frac * T);
            }
          }
        }
      }
    }
  }
  rep.total = rep.velocity + rep.acceleration + rep.omega + rep.safety;
  return rep;
}

ViolationProfile maxViolationProfile(const spline::Trajectory& traj,
                                     const geometry::Corridor& corridor,
                                     const geometry::VehicleShape& shape,
                                     int samples_per_piece) {
  checkInputs(traj, corridor);
  ViolationProfile out;
  const int s = traj.order();
  for (int i = 0; i < traj.pieces(); ++i) {
    const auto& poly = corridor.polyhedra[corridor.assignment[i]];
    const auto C = traj.pieceCoefficients(i);
    const double T = traj.durations()(i);
    for (int j = 0; j <= samples_per_piece; ++j) {
      const double tb = T * j / samples_per_piece;
      const Eigen::Matrix<double, 6, 1> z0 = C.transpose() * spline::basis(s, 0, tb);
      const Eigen::Matrix<double, 6, 1> z1 = C.transpose() * spline::basis(s, 1, tb);
      const Eigen::Matrix<double, 6, 1> z2 = C.transpose() * spline::basis(s, 2, tb);
      const auto at = attitude::evalAttitude(z0.tail<3>());
      const auto rt = attitude::evalRates(at, z1.tail<3>(), z2.tail<3>());
      out.max_speed = std::max(out.max_speed, z1.head<3>().norm());
      out.max_acceleration = std::max(out.max_acceleration, z2.head<3>().norm());
      out.max_omega = std::max(out.max_omega, rt.omega.norm());
      const Eigen::Matrix3Xd wv = shape.worldVertices(z0.head<3>(), at.R);
      for (int l = 0; l < wv.cols(); ++l)
        out.max_penetration = std::max(out.max_penetration, poly.maxSlack(wv.col(l)));
      ++out.samples;
    }
  }
  return out;
}

}  // namespace omnitraj::penalty
