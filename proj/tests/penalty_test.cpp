#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "omnitraj/fixtures.hpp"
#include "omnitraj/penalty.hpp"
#include "omnitraj/spline.hpp"
#include "support/oracles.hpp"

using namespace omnitraj;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

geometry::Corridor singleBoxCorridor(int pieces, double half = 4.0) {
  std::vector<geometry::Polyhedron> polys;
  polys.emplace_back(fixtures::axisBox(Vector3d(-half, -half, -half),
                                       Vector3d(half, half, half)));
  return geometry::makeCorridor(std::move(polys),
                                std::vector<int>(pieces, 0));
}

spline::Trajectory hoverTrajectory(int s, int pieces, const Vector3d& p,
                                   const Vector3d& sigma) {
  spline::BoundaryCondition bc;
  bc.start = MatrixXd::Zero(6, s);
  bc.end = MatrixXd::Zero(6, s);
  bc.start.col(0) << p, sigma;
  bc.end.col(0) << p, sigma;
  spline::MincoSpline minco(s, pieces, bc);
  MatrixXd wp(6, pieces - 1);
  for (int j = 0; j + 1 < pieces; ++j) wp.col(j) << p, sigma;
  return minco.solve(wp, VectorXd::Ones(pieces));
}

// Rest-to-rest unit displacement along x in one second; its peak speed is
// 35/16 m/s for the s=4 minimum-effort interpolant.
spline::Trajectory unitHop() {
  spline::BoundaryCondition bc;
  bc.start = MatrixXd::Zero(6, 4);
  bc.end = MatrixXd::Zero(6, 4);
  bc.end(0, 0) = 1.0;
  spline::MincoSpline minco(4, 1, bc);
  return minco.solve(MatrixXd(6, 0), VectorXd::Ones(1));
}

spline::Trajectory randomTrajectory(std::mt19937& rng, int s, int M) {
  std::uniform_real_distribution<double> uni(-0.4, 0.4);
  std::uniform_real_distribution<double> tdist(0.6, 1.5);
  spline::BoundaryCondition bc;
  bc.start = MatrixXd::NullaryExpr(6, s, [&](int, int) { return uni(rng); });
  bc.end = MatrixXd::NullaryExpr(6, s, [&](int, int) { return uni(rng); });
  MatrixXd wp = MatrixXd::NullaryExpr(6, M - 1, [&](int, int) { return uni(rng); });
  VectorXd T = VectorXd::NullaryExpr(M, [&](int) { return tdist(rng); });
  spline::MincoSpline minco(s, M, bc);
  return minco.solve(wp, T);
}

}  // namespace

TEST_SUITE("penalty") {

TEST_CASE("deep hover with generous limits incurs no penalty") {
  const spline::Trajectory traj =
      hoverTrajectory(3, 2, Vector3d(0.2, -0.1, 0.3), Vector3d(0.1, 0, 0));
  geometry::Corridor corridor = singleBoxCorridor(2);
  geometry::VehicleShape shape = geometry::VehicleShape::cuboid(1, 1, 0.35);
  penalty::Config cfg;
  MatrixXd grad_c;
  VectorXd grad_T;
  const penalty::Report report =
      penalty::evaluate(traj, corridor, shape, cfg, &grad_c, &grad_T);
  CHECK(report.total == 0.0);
  CHECK(report.velocity == 0.0);
  CHECK(report.safety == 0.0);
  CHECK(grad_c.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grad_T.cwiseAbs().maxCoeff() == 0.0);
  CHECK(report.max_speed == 0.0);
  CHECK(report.max_penetration < 0.0);  // strictly inside
}

TEST_CASE("overspeed hop: velocity subtotal positive, longer time helps") {
  const spline::Trajectory traj = unitHop();
  geometry::Corridor corridor = singleBoxCorridor(1);
  geometry::VehicleShape shape = geometry::VehicleShape::cuboid(0.2, 0.2, 0.1);
  penalty::Config cfg;  // v_max = 0.8 < 35/16
  MatrixXd grad_c;
  VectorXd grad_T;
  const penalty::Report report =
      penalty::evaluate(traj, corridor, shape, cfg, &grad_c, &grad_T);
  CHECK(report.velocity > 0.0);
  CHECK(report.total >= report.velocity);
  CHECK(grad_T(0) < 0.0);
  // kappa = 16 samples the peak exactly at mid-span.
  CHECK(report.max_speed == doctest::Approx(35.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("parallel kernel agrees with the serial reference") {
  std::mt19937 rng(41);
  for (int rep = 0; rep < 5; ++rep) {
    const int M = 2 + rep;
    const spline::Trajectory traj = randomTrajectory(rng, 4, M);
    geometry::Corridor corridor = singleBoxCorridor(M, 0.9);
    geometry::VehicleShape shape = geometry::VehicleShape::cuboid(0.6, 0.5, 0.2);
    penalty::Config cfg;
    cfg.kappa = 12;
    MatrixXd gc_a, gc_b;
    VectorXd gt_a, gt_b;
    const penalty::Report a =
        penalty::evaluate(traj, corridor, shape, cfg, &gc_a, &gt_a);
    const penalty::Report b =
        penalty::evaluateReference(traj, corridor, shape, cfg, &gc_b, &gt_b);
    CHECK(a.total == doctest::Approx(b.total).epsilon(1e-12));
    CHECK(a.velocity == doctest::Approx(b.velocity).epsilon(1e-12));
    CHECK(a.acceleration == doctest::Approx(b.acceleration).epsilon(1e-12));
    CHECK(a.omega == doctest::Approx(b.omega).epsilon(1e-12));
    CHECK(a.safety == doctest::Approx(b.safety).epsilon(1e-12));
    const double scale = std::max(1.0, gc_b.cwiseAbs().maxCoeff());
    CHECK((gc_a - gc_b).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK((gt_a - gt_b).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(1.0, gt_b.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("results are bit-identical for any thread count") {
  std::mt19937 rng(42);
  const spline::Trajectory traj = randomTrajectory(rng, 4, 5);
  geometry::Corridor corridor = singleBoxCorridor(5, 0.9);
  geometry::VehicleShape shape = geometry::VehicleShape::cuboid(0.6, 0.5, 0.2);
  penalty::Config cfg;
  MatrixXd gc_1, gc_4;
  VectorXd gt_1, gt_4;
  cfg.threads = 1;
  const penalty::Report r1 =
      penalty::evaluate(traj, corridor, shape, cfg, &gc_1, &gt_1);
  cfg.threads = 4;
  const penalty::Report r4 =
      penalty::evaluate(traj, corridor, shape, cfg, &gc_4, &gt_4);
  CHECK(r1.total == r4.total);
  CHECK(r1.safety == r4.safety);
  CHECK((gc_1 - gc_4).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gt_1 - gt_4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradients match finite differences") {
  // Keep the total penalty moderate (~1e4): central differences carry
  // roundoff noise of about f * eps / (2h), which must stay below the 1e-5
  // comparison floor.  Large attitude coefficients would blow up the omega
  // term, so those channels are damped.
  std::mt19937 rng(43);
  const int s = 4, M = 3;
  std::uniform_real_distribution<double> uni(-0.4, 0.4);
  std::uniform_real_distribution<double> tdist(0.6, 1.5);
  spline::BoundaryCondition bc;
  bc.start = MatrixXd::NullaryExpr(6, s, [&](int r, int) {
    return (r < 3 ? 1.0 : 0.25) * uni(rng);
  });
  bc.end = MatrixXd::NullaryExpr(6, s, [&](int r, int) {
    return (r < 3 ? 1.0 : 0.25) * uni(rng);
  });
  MatrixXd wp = MatrixXd::NullaryExpr(6, M - 1, [&](int r, int) {
    return (r < 3 ? 1.0 : 0.25) * uni(rng);
  });
  VectorXd Tgen = VectorXd::NullaryExpr(M, [&](int) { return tdist(rng); });
  spline::MincoSpline minco(s, M, bc);
  const spline::Trajectory traj = minco.solve(wp, Tgen);
  geometry::Corridor corridor = singleBoxCorridor(M, 0.8);
  geometry::VehicleShape shape = geometry::VehicleShape::cuboid(0.5, 0.4, 0.2);
  penalty::Config cfg;
  cfg.kappa = 8;
  cfg.v_max = 0.5;
  cfg.omega_max = 0.5;
  cfg.a_max = 2.0;
  cfg.w_v = cfg.w_a = cfg.w_omega = 1e3;
  cfg.w_c = 3e3;
  MatrixXd grad_c;
  VectorXd grad_T;
  const penalty::Report report =
      penalty::evaluate(traj, corridor, shape, cfg, &grad_c, &grad_T);
  CHECK(report.total > 0.0);  // the check must exercise active terms

  const MatrixXd coeffs = traj.coefficients();
  const VectorXd T = traj.durations();
  auto value_c = [&](const MatrixXd& c) {
    return penalty::evaluate(spline::Trajectory(s, T, c), corridor, shape, cfg,
                             nullptr, nullptr)
        .total;
  };
  const double h = 1e-5;
  for (int r = 0; r < coeffs.rows(); r += 3) {
    for (int c = 0; c < 6; c += 2) {
      MatrixXd cp = coeffs, cm = coeffs;
      cp(r, c) += h;
      cm(r, c) -= h;
      CAPTURE(r);
      CAPTURE(c);
      CHECK(testsupport::gradClose(grad_c(r, c),
                                   (value_c(cp) - value_c(cm)) / (2 * h), 1e-5));
    }
  }
  for (int i = 0; i < M; ++i) {
    VectorXd Tp = T, Tm = T;
    Tp(i) += h;
    Tm(i) -= h;
    const double fp =
        penalty::evaluate(spline::Trajectory(s, Tp, coeffs), corridor, shape,
                          cfg, nullptr, nullptr)
            .total;
    const double fm =
        penalty::evaluate(spline::Trajectory(s, Tm, coeffs), corridor, shape,
                          cfg, nullptr, nullptr)
            .total;
    CHECK(testsupport::gradClose(grad_T(i), (fp - fm) / (2 * h), 1e-5));
  }
}

TEST_CASE("gradient buffers accumulate instead of overwriting") {
  const spline::Trajectory traj =
      hoverTrajectory(3, 2, Vector3d::Zero(), Vector3d::Zero());
  geometry::Corridor corridor = singleBoxCorridor(2);
  geometry::VehicleShape shape = geometry::VehicleShape::cuboid(1, 1, 0.35);
  penalty::Config cfg;
  MatrixXd grad_c = MatrixXd::Constant(2 * 3 * 2, 6, 0.5);
  VectorXd grad_T = VectorXd::Constant(2, 0.25);
  penalty::evaluate(traj, corridor, shape, cfg, &grad_c, &grad_T);
  // Zero penalty: correctly-shaped buffers must be left untouched.
  CHECK((grad_c.array() == 0.5).all());
  CHECK((grad_T.array() == 0.25).all());
  // Mis-shaped buffers are resized and zeroed before accumulation.
  MatrixXd wrong = MatrixXd::Constant(3, 3, 9.0);
  VectorXd wrong_T = VectorXd::Constant(7, 9.0);
  penalty::evaluate(traj, corridor, shape, cfg, &wrong, &wrong_T);
  CHECK(wrong.rows() == 2 * 3 * 2);
  CHECK(wrong.cols() == 6);
  CHECK(wrong.cwiseAbs().maxCoeff() == 0.0);
  CHECK(wrong_T.size() == 2);
}

TEST_CASE("penetration diagnostics report the worst vertex slack") {
  const spline::Trajectory traj =
      hoverTrajectory(3, 2, Vector3d(0.6, 0, 0), Vector3d::Zero());
  geometry::Corridor corridor = singleBoxCorridor(2, 1.0);
  geometry::VehicleShape shape = geometry::VehicleShape::cuboid(1, 1, 0.35);
  // Level pose at x = 0.6 in the unit box: corner reaches x = 1.1.
  const penalty::ViolationProfile profile =
      penalty::maxViolationProfile(traj, corridor, shape, 10);
  CHECK(profile.max_penetration == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(profile.max_speed == 0.0);
  CHECK(profile.samples == 2 * 11);

  penalty::Config cfg;
  const penalty::Report report =
      penalty::evaluate(traj, corridor, shape, cfg, nullptr, nullptr);
  CHECK(report.max_penetration == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(report.safety > 0.0);
}

TEST_CASE("piece count must match the corridor assignment") {
  const spline::Trajectory traj =
      hoverTrajectory(3, 3, Vector3d::Zero(), Vector3d::Zero());
  geometry::Corridor corridor = singleBoxCorridor(2);
  geometry::VehicleShape shape = geometry::VehicleShape::cuboid(1, 1, 0.35);
  penalty::Config cfg;
  CHECK_THROWS_AS(
      penalty::evaluate(traj, corridor, shape, cfg, nullptr, nullptr),
      penalty::AssignmentMismatch);
  CHECK_THROWS_AS(penalty::maxViolationProfile(traj, corridor, shape, 4),
                  penalty::AssignmentMismatch);
}

}  // TEST_SUITE("penalty")
