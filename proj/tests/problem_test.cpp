#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "omnitraj/fixtures.hpp"
#include "omnitraj/problem.hpp"
#include "support/oracles.hpp"

using namespace omnitraj;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

// Rest-to-rest 1 m hop through a single large box, generous limits.
problem::Spec hopSpec(int pieces) {
  std::vector<geometry::Polyhedron> polys;
  polys.emplace_back(fixtures::axisBox(Vector3d(-4, -4, -4), Vector3d(4, 4, 4)));
  problem::Spec spec{
      geometry::makeCorridor(std::move(polys), std::vector<int>(pieces, 0)),
      geometry::VehicleShape::cuboid(0.4, 0.4, 0.2),
      {},
      4,
      {},
      1.0};
  spec.bc.start = MatrixXd::Zero(6, 4);
  spec.bc.end = MatrixXd::Zero(6, 4);
  spec.bc.end(0, 0) = 1.0;
  spec.penalty.v_max = 5.0;
  spec.penalty.a_max = 20.0;
  spec.penalty.omega_max = 5.0;
  spec.penalty.threads = 1;
  spec.k_rho = 1.0;
  return spec;
}

problem::Spec shiftedSpec(const problem::Spec& spec, const Vector3d& delta) {
  problem::Spec out = spec;
  std::vector<geometry::Polyhedron> polys;
  for (const auto& poly : spec.corridor.polyhedra) {
    Eigen::MatrixX4d faces = poly.faces();
    for (Eigen::Index r = 0; r < faces.rows(); ++r) {
      faces(r, 3) += faces.row(r).head<3>().dot(delta);
    }
    polys.emplace_back(faces);
  }
  out.corridor = geometry::makeCorridor(std::move(polys), spec.corridor.assignment);
  out.bc.start.col(0).head<3>() += delta;
  out.bc.end.col(0).head<3>() += delta;
  return out;
}

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("zero weights isolate the smoothness term") {
  problem::Spec spec = hopSpec(2);
  spec.penalty.w_v = spec.penalty.w_a = spec.penalty.w_omega = spec.penalty.w_c = 0.0;
  spec.k_rho = 0.0;
  problem::Objective objective(spec);
  VectorXd grad;
  problem::Diagnostics diag;
  const double value = objective.evaluate(objective.initialState(), grad, &diag);
  CHECK(value == diag.smoothness);
  CHECK(diag.time_cost == 0.0);
  CHECK(diag.penalty.total == 0.0);

  MatrixXd gc;
  VectorXd gt;
  const double J = spline::smoothnessCost(
      objective.trajectory(objective.initialState()), gc, gt);
  CHECK(value == doctest::Approx(J).epsilon(1e-12));
}

TEST_CASE("value decomposes into independently recomputed terms") {
  std::mt19937 rng(61);
  for (int rep = 0; rep < 3; ++rep) {
    problem::Spec spec = testsupport::randomBoxSpec(rng, 3 + rep % 2);
    problem::Objective objective(spec);
    const VectorXd x = testsupport::perturbedState(objective, rng);
    VectorXd grad;
    problem::Diagnostics diag;
    const double value = objective.evaluate(x, grad, &diag);
    const double sum = diag.smoothness + diag.time_cost + diag.penalty.total;
    CHECK(value == doctest::Approx(sum).epsilon(1e-12));

    const spline::Trajectory traj = objective.trajectory(x);
    MatrixXd gc;
    VectorXd gt;
    CHECK(diag.smoothness ==
          doctest::Approx(spline::smoothnessCost(traj, gc, gt)).epsilon(1e-12));
    CHECK(diag.time_cost == doctest::Approx(spec.k_rho * traj.duration())
                                .epsilon(1e-12));
    const penalty::Report rep2 = penalty::evaluate(
        traj, spec.corridor, spec.shape, spec.penalty, nullptr, nullptr);
    CHECK(diag.penalty.total == doctest::Approx(rep2.total).epsilon(1e-12));
  }
}

TEST_CASE("uniform translation leaves the objective unchanged") {
  std::mt19937 rng(62);
  auto [spec, x] = testsupport::randomProblem(rng, 4, 0);
  problem::Spec moved = shiftedSpec(spec, Vector3d(3.7, -2.1, 1.4));
  problem::Objective a(spec), b(moved);
  REQUIRE(a.dim() == b.dim());
  VectorXd ga, gb;
  const double fa = a.evaluate(x, ga);
  const double fb = b.evaluate(x, gb);
  CHECK(fa == doctest::Approx(fb).epsilon(1e-9));
  CHECK((ga - gb).cwiseAbs().maxCoeff() <=
        1e-9 * std::max(1.0, ga.cwiseAbs().maxCoeff()));
}

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937 rng(63);
  for (int rep = 0; rep < 5; ++rep) {
    auto [spec, x] = testsupport::randomProblem(rng, rep % 2 ? 3 : 4, rep);
    problem::Objective objective(spec);
    VectorXd grad;
    objective.evaluate(x, grad);
    auto f = [&](const VectorXd& xv) {
      VectorXd g;
      return objective.evaluate(xv, g);
    };
    const VectorXd fd = testsupport::fdGradient(f, x, 1e-6);
    CAPTURE(rep);
    CHECK(testsupport::gradMaxError(grad, fd) <= 1e-5);
  }
}

TEST_CASE("waypoints stay inside their containers by construction") {
  std::mt19937 rng(64);
  problem::Spec spec = testsupport::randomBoxSpec(rng, 4);
  problem::Objective objective(spec);
  const VectorXd x = testsupport::perturbedState(objective, rng, 0.5);
  const spline::Trajectory traj = objective.trajectory(x);
  const VectorXd& knots = traj.knots();
  for (size_t j = 0; j < objective.containers().vertices.size(); ++j) {
    const Vector3d p = traj.position(knots(j + 1));
    const auto& verts = objective.containers().vertices[j];
    // Inside the convex hull of the container vertices: within every
    // polyhedron that contributed vertices.
    bool inside_any = false;
    for (const auto& poly : spec.corridor.polyhedra) {
      if (poly.maxSlack(p) <= 1e-9) inside_any = true;
    }
    CHECK(inside_any);
    CHECK(verts.cols() >= 4);
  }
}

TEST_CASE("boundary conditions survive the full pipeline") {
  std::mt19937 rng(65);
  problem::Spec spec = testsupport::randomBoxSpec(rng, 4);
  problem::Objective objective(spec);
  const VectorXd x = testsupport::perturbedState(objective, rng, 0.3);
  const spline::Trajectory traj = objective.trajectory(x);
  for (int j = 0; j < spec.s; ++j) {
    CHECK((traj.derivative(0.0, j) - spec.bc.start.col(j)).norm() <= 1e-8);
    CHECK((traj.derivative(traj.duration(), j) - spec.bc.end.col(j)).norm() <=
          1e-8);
  }
}

TEST_CASE("free-space hop converges to the unconstrained interpolant") {
  problem::Spec spec = hopSpec(2);
  solver::Config cfg;
  const problem::OptimizeResult res = problem::optimize(spec, cfg);
  CHECK(res.solve.status == solver::Status::Converged);
  CHECK(res.diagnostics.penalty.total == 0.0);

  // With the interior waypoint free, the optimum matches the single-piece
  // interpolant over the same total duration to within 1%.
  spline::MincoSpline single(spec.s, 1, spec.bc);
  VectorXd T_total(1);
  T_total << res.trajectory.duration();
  MatrixXd gc;
  VectorXd gt;
  const double J_single =
      spline::smoothnessCost(single.solve(MatrixXd(6, 0), T_total), gc, gt);
  CHECK(res.diagnostics.smoothness ==
        doctest::Approx(J_single).epsilon(1e-2));
}

TEST_CASE("restarting from the optimum terminates immediately") {
  problem::Spec spec = hopSpec(2);
  solver::Config cfg;
  const problem::OptimizeResult first = problem::optimize(spec, cfg);
  REQUIRE(first.solve.status == solver::Status::Converged);
  const problem::OptimizeResult second =
      problem::optimize(spec, cfg, first.solve.x);
  CHECK(second.solve.iterations <= 2);
  CHECK(second.solve.value <= first.solve.value + 1e-12);
}

TEST_CASE("optimization reduces the objective and reports wall time") {
  std::mt19937 rng(66);
  problem::Spec spec = testsupport::randomBoxSpec(rng, 4);
  solver::Config cfg;
  cfg.max_iterations = 120;
  const problem::OptimizeResult res = problem::optimize(spec, cfg);
  problem::Objective objective(spec);
  VectorXd g;
  const double f0 = objective.evaluate(objective.initialState(), g);
  CHECK(res.solve.value <= f0);
  CHECK(res.wall_time_s > 0.0);
  CHECK(res.trajectory.pieces() == spec.corridor.pieces());
  // Final trajectory corresponds to the returned state.
  const spline::Trajectory again = objective.trajectory(res.solve.x);
  CHECK((again.coefficients() - res.trajectory.coefficients())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

}  // TEST_SUITE("problem")
