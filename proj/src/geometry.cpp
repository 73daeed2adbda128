#include "omnitraj/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "omnitraj/detail/hull3d.hpp"
#include "omnitraj/detail/simplex.hpp"

namespace omnitraj::geometry {

namespace {

// Map back one dual-hull facet plane to a primal vertex and polish it onto
// its active faces (least squares over the near-active set).
Eigen::Vector3d polishVertex(const Eigen::MatrixX4d& faces, const Eigen::Vector3d& y) {
  std::vector<int> active;
  const double tol = 1e-6 * (1.0 + y.norm());
  for (int k = 0; k < faces.rows(); ++k) {
    const double slack = faces.row(k).head<3>().dot(y) - faces(k, 3);
    if (std::abs(slack) < tol) active.push_back(k);
  }
  if (active.size() < 3) return y;
  Eigen::MatrixXd N(active.size(), 3);
  Eigen::VectorXd d(active.size());
  for (size_t i = 0; i < active.size(); ++i) {
    N.row(i) = faces.row(active[i]).head<3>();
    d(i) = faces(active[i], 3);
  }
  return N.colPivHouseholderQr().solve(d);
}

}  // namespace

std::pair<Eigen::Vector3d, double> chebyshevCenter(const Eigen::MatrixX4d& faces) {
  const int K = static_cast<int>(faces.rows());
  // Variables: split positive parts of x (3+3) and of the radius (1+1); the
  // radius is capped so the program stays bounded on cone-like inputs.
  Eigen::MatrixXd A(K + 1, 8);
  Eigen::VectorXd b(K + 1);
  for (int k = 0; k < K; ++k) {
    const Eigen::Vector3d n = faces.row(k).head<3>();
    A.row(k) << n.transpose(), -n.transpose(), 1.0, -1.0;
    b(k) = faces(k, 3);
  }
  A.row(K).setZero();
  A(K, 6) = 1.0;
  A(K, 7) = -1.0;
  b(K) = 1e6;

  Eigen::VectorXd c = Eigen::VectorXd::Zero(8);
  c(6) = 1.0;
  c(7) = -1.0;
  Eigen::VectorXd x;
  const auto outcome = detail::Simplex::solve(A, b, c, x);
  if (outcome != detail::Simplex::Outcome::Optimal)
    throw std::runtime_error("chebyshevCenter: LP did not reach an optimum");
  const Eigen::Vector3d center = x.head<3>() - x.segment<3>(3);
  const double radius = x(6) - x(7);
  return {center, radius};
}

Polyhedron::Polyhedron(const Eigen::MatrixX4d& halfspaces) {
  const int K = static_cast<int>(halfspaces.rows());
  if (K < 4)
    throw UnboundedPolyhedron("polyhedron: fewer than 4 faces cannot bound a volume");
  faces_.resize(K, 4);
  for (int k = 0; k < K; ++k) {
    const double len = halfspaces.row(k).head<3>().norm();
    if (len < 1e-12)
      throw DegenerateNormal("polyhedron: face " + std::to_string(k) +
                             " has near-zero normal");
    faces_.row(k) = halfspaces.row(k) / len;
  }

  std::tie(center_, radius_) = chebyshevCenter(faces_);
  if (radius_ < 1e-9)
    throw EmptyInterior("polyhedron: no strictly interior point (inradius " +
                        std::to_string(radius_) + ")");

  // Dual transform about the interior point: primal faces become points,
  // primal vertices become dual-hull facets.
  Eigen::Matrix3Xd duals(3, K);
  std::vector<int> unique_cols;
  for (int k = 0; k < K; ++k) {
    const Eigen::Vector3d n = faces_.row(k).head<3>();
    const Eigen::Vector3d p = n / (faces_(k, 3) - n.dot(center_));
    bool fresh = true;
    for (int j : unique_cols)
      if ((duals.col(j) - p).norm() < 1e-12 * (1.0 + p.norm())) { fresh = false; break; }
    duals.col(k) = p;
    if (fresh) unique_cols.push_back(k);
  }
  Eigen::Matrix3Xd pts(3, unique_cols.size());
  for (size_t i = 0; i < unique_cols.size(); ++i) pts.col(i) = duals.col(unique_cols[i]);

  const auto hull = detail::convexHull3(pts);
  if (hull.empty())
    throw UnboundedPolyhedron("polyhedron: dual points are degenerate (recession direction)");

  std::vector<Eigen::Vector3d> verts;
  for (const auto& f : hull) {
    if (f.off <= 1e-7)
      throw UnboundedPolyhedron("polyhedron: dual hull does not enclose the origin");
    Eigen::Vector3d y = center_ + f.n / f.off;
    y = polishVertex(faces_, y);
    if (maxSlack(y) > 1e-6 * (1.0 + y.norm())) continue;  // hull noise
    bool fresh = true;
    for (const auto& v : verts)
      if ((v - y).norm() < 1e-9) { fresh = false; break; }
    if (fresh) verts.push_back(y);
  }
  // Canonical order: lexicographic on coordinates quantized relative to the
  // interior point.  Exact comparisons would let ulp-level noise from the
  // vertex polish decide between vertices that share a coordinate, making the
  // order (and everything keyed on it) unstable under rigid motions of the
  // input half-spaces.
  const double quantum = 1e-7 * (1.0 + radius_);
  const Eigen::Vector3d ref = center_;
  auto key = [&](const Eigen::Vector3d& v) {
    return std::array<long long, 3>{std::llround((v.x() - ref.x()) / quantum),
                                    std::llround((v.y() - ref.y()) / quantum),
                                    std::llround((v.z() - ref.z()) / quantum)};
  };
  std::sort(verts.begin(), verts.end(), [&](const auto& a, const auto& b) {
    const auto ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
  });
  vertices_.resize(3, verts.size());
  for (size_t i = 0; i < verts.size(); ++i) vertices_.col(i) = verts[i];
}

double Polyhedron::maxSlack(const Eigen::Vector3d& p) const {
  return (faces_.leftCols<3>() * p - faces_.col(3)).maxCoeff();
}

bool Polyhedron::contains(const Eigen::Vector3d& p, double tol) const {
  return maxSlack(p) <= tol;
}

Polyhedron Polyhedron::intersect(const Polyhedron& a, const Polyhedron& b) {
  Eigen::MatrixX4d stacked(a.numFaces() + b.numFaces(), 4);
  stacked << a.faces(), b.faces();
  return Polyhedron(stacked);
}

VehicleShape::VehicleShape(const Eigen::Matrix3Xd& vertices) : vertices_(vertices) {
  if (vertices_.cols() < 1)
    throw std::invalid_argument("vehicle shape: needs at least one vertex");
  circumradius_ = vertices_.colwise().norm().maxCoeff();
}

VehicleShape VehicleShape::cuboid(double lx, double ly, double lz) {
  Eigen::Matrix3Xd v(3, 8);
  int c = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        v.col(c++) = Eigen::Vector3d(0.5 * sx * lx, 0.5 * sy * ly, 0.5 * sz * lz);
  return VehicleShape(v);
}

Eigen::Matrix3Xd VehicleShape::worldVertices(const Eigen::Vector3d& p,
                                             const Eigen::Matrix3d& R) const {
  return (R * vertices_).colwise() + p;
}

namespace {

std::vector<std::string> assignmentIssues(int num_polyhedra,
                                          const std::vector<int>& assignment) {
  std::vector<std::string> issues;
  if (assignment.empty()) {
    issues.push_back("assignment is empty");
    return issues;
  }
  if (assignment.front() != 0) issues.push_back("assignment does not start at polyhedron 0");
  if (assignment.back() != num_polyhedra - 1)
    issues.push_back("assignment does not end at the last polyhedron");
  for (size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] < 0 || assignment[i] >= num_polyhedra) {
      issues.push_back("assignment entry " + std::to_string(i) + " out of range");
      return issues;
    }
    if (i > 0 && assignment[i] < assignment[i - 1])
      issues.push_back("assignment decreases at piece " + std::to_string(i));
    if (i > 0 && assignment[i] > assignment[i - 1] + 1)
      issues.push_back("assignment skips a polyhedron at piece " + std::to_string(i));
  }
  return issues;
}

}  // namespace

Corridor makeCorridor(std::vector<Polyhedron> polyhedra, std::vector<int> assignment) {
  if (polyhedra.empty()) throw std::invalid_argument("corridor: no polyhedra");
  const auto issues = assignmentIssues(static_cast<int>(polyhedra.size()), assignment);
  if (!issues.empty()) throw std::invalid_argument("corridor: " + issues.front());
  return Corridor{std::move(polyhedra), std::move(assignment)};
}

CorridorReport validateCorridor(const Corridor& corridor, double eps) {
  CorridorReport report;
  report.issues =
      assignmentIssues(static_cast<int>(corridor.polyhedra.size()), corridor.assignment);
  const int Mp = static_cast<int>(corridor.polyhedra.size());
  for (int i = 0; i + 1 < Mp; ++i) {
    const auto& a = corridor.polyhedra[i];
    const auto& b = corridor.polyhedra[i + 1];
    Eigen::MatrixX4d stacked(a.numFaces() + b.numFaces(), 4);
    stacked << a.faces(), b.faces();
    const auto [center, radius] = chebyshevCenter(stacked);
    (void)center;
    report.pairs.push_back({i, i + 1, radius, radius >= eps});
  }
  report.ok = report.issues.empty() &&
              std::all_of(report.pairs.begin(), report.pairs.end(),
                          [](const auto& p) { return p.ok; });
  return report;
}

}  // namespace omnitraj::geometry
