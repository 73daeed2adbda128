#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace omnitraj::geometry {

// Thrown when a half-space set admits a recession direction (no bounded hull).
struct UnboundedPolyhedron : std::runtime_error {
  explicit UnboundedPolyhedron(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a half-space set has no strictly interior point.
struct EmptyInterior : std::runtime_error {
  explicit EmptyInterior(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a face normal has (near-)zero length.
struct DegenerateNormal : std::runtime_error {
  explicit DegenerateNormal(const std::string& msg) : std::runtime_error(msg) {}
};

// Largest inscribed ball of {x : n_k.x <= d_k}; rows of `faces` are (n, d)
// with unit n.  Returns {center, radius}; radius <= 0 means empty interior.
std::pair<Eigen::Vector3d, double> chebyshevCenter(const Eigen::MatrixX4d& faces);

// Compact convex polyhedron in half-space form with enumerated vertices.
//
// Faces are stored as rows (n, d) meaning n.x <= d with |n| = 1.  Vertices are
// recovered on construction through the dual transform about the Chebyshev
// center: the dual points n_k / (d_k - n_k.c) are hulled, and each hull facet
// maps back to a primal vertex, which is then polished against its active
// faces.  Intended for corridor-scale inputs (up to ~128 faces).
class Polyhedron {
 public:
  // `halfspaces` rows are (n, d); normals need not be unit length.
  explicit Polyhedron(const Eigen::MatrixX4d& halfspaces);

  int numFaces() const { return static_cast<int>(faces_.rows()); }
  int numVertices() const { return static_cast<int>(vertices_.cols()); }
  const Eigen::MatrixX4d& faces() const { return faces_; }
  const Eigen::Matrix3Xd& vertices() const { return vertices_; }
  const Eigen::Vector3d& interiorPoint() const { return center_; }
  double inradius() const { return radius_; }

  // max_k (n_k.p - d_k); negative strictly inside, positive outside.
  double maxSlack(const Eigen::Vector3d& p) const;
  bool contains(const Eigen::Vector3d& p, double tol = 0.0) const;

  // Half-space union (set intersection) of two polyhedra.
  static Polyhedron intersect(const Polyhedron& a, const Polyhedron& b);

 private:
  Eigen::MatrixX4d faces_;
  Eigen::Matrix3Xd vertices_;
  Eigen::Vector3d center_;
  double radius_ = 0.0;
};

// Convex body of the vehicle, stored as body-frame hull vertices.
class VehicleShape {
 public:
  explicit VehicleShape(const Eigen::Matrix3Xd& vertices);
  // Axis-aligned box of extents (lx, ly, lz) centered on the body origin.
  static VehicleShape cuboid(double lx, double ly, double lz);

  int numVertices() const { return static_cast<int>(vertices_.cols()); }
  const Eigen::Matrix3Xd& vertices() const { return vertices_; }
  double circumradius() const { return circumradius_; }

  Eigen::Vector3d worldVertex(const Eigen::Vector3d& p, const Eigen::Matrix3d& R,
                              int l) const {
    return p + R * vertices_.col(l);
  }
  Eigen::Matrix3Xd worldVertices(const Eigen::Vector3d& p,
                                 const Eigen::Matrix3d& R) const;

 private:
  Eigen::Matrix3Xd vertices_;
  double circumradius_ = 0.0;
};

// Safe flight corridor: an ordered chain of polyhedra plus the map from
// trajectory piece index to polyhedron index.
struct Corridor {
  std::vector<Polyhedron> polyhedra;
  std::vector<int> assignment;  // size = pieces; nondecreasing, consecutive

  int pieces() const { return static_cast<int>(assignment.size()); }
};

// Validates assignment shape (throws std::invalid_argument on malformed input).
Corridor makeCorridor(std::vector<Polyhedron> polyhedra, std::vector<int> assignment);

struct CorridorReport {
  struct PairCheck {
    int first = 0, second = 0;  // adjacent polyhedron indices
    double inradius = 0.0;      // of the intersection
    bool ok = false;
  };
  std::vector<PairCheck> pairs;
  std::vector<std::string> issues;  // assignment problems
  bool ok = false;
};

// Checks that consecutive polyhedra overlap with strictly interior
// intersections (inradius >= eps) and that the assignment is well formed.
CorridorReport validateCorridor(const Corridor& corridor, double eps = 1e-6);

}  // namespace omnitraj::geometry
