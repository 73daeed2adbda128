#pragma once

#include <Eigen/Dense>

#include <vector>

#include "omnitraj/geometry.hpp"
#include "omnitraj/spline.hpp"

namespace omnitraj::elimination {

// Vertex sets of the polytopes that must contain each interior waypoint: the
// assigned polyhedron, or the intersection of the two assigned polyhedra when
// the waypoint sits on a corridor transition.
struct Containers {
  std::vector<Eigen::Matrix3Xd> vertices;  // one block per interior waypoint
};

Containers buildContainers(const geometry::Corridor& corridor);

// Flat layout of the unconstrained decision vector
//   [ xi_0 .. xi_{M-2} | q_sigma (3 (M-1)) | tau (M) ].
struct Layout {
  std::vector<int> xi_offset, xi_dim;
  int q_offset = 0, tau_offset = 0, dim = 0;

  static Layout build(const Containers& containers, int pieces);
  Eigen::VectorBlock<const Eigen::VectorXd> xi(const Eigen::VectorXd& x, int j) const {
    return x.segment(xi_offset[j], xi_dim[j]);
  }
  Eigen::Vector3d qSigma(const Eigen::VectorXd& x, int j) const {
    return x.segment<3>(q_offset + 3 * j);
  }
  Eigen::VectorBlock<const Eigen::VectorXd> tau(const Eigen::VectorXd& x) const {
    return x.segment(tau_offset, static_cast<int>(xi_offset.size()) + 1);
  }
};

// T_i = exp(tau_i), with tau clamped to [-30, 30]; returns the number of
// clamped entries.
int forwardT(const Eigen::VectorXd& tau, Eigen::VectorXd& T);
// Pullback of dL/dT through the exponential: dL/dtau = dL/dT .* T.
Eigen::VectorXd pullbackT(const Eigen::VectorXd& T, const Eigen::VectorXd& grad_T);

// Normalized-square barycentric map onto the convex hull of `verts`:
//   w_i = (1 + xi_i^2) / sum_k (1 + xi_k^2),  q = sum_i w_i v_i.
Eigen::Vector3d forwardQ(const Eigen::VectorXd& xi, const Eigen::Matrix3Xd& verts);
// Pullback of dL/dq:  dL/dxi_i = (2 xi_i / S) (v_i - q) . dL/dq.
Eigen::VectorXd pullbackQ(const Eigen::VectorXd& xi, const Eigen::Matrix3Xd& verts,
                          const Eigen::Vector3d& q, const Eigen::Vector3d& grad_q);

// Initial decision vector: xi = 0 (vertex centroids), attitude waypoints
// linearly interpolated between the boundary sigma values, and durations from
// the centroid polyline at v_max (floored at 0.1 s).
Eigen::VectorXd initialize(const Containers& containers,
                           const spline::BoundaryCondition& bc, double v_max,
                           const Layout& layout);

}  // namespace omnitraj::elimination
