#include "omnitraj/elimination.hpp"

#include <cmath>

namespace omnitraj::elimination {

Containers buildContainers(const geometry::Corridor& corridor) {
  Containers out;
  const int M = corridor.pieces();
  out.vertices.reserve(M - 1);
  for (int j = 0; j + 1 < M; ++j) {
    const int a = corridor.assignment[j];
    const int b = corridor.assignment[j + 1];
    if (a == b) {
      out.vertices.push_back(corridor.polyhedra[a].vertices());
    } else {
      const auto inter =
          geometry::Polyhedron::intersect(corridor.polyhedra[a], corridor.polyhedra[b]);
      out.vertices.push_back(inter.vertices());
    }
  }
  return out;
}

Layout Layout::build(const Containers& containers, int pieces) {
  Layout l;
  int off = 0;
  for (const auto& v : containers.vertices) {
    l.xi_offset.push_back(off);
    l.xi_dim.push_back(static_cast<int>(v.cols()));
    off += static_cast<int>(v.cols());
  }
  l.q_offset = off;
  l.tau_offset = off + 3 * (pieces - 1);
  l.dim = l.tau_offset + pieces;
  return l;
}

int forwardT(const Eigen::VectorXd& tau, Eigen::VectorXd& T) {
  const int M = static_cast<int>(tau.size());
  T.resize(M);
  int clamped = 0;
  for (int i = 0; i < M; ++i) {
    double t = tau(i);
    if (t < -30.0 || t > 30.0) {
      t = std::clamp(t, -30.0, 30.0);
      ++clamped;
    }
    T(i) = std::exp(t);
  }
  return clamped;
}

Eigen::VectorXd pullbackT(const Eigen::VectorXd& T, const Eigen::VectorXd& grad_T) {
  return grad_T.cwiseProduct(T);
}

Eigen::Vector3d forwardQ(const Eigen::VectorXd& xi, const Eigen::Matrix3Xd& verts) {
  const int L = static_cast<int>(verts.cols());
  double S = 0.0;
  Eigen::Vector3d q = Eigen::Vector3d::Zero();
  for (int i = 0; i < L; ++i) {
    const double w = 1.0 + xi(i) * xi(i);
    S += w;
    q += w * verts.col(i);
  }
  return q / S;
}

Eigen::VectorXd pullbackQ(const Eigen::VectorXd& xi, const Eigen::Matrix3Xd& verts,
                          const Eigen::Vector3d& q, const Eigen::Vector3d& grad_q) {
  const int L = static_cast<int>(verts.cols());
  double S = 0.0;
  for (int i = 0; i < L; ++i) S += 1.0 + xi(i) * xi(i);
  Eigen::VectorXd g(L);
  for (int i = 0; i < L; ++i)
    g(i) = (2.0 * xi(i) / S) * (verts.col(i) - q).dot(grad_q);
  return g;
}

Eigen::VectorXd initialize(const Containers& containers,
                           const spline::BoundaryCondition& bc, double v_max,
                           const Layout& layout) {
  const int M = static_cast<int>(containers.vertices.size()) + 1;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.dim);

  // xi = 0 puts every waypoint at its container's vertex centroid; collect the
  // resulting polyline to size the initial durations.
  std::vector<Eigen::Vector3d> line;
  line.push_back(bc.start.col(0).head<3>());
  for (const auto& v : containers.vertices) line.push_back(v.rowwise().mean());
  line.push_back(bc.end.col(0).head<3>());

  const Eigen::Vector3d sigma0 = bc.start.col(0).tail<3>();
  const Eigen::Vector3d sigma1 = bc.end.col(0).tail<3>();
  for (int j = 0; j + 1 < M; ++j) {
    const double a = static_cast<double>(j + 1) / M;
    x.segment<3>(layout.q_offset + 3 * j) = (1.0 - a) * sigma0 + a * sigma1;
  }
  for (int i = 0; i < M; ++i) {
    const double dist = (line[i + 1] - line[i]).norm();
    x(layout.tau_offset + i) = std::log(std::max(dist / v_max, 0.1));
  }
  return x;
}

}  // namespace omnitraj::elimination
