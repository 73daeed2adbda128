#pragma once

#include <Eigen/Dense>

#include <map>
#include <utility>
#include <vector>

namespace omnitraj::detail {

struct HullFacet {
  int a = 0, b = 0, c = 0;   // vertex indices into the input set
  Eigen::Vector3d n;         // outward unit normal
  double off = 0.0;          // plane n.x = off
};

// Incremental convex hull of 3-D points (triangulated facets, outward
// normals).  Quadratic-time visibility scan; intended for small point sets
// (dual points of corridor polyhedra).  Returns an empty vector when the
// points are degenerate (affine rank < 3), which callers treat as an
// unbounded primal polyhedron.
inline std::vector<HullFacet> convexHull3(const Eigen::Matrix3Xd& pts) {
  const int n = static_cast<int>(pts.cols());
  if (n < 4) return {};
  const double scale = pts.cwiseAbs().maxCoeff();
  const double eps = 1e-10 * std::max(1.0, scale);

  // Initial tetrahedron from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (pts(0, i) < pts(0, i0)) i0 = i;
  int i1 = -1;
  double best = eps;
  for (int i = 0; i < n; ++i) {
    const double d = (pts.col(i) - pts.col(i0)).norm();
    if (d > best) { best = d; i1 = i; }
  }
  if (i1 < 0) return {};
  int i2 = -1;
  best = eps * (pts.col(i1) - pts.col(i0)).norm();
  for (int i = 0; i < n; ++i) {
    const double d =
        (pts.col(i1) - pts.col(i0)).cross(pts.col(i) - pts.col(i0)).norm();
    if (d > best) { best = d; i2 = i; }
  }
  if (i2 < 0) return {};
  const Eigen::Vector3d n0 =
      (pts.col(i1) - pts.col(i0)).cross(pts.col(i2) - pts.col(i0)).normalized();
  int i3 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(n0.dot(pts.col(i) - pts.col(i0)));
    if (d > best) { best = d; i3 = i; }
  }
  if (i3 < 0) return {};

  const Eigen::Vector3d centroid =
      0.25 * (pts.col(i0) + pts.col(i1) + pts.col(i2) + pts.col(i3));
  std::vector<HullFacet> faces;
  auto addFace = [&](int a, int b, int c) {
    HullFacet f;
    Eigen::Vector3d nn = (pts.col(b) - pts.col(a)).cross(pts.col(c) - pts.col(a));
    const double len = nn.norm();
    if (len <= 1e-14 * std::max(1.0, scale * scale)) return;  // sliver
    nn /= len;
    double off = nn.dot(pts.col(a));
    if (nn.dot(centroid) > off) {  // orient away from the interior point
      nn = -nn;
      off = -off;
      std::swap(b, c);
    }
    faces.push_back({a, b, c, nn, off});
  };
  addFace(i0, i1, i2);
  addFace(i0, i1, i3);
  addFace(i0, i2, i3);
  addFace(i1, i2, i3);

  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<HullFacet> visible, hidden;
    for (const auto& f : faces) {
      if (f.n.dot(pts.col(p)) - f.off > eps)
        visible.push_back(f);
      else
        hidden.push_back(f);
    }
    if (visible.empty()) continue;
    // Horizon: edges of visible faces not shared by two visible faces.
    std::map<std::pair<int, int>, int> edge_count;
    auto key = [](int u, int v) {
      return std::pair<int, int>(std::min(u, v), std::max(u, v));
    };
    for (const auto& f : visible) {
      ++edge_count[key(f.a, f.b)];
      ++edge_count[key(f.b, f.c)];
      ++edge_count[key(f.c, f.a)];
    }
    faces.swap(hidden);
    for (const auto& [edge, count] : edge_count) {
      if (count != 1) continue;
      addFace(edge.first, edge.second, p);
    }
  }
  return faces;
}

}  // namespace omnitraj::detail
