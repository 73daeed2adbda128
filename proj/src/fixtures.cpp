#include "omnitraj/fixtures.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace omnitraj::fixtures {

Eigen::MatrixX4d axisBox(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  if ((hi - lo).minCoeff() <= 0.0) {
    throw std::invalid_argument("box extents must be positive");
  }
  Eigen::MatrixX4d faces(6, 4);
  faces.setZero();
  for (int a = 0; a < 3; ++a) {
    faces(2 * a, a) = 1.0;
    faces(2 * a, 3) = hi[a];
    faces(2 * a + 1, a) = -1.0;
    faces(2 * a + 1, 3) = -lo[a];
  }
  return faces;
}

namespace {

Eigen::Vector4d rollQuaternion(double angle_rad) {
  return {std::cos(angle_rad / 2.0), std::sin(angle_rad / 2.0), 0.0, 0.0};
}

Fixture makeSlot(double gap) {
  if (gap <= 0.0 || gap >= 2.0) {
    throw std::invalid_argument("slot gap must lie in (0, 2)");
  }
  Fixture fx;
  fx.corridor.polyhedra.push_back(
      axisBox({-0.5, -1.5, 0.0}, {2.9, 1.5, 2.0}));
  fx.corridor.polyhedra.push_back(
      axisBox({1.6, -gap / 2.0, 0.0}, {3.4, gap / 2.0, 2.0}));
  fx.corridor.polyhedra.push_back(
      axisBox({2.1, -1.5, 0.0}, {5.5, 1.5, 2.0}));
  fx.start_position = {0.3, 0.0, 1.0};
  fx.end_position = {4.7, 0.0, 1.0};
  // Boundary poses already rolled part-way toward the slit so the descent
  // direction out of the start is not blocked by the wide-room walls.
  fx.start_quaternion = rollQuaternion(M_PI / 4.0);
  fx.end_quaternion = rollQuaternion(M_PI / 4.0);
  return fx;
}

Fixture makeStraight(int boxes, double lateral_jitter, unsigned seed) {
  if (boxes < 2) throw std::invalid_argument("need at least two boxes");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);

  Fixture fx;
  double first_yc = 0.0;
  double last_yc = 0.0;
  for (int i = 0; i < boxes; ++i) {
    double yc = 0.0;
    if (lateral_jitter > 0.0) {
      yc = (i % 2 == 0 ? -lateral_jitter : lateral_jitter) + jitter(rng);
    }
    double xc = 0.8 * i;
    fx.corridor.polyhedra.push_back(
        axisBox({xc - 1.0, yc - 1.0, 0.0}, {xc + 1.0, yc + 1.0, 2.0}));
    if (i == 0) first_yc = yc;
    if (i == boxes - 1) last_yc = yc;
  }
  // Keep a 0.1 m margin between the body (half extent 0.5) and the end walls.
  fx.start_position = {-0.4, first_yc, 1.0};
  fx.end_position = {0.8 * (boxes - 1) + 0.4, last_yc, 1.0};
  return fx;
}

}  // namespace

Fixture makeFixture(const std::string& kind, int boxes, double gap,
                    unsigned seed) {
  if (kind == "slot") return makeSlot(gap);
  if (kind == "straight") return makeStraight(boxes, 0.0, seed);
  if (kind == "zigzag") return makeStraight(boxes, 0.4, seed);
  throw std::invalid_argument("unknown fixture kind: " + kind);
}

}  // namespace omnitraj::fixtures
