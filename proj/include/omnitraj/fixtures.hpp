#pragma once

#include <string>

#include <Eigen/Dense>

#include "omnitraj/corridor_io.hpp"

namespace omnitraj::fixtures {

struct Fixture {
  io::CorridorFile corridor;
  Eigen::Vector3d start_position;
  Eigen::Vector3d end_position;
  Eigen::Vector4d start_quaternion{1.0, 0.0, 0.0, 0.0};  // (w, x, y, z)
  Eigen::Vector4d end_quaternion{1.0, 0.0, 0.0, 0.0};
};

// Axis-aligned box [lo, hi] as six outward halfspaces.
Eigen::MatrixX4d axisBox(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);

// Builds one of the bundled scenarios:
//   "slot"     - two wide rooms joined by a narrow vertical slit of width
//                `gap`; forces a large roll to squeeze through. `boxes`
//                is ignored.
//   "straight" - `boxes` overlapping boxes along +x, level attitude.
//   "zigzag"   - like "straight" with seeded alternating lateral offsets.
Fixture makeFixture(const std::string& kind, int boxes, double gap,
                    unsigned seed);

}  // namespace omnitraj::fixtures
