#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "omnitraj/geometry.hpp"

namespace omnitraj::io {

// On-disk corridor description: a list of halfspace stacks (rows are
// [nx, ny, nz, d] with n.x <= d) plus an optional piece-to-polyhedron map.
struct CorridorFile {
  std::vector<Eigen::MatrixX4d> polyhedra;
  std::vector<int> assignment;  // empty means "use the builder default"
};

CorridorFile loadCorridorFile(const std::string& path);
void saveCorridorFile(const std::string& path, const CorridorFile& file);

// Instantiates the corridor, substituting `pieces_per_polyhedron` consecutive
// pieces per polyhedron when the file does not carry an explicit assignment.
geometry::Corridor buildCorridor(const CorridorFile& file,
                                 int pieces_per_polyhedron);

}  // namespace omnitraj::io
