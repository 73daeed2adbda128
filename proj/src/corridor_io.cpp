#include "omnitraj/corridor_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace omnitraj::io {

using nlohmann::json;

CorridorFile loadCorridorFile(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw std::runtime_error("cannot open corridor file: " + path);
  json doc;
  try {
    stream >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("corridor file parse error: " +
                             std::string(e.what()));
  }

  if (!doc.contains("polyhedra") || !doc["polyhedra"].is_array() ||
      doc["polyhedra"].empty()) {
    throw std::runtime_error(
        "corridor file must contain a non-empty 'polyhedra' array");
  }

  CorridorFile file;
  for (const json& poly : doc["polyhedra"]) {
    if (!poly.is_array() || poly.empty()) {
      throw std::runtime_error("each polyhedron must be a non-empty array");
    }
    Eigen::MatrixX4d faces(static_cast<Eigen::Index>(poly.size()), 4);
    Eigen::Index r = 0;
    for (const json& row : poly) {
      if (!row.is_array() || row.size() != 4) {
        throw std::runtime_error(
            "each halfspace must be an array [nx, ny, nz, d]");
      }
      for (int c = 0; c < 4; ++c) faces(r, c) = row[c].get<double>();
      ++r;
    }
    file.polyhedra.push_back(std::move(faces));
  }

  if (doc.contains("assignment")) {
    if (!doc["assignment"].is_array()) {
      throw std::runtime_error("'assignment' must be an array of indices");
    }
    for (const json& v : doc["assignment"]) {
      file.assignment.push_back(v.get<int>());
    }
  }
  return file;
}

void saveCorridorFile(const std::string& path, const CorridorFile& file) {
  json doc;
  doc["polyhedra"] = json::array();
  for (const Eigen::MatrixX4d& faces : file.polyhedra) {
    json poly = json::array();
    for (Eigen::Index r = 0; r < faces.rows(); ++r) {
      poly.push_back({faces(r, 0), faces(r, 1), faces(r, 2), faces(r, 3)});
    }
    doc["polyhedra"].push_back(std::move(poly));
  }
  if (!file.assignment.empty()) doc["assignment"] = file.assignment;

  std::ofstream stream(path);
  if (!stream) throw std::runtime_error("cannot write corridor file: " + path);
  stream << doc.dump(2) << "\n";
}

geometry::Corridor buildCorridor(const CorridorFile& file,
                                 int pieces_per_polyhedron) {
  std::vector<int> assignment = file.assignment;
  if (assignment.empty()) {
    if (pieces_per_polyhedron < 1) {
      throw std::invalid_argument("pieces per polyhedron must be >= 1");
    }
    for (size_t i = 0; i < file.polyhedra.size(); ++i) {
      for (int k = 0; k < pieces_per_polyhedron; ++k) {
        assignment.push_back(static_cast<int>(i));
      }
    }
  }
  std::vector<geometry::Polyhedron> polyhedra;
  polyhedra.reserve(file.polyhedra.size());
  for (const Eigen::MatrixX4d& faces : file.polyhedra) {
    polyhedra.emplace_back(faces);
  }
  return geometry::makeCorridor(std::move(polyhedra), std::move(assignment));
}

}  // namespace omnitraj::io
