#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "omnitraj/corridor_io.hpp"
#include "omnitraj/flatness.hpp"
#include "omnitraj/penalty.hpp"
#include "omnitraj/problem.hpp"
#include "omnitraj/solver.hpp"

namespace omnitraj::run {

struct Pose {
  Eigen::Vector3d position{0.0, 0.0, 0.0};
  Eigen::Vector4d quaternion{1.0, 0.0, 0.0, 0.0};  // (w, x, y, z)
};

struct RunConfig {
  int s = 4;
  int pieces_per_polyhedron = 2;
  double k_rho = 1.0;
  penalty::Config penalty;
  solver::Config solver;
  flatness::VehicleParams vehicle;
  Eigen::Vector3d shape_box{1.0, 1.0, 0.35};  // cuboid edge lengths
  Pose start, end;
  double sample_dt = 0.02;
  int oversample = 4;  // violation sweep density, in multiples of kappa
  unsigned seed = 0;
};

// JSON round-trip; unknown keys are rejected, absent keys keep defaults.
RunConfig loadRunConfig(const std::string& path);
void saveRunConfig(const std::string& path, const RunConfig& config);

// Chart value of a (w, x, y, z) quaternion, lifted to the w <= 0 hemisphere.
Eigen::Vector3d sigmaFromQuaternion(const Eigen::Vector4d& q);

problem::Spec buildSpec(const RunConfig& config,
                        const geometry::Corridor& corridor);

// Writes trajectory.json, profile.csv, violations.json, summary.json, and
// profile.svg into `out_dir` (created if missing).
void writeArtifacts(const std::string& out_dir, const RunConfig& config,
                    const geometry::Corridor& corridor,
                    const problem::OptimizeResult& result);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 corridor invalid, 3 solver failure
  std::string message;
  bool has_result = false;
  problem::OptimizeResult result;
};

RunOutcome runCommand(const RunConfig& config, const std::string& corridor_path,
                      const std::string& out_dir);

struct BenchPoint {
  int pieces = 0;
  double median_s = 0.0;
  double per_piece_ms = 0.0;
};

struct BenchResult {
  std::vector<BenchPoint> points;
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

// Optimization wall time versus piece count on straight-corridor scenarios,
// with a fixed iteration budget so every size does the same number of passes.
BenchResult benchScaling(const RunConfig& base,
                         const std::vector<int>& piece_counts, int repeats,
                         int iterations);

}  // namespace omnitraj::run
