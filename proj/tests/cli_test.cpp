#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "omnitraj/attitude.hpp"
#include "omnitraj/corridor_io.hpp"
#include "omnitraj/geometry.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace omnitraj;

namespace {

fs::path freshDir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("omnitraj_cli_" + tag + "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int runCli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(OMNITRAJ_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream stream(path, std::ios::binary);
  std::ostringstream out;
  out << stream.rdbuf();
  return out.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fixture emits a valid corridor and config pair") {
  const fs::path dir = freshDir("fixture");
  const int code = runCli("fixture --kind straight --boxes 3 --out " +
                              (dir / "fx").string(),
                          dir / "log.txt");
  CHECK(code == 0);
  REQUIRE(fs::exists(dir / "fx" / "corridor.json"));
  REQUIRE(fs::exists(dir / "fx" / "config.json"));
  const io::CorridorFile file =
      io::loadCorridorFile((dir / "fx" / "corridor.json").string());
  CHECK(file.polyhedra.size() == 3);
  const geometry::Corridor corridor = io::buildCorridor(file, 2);
  CHECK(geometry::validateCorridor(corridor).ok);
}

TEST_CASE("fixtures are deterministic in the seed") {
  const fs::path dir = freshDir("seeded");
  CHECK(runCli("fixture --kind zigzag --boxes 4 --seed 9 --out " +
                   (dir / "a").string(),
               dir / "log_a.txt") == 0);
  CHECK(runCli("fixture --kind zigzag --boxes 4 --seed 9 --out " +
                   (dir / "b").string(),
               dir / "log_b.txt") == 0);
  CHECK(runCli("fixture --kind zigzag --boxes 4 --seed 10 --out " +
                   (dir / "c").string(),
               dir / "log_c.txt") == 0);
  CHECK(slurp(dir / "a" / "corridor.json") == slurp(dir / "b" / "corridor.json"));
  CHECK(slurp(dir / "a" / "config.json") == slurp(dir / "b" / "config.json"));
  CHECK(slurp(dir / "a" / "corridor.json") != slurp(dir / "c" / "corridor.json"));
}

TEST_CASE("slot fixture forces a roll through the slit") {
  const fs::path dir = freshDir("slot");
  REQUIRE(runCli("fixture --kind slot --out " + (dir / "fx").string(),
                 dir / "log.txt") == 0);
  const io::CorridorFile file =
      io::loadCorridorFile((dir / "fx" / "corridor.json").string());
  REQUIRE(file.polyhedra.size() == 3);
  const geometry::Polyhedron slit(file.polyhedra[1]);
  const geometry::VehicleShape shape = geometry::VehicleShape::cuboid(1, 1, 0.35);
  // Vertex centroid, not interiorPoint(): the Chebyshev center of a box is
  // non-unique along its long axes and the LP may return an extreme optimum.
  const Eigen::Vector3d center = slit.vertices().rowwise().mean();

  auto fits = [&](const Eigen::Matrix3d& R) {
    const Eigen::Matrix3Xd world = shape.worldVertices(center, R);
    for (int l = 0; l < world.cols(); ++l) {
      if (slit.maxSlack(world.col(l)) > 0.0) return false;
    }
    return true;
  };
  CHECK(!fits(Eigen::Matrix3d::Identity()));
  Eigen::Matrix3d roll90;  // 90 degrees about x
  roll90 << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(fits(roll90));
}

TEST_CASE("run writes artifacts and a clean violation report") {
  const fs::path dir = freshDir("run");
  REQUIRE(runCli("fixture --kind straight --boxes 2 --out " +
                     (dir / "fx").string(),
                 dir / "log.txt") == 0);
  const int code = runCli("run --config " + (dir / "fx" / "config.json").string() +
                              " --corridor " +
                              (dir / "fx" / "corridor.json").string() +
                              " --out " + (dir / "out").string(),
                          dir / "run_log.txt");
  CHECK(code == 0);
  for (const char* name : {"trajectory.json", "profile.csv", "violations.json",
                           "summary.json", "profile.svg"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / "out" / name));
  }

  const json violations = json::parse(slurp(dir / "out" / "violations.json"));
  CHECK(violations["ok"].get<bool>());
  CHECK(violations["max_penetration"].get<double>() <= 1e-3);

  const json summary = json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(summary["status"].get<std::string>() == "converged");
  CHECK(summary["iterations"].get<int>() > 0);
  CHECK(summary["objective"].get<double>() > 0.0);

  // The first profile row is the configured start state.
  const json config = json::parse(slurp(dir / "fx" / "config.json"));
  std::ifstream csv(dir / "out" / "profile.csv");
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  CHECK(header.rfind("t,px,py,pz,", 0) == 0);
  std::stringstream row(first);
  std::string cell;
  std::vector<double> values;
  while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
  REQUIRE(values.size() >= 4);
  CHECK(values[0] == 0.0);
  CHECK(values[1] ==
        doctest::Approx(config["start"]["position"][0].get<double>()));

  // The stored coefficients reproduce the sampled start position.
  const json traj = json::parse(slurp(dir / "out" / "trajectory.json"));
  CHECK(traj["pieces"].get<int>() == 4);  // 2 boxes x 2 pieces each
  const double c0 = traj["coefficients"][0][0][0].get<double>();
  CHECK(c0 == doctest::Approx(values[1]).epsilon(1e-12));
}

TEST_CASE("missing corridor file exits with code 1") {
  const fs::path dir = freshDir("missing");
  const int code = runCli("run --corridor " + (dir / "nope.json").string() +
                              " --out " + (dir / "out").string(),
                          dir / "log.txt");
  CHECK(code == 1);
}

TEST_CASE("disjoint corridors exit with code 2 and name the pair") {
  const fs::path dir = freshDir("disjoint");
  {
    std::ofstream out(dir / "corridor.json");
    out << R"({"polyhedra": [
      [[1,0,0,1],[-1,0,0,1],[0,1,0,1],[0,-1,0,1],[0,0,1,1],[0,0,-1,1]],
      [[1,0,0,9],[-1,0,0,-5],[0,1,0,1],[0,-1,0,1],[0,0,1,1],[0,0,-1,1]]
    ]})";
  }
  const int code = runCli("run --corridor " + (dir / "corridor.json").string() +
                              " --out " + (dir / "out").string(),
                          dir / "log.txt");
  CHECK(code == 2);
  const std::string log = slurp(dir / "log.txt");
  CHECK(log.find("0") != std::string::npos);
  CHECK(log.find("1") != std::string::npos);
  CHECK(log.find("overlap") != std::string::npos);
}

TEST_CASE("config errors exit with code 1") {
  const fs::path dir = freshDir("badcfg");
  REQUIRE(runCli("fixture --kind straight --boxes 2 --out " +
                     (dir / "fx").string(),
                 dir / "log.txt") == 0);
  {
    std::ofstream out(dir / "broken.json");
    out << "{ not json";
  }
  CHECK(runCli("run --config " + (dir / "broken.json").string() +
                   " --corridor " + (dir / "fx" / "corridor.json").string() +
                   " --out " + (dir / "out").string(),
               dir / "log1.txt") == 1);
  {
    std::ofstream out(dir / "unknown.json");
    out << R"({"no_such_option": 3})";
  }
  CHECK(runCli("run --config " + (dir / "unknown.json").string() +
                   " --corridor " + (dir / "fx" / "corridor.json").string() +
                   " --out " + (dir / "out").string(),
               dir / "log2.txt") == 1);
}

TEST_CASE("thread override does not change the artifacts") {
  const fs::path dir = freshDir("threads");
  REQUIRE(runCli("fixture --kind straight --boxes 2 --out " +
                     (dir / "fx").string(),
                 dir / "log.txt") == 0);
  const std::string base = " --config " + (dir / "fx" / "config.json").string() +
                           " --corridor " +
                           (dir / "fx" / "corridor.json").string();
  REQUIRE(runCli("run" + base + " --threads 1 --out " + (dir / "t1").string(),
                 dir / "log1.txt") == 0);
  REQUIRE(runCli("run" + base + " --threads 4 --out " + (dir / "t4").string(),
                 dir / "log4.txt") == 0);
  CHECK(slurp(dir / "t1" / "trajectory.json") ==
        slurp(dir / "t4" / "trajectory.json"));
  CHECK(slurp(dir / "t1" / "profile.csv") == slurp(dir / "t4" / "profile.csv"));
}

TEST_CASE("bench subcommand prints a scaling table") {
  const fs::path dir = freshDir("bench");
  const int code = runCli("bench --pieces 2 4 --repeats 1 --iters 4",
                          dir / "log.txt");
  CHECK(code == 0);
  const std::string log = slurp(dir / "log.txt");
  CHECK(log.find("pieces") != std::string::npos);
  CHECK(log.find("fit:") != std::string::npos);
  CHECK(log.find("R^2") != std::string::npos);
}

}  // TEST_SUITE("cli")
