#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omnitraj/fixtures.hpp"
#include "omnitraj/run.hpp"

namespace {

int runSubcommand(const std::string& config_path,
                  const std::string& corridor_path, const std::string& out_dir,
                  int seed_override, int threads_override) {
  omnitraj::run::RunConfig config;
  try {
    if (!config_path.empty()) {
      config = omnitraj::run::loadRunConfig(config_path);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  if (seed_override >= 0) config.seed = static_cast<unsigned>(seed_override);
  if (threads_override >= 0) config.penalty.threads = threads_override;

  omnitraj::run::RunOutcome outcome =
      omnitraj::run::runCommand(config, corridor_path, out_dir);
  if (outcome.exit_code != 0) {
    std::fprintf(stderr, "error: %s\n", outcome.message.c_str());
  } else {
    std::printf("status: %s\n", outcome.message.c_str());
    std::printf("objective: %.9g\n", outcome.result.solve.value);
    std::printf("duration_s: %.9g\n", outcome.result.trajectory.duration());
    std::printf("iterations: %d\n", outcome.result.solve.iterations);
    std::printf("artifacts: %s\n", out_dir.c_str());
  }
  return outcome.exit_code;
}

int fixtureSubcommand(const std::string& kind, int boxes, double gap,
                      unsigned seed, const std::string& out_dir) {
  try {
    omnitraj::fixtures::Fixture fx =
        omnitraj::fixtures::makeFixture(kind, boxes, gap, seed);
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    omnitraj::io::saveCorridorFile((dir / "corridor.json").string(),
                                   fx.corridor);

    omnitraj::run::RunConfig config;
    config.seed = seed;
    // The slit is thin enough that violations can slip between penalty
    // samples at two pieces per polyhedron; three keeps the sample grid
    // dense where the body squeezes through.
    if (kind == "slot") config.pieces_per_polyhedron = 3;
    config.start.position = fx.start_position;
    config.start.quaternion = fx.start_quaternion;
    config.end.position = fx.end_position;
    config.end.quaternion = fx.end_quaternion;
    omnitraj::run::saveRunConfig((dir / "config.json").string(), config);
    std::printf("wrote %s and %s\n", (dir / "corridor.json").c_str(),
                (dir / "config.json").c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int benchSubcommand(const std::string& config_path, std::vector<int> pieces,
                    int repeats, int iterations) {
  omnitraj::run::RunConfig config;
  try {
    if (!config_path.empty()) {
      config = omnitraj::run::loadRunConfig(config_path);
    }
    omnitraj::run::BenchResult result =
        omnitraj::run::benchScaling(config, pieces, repeats, iterations);
    std::printf("%8s %14s %16s\n", "pieces", "median_ms", "per_piece_ms");
    for (const auto& p : result.points) {
      std::printf("%8d %14.3f %16.4f\n", p.pieces, p.median_s * 1000.0,
                  p.per_piece_ms);
    }
    std::printf("fit: time_ms = %.4f * pieces + %.4f (R^2 = %.4f)\n",
                result.slope * 1000.0, result.intercept * 1000.0, result.r2);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Whole-body 6-DoF trajectory optimization inside polyhedron corridors"};
  app.require_subcommand(1);

  std::string config_path, corridor_path, out_dir = "out";
  int seed_override = -1, threads_override = -1;
  CLI::App* run = app.add_subcommand(
      "run", "Optimize a trajectory through a corridor file");
  run->add_option("--config", config_path, "Run configuration JSON");
  run->add_option("--corridor", corridor_path, "Corridor JSON")->required();
  run->add_option("--out", out_dir, "Artifact directory");
  run->add_option("--seed", seed_override, "Override the configured seed");
  run->add_option("--threads", threads_override,
                  "Override the penalty thread count");

  std::string kind = "slot";
  int boxes = 6;
  double gap = 0.6;
  unsigned seed = 0;
  std::string fixture_out = "fixture";
  CLI::App* fixture = app.add_subcommand(
      "fixture", "Emit a bundled corridor scenario and matching config");
  fixture->add_option("--kind", kind, "slot | straight | zigzag");
  fixture->add_option("--boxes", boxes, "Box count (straight/zigzag)");
  fixture->add_option("--gap", gap, "Slit width in meters (slot)");
  fixture->add_option("--seed", seed, "Jitter seed (zigzag)");
  fixture->add_option("--out", fixture_out, "Output directory");

  std::vector<int> piece_counts = {4, 8, 16, 32, 64};
  int repeats = 3, iterations = 60;
  std::string bench_config;
  CLI::App* bench = app.add_subcommand(
      "bench", "Time optimization against piece count on straight corridors");
  bench->add_option("--config", bench_config, "Run configuration JSON");
  bench->add_option("--pieces", piece_counts, "Piece counts to time");
  bench->add_option("--repeats", repeats, "Runs per size (median)");
  bench->add_option("--iters", iterations, "Fixed iteration budget");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return runSubcommand(config_path, corridor_path, out_dir, seed_override,
                         threads_override);
  }
  if (fixture->parsed()) {
    return fixtureSubcommand(kind, boxes, gap, seed, fixture_out);
  }
  return benchSubcommand(bench_config, piece_counts, repeats, iterations);
}
