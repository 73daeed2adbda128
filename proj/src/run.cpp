#include "omnitraj/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "omnitraj/fixtures.hpp"

namespace omnitraj::run {

using nlohmann::json;

namespace {

void expectKeys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (item.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::runtime_error("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <int N>
Eigen::Matrix<double, N, 1> fixedVec(const json& arr, const char* name) {
  if (!arr.is_array() || arr.size() != N) {
    throw std::runtime_error(std::string(name) + " must be an array of " +
                             std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = arr[i].get<double>();
  return v;
}

void parsePose(const json& obj, const char* name, Pose& pose) {
  expectKeys(obj, {"position", "quaternion"}, name);
  if (obj.contains("position")) {
    pose.position = fixedVec<3>(obj["position"], "position");
  }
  if (obj.contains("quaternion")) {
    pose.quaternion = fixedVec<4>(obj["quaternion"], "quaternion");
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void writeSvg(const std::string& path,
              const std::vector<std::pair<flatness::State, flatness::Input>>& samples,
              const penalty::Config& limits) {
  struct Panel {
    const char* title;
    double limit;
    std::vector<double> y;
  };
  Panel panels[3] = {{"speed [m/s]", limits.v_max, {}},
                     {"acceleration [m/s^2]", limits.a_max, {}},
                     {"body rate [rad/s]", limits.omega_max, {}}};
  std::vector<double> ts;
  ts.reserve(samples.size());
  for (const auto& [state, input] : samples) {
    (void)input;
    ts.push_back(state.t);
    panels[0].y.push_back(state.velocity.norm());
    panels[1].y.push_back(state.acceleration.norm());
    panels[2].y.push_back(state.omega.norm());
  }
  const double t_end = ts.empty() ? 1.0 : std::max(ts.back(), 1e-9);

  const double width = 860.0, panel_h = 200.0, panel_gap = 34.0;
  const double left = 70.0, right = 830.0, top0 = 26.0;
  const double height = top0 + 3 * (panel_h + panel_gap);

  std::ofstream svg(path);
  if (!svg) throw std::runtime_error("cannot write " + path);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g6(width)
      << "\" height=\"" << g6(height) << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << g6(width) << "\" height=\""
      << g6(height) << "\" fill=\"white\"/>\n";

  for (int p = 0; p < 3; ++p) {
    const double top = top0 + p * (panel_h + panel_gap);
    const double bottom = top + panel_h;
    double ymax = panels[p].limit;
    for (double v : panels[p].y) ymax = std::max(ymax, v);
    ymax = (ymax > 0.0 ? 1.15 * ymax : 1.0);

    auto X = [&](double t) { return left + (right - left) * (t / t_end); };
    auto Y = [&](double v) { return bottom - (bottom - top) * (v / ymax); };

    svg << "<rect x=\"" << g6(left) << "\" y=\"" << g6(top) << "\" width=\""
        << g6(right - left) << "\" height=\"" << g6(panel_h)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << g6(left) << "\" y=\"" << g6(top - 8.0) << "\">"
        << panels[p].title << "</text>\n";
    svg << "<text x=\"" << g6(left - 62.0) << "\" y=\"" << g6(top + 12.0)
        << "\">" << g6(ymax) << "</text>\n";
    svg << "<text x=\"" << g6(left - 62.0) << "\" y=\"" << g6(bottom)
        << "\">0</text>\n";

    if (panels[p].limit > 0.0 && panels[p].limit < ymax) {
      const double yl = Y(panels[p].limit);
      svg << "<line x1=\"" << g6(left) << "\" y1=\"" << g6(yl) << "\" x2=\""
          << g6(right) << "\" y2=\"" << g6(yl)
          << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
      svg << "<text x=\"" << g6(right + 4.0) << "\" y=\"" << g6(yl + 4.0)
          << "\" fill=\"#d62728\">" << g6(panels[p].limit) << "</text>\n";
    }

    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" "
        << "points=\"";
    for (size_t i = 0; i < ts.size(); ++i) {
      svg << g6(X(ts[i])) << ',' << g6(Y(panels[p].y[i]));
      if (i + 1 < ts.size()) svg << ' ';
    }
    svg << "\"/>\n";
  }

  const double axis_y = top0 + 3 * panel_h + 2 * panel_gap + 16.0;
  svg << "<text x=\"" << g6(left) << "\" y=\"" << g6(axis_y)
      << "\">t = 0</text>\n";
  svg << "<text x=\"" << g6(right - 80.0) << "\" y=\"" << g6(axis_y)
      << "\">t = " << g6(t_end) << " s</text>\n";
  svg << "</svg>\n";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RunConfig loadRunConfig(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw std::runtime_error("cannot open config file: " + path);
  json doc;
  try {
    stream >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw std::runtime_error("config must be an object");

  expectKeys(doc,
             {"s", "pieces_per_polyhedron", "k_rho", "kappa", "v_max", "a_max",
              "omega_max", "w_velocity", "w_acceleration", "w_omega",
              "w_safety", "threads", "mass", "inertia", "shape", "start",
              "end", "solver", "sample_dt", "oversample", "seed"},
             "config");

  RunConfig c;
  if (doc.contains("s")) c.s = doc["s"].get<int>();
  if (doc.contains("pieces_per_polyhedron")) {
    c.pieces_per_polyhedron = doc["pieces_per_polyhedron"].get<int>();
  }
  if (doc.contains("k_rho")) c.k_rho = doc["k_rho"].get<double>();
  if (doc.contains("kappa")) c.penalty.kappa = doc["kappa"].get<int>();
  if (doc.contains("v_max")) c.penalty.v_max = doc["v_max"].get<double>();
  if (doc.contains("a_max")) c.penalty.a_max = doc["a_max"].get<double>();
  if (doc.contains("omega_max")) {
    c.penalty.omega_max = doc["omega_max"].get<double>();
  }
  if (doc.contains("w_velocity")) c.penalty.w_v = doc["w_velocity"].get<double>();
  if (doc.contains("w_acceleration")) {
    c.penalty.w_a = doc["w_acceleration"].get<double>();
  }
  if (doc.contains("w_omega")) c.penalty.w_omega = doc["w_omega"].get<double>();
  if (doc.contains("w_safety")) c.penalty.w_c = doc["w_safety"].get<double>();
  if (doc.contains("threads")) c.penalty.threads = doc["threads"].get<int>();
  if (doc.contains("mass")) c.vehicle.mass = doc["mass"].get<double>();
  if (doc.contains("inertia")) {
    c.vehicle.inertia = fixedVec<3>(doc["inertia"], "inertia");
  }
  if (doc.contains("shape")) {
    expectKeys(doc["shape"], {"cuboid"}, "shape");
    if (doc["shape"].contains("cuboid")) {
      c.shape_box = fixedVec<3>(doc["shape"]["cuboid"], "shape.cuboid");
    }
  }
  if (doc.contains("start")) parsePose(doc["start"], "start", c.start);
  if (doc.contains("end")) parsePose(doc["end"], "end", c.end);
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    expectKeys(s,
               {"memory", "grad_tol", "max_iterations", "armijo_c1",
                "backtrack_factor", "max_ls_steps"},
               "solver");
    if (s.contains("memory")) c.solver.memory = s["memory"].get<int>();
    if (s.contains("grad_tol")) c.solver.grad_tol = s["grad_tol"].get<double>();
    if (s.contains("max_iterations")) {
      c.solver.max_iterations = s["max_iterations"].get<int>();
    }
    if (s.contains("armijo_c1")) {
      c.solver.armijo_c1 = s["armijo_c1"].get<double>();
    }
    if (s.contains("backtrack_factor")) {
      c.solver.backtrack = s["backtrack_factor"].get<double>();
    }
    if (s.contains("max_ls_steps")) {
      c.solver.max_line_search = s["max_ls_steps"].get<int>();
    }
  }
  if (doc.contains("sample_dt")) c.sample_dt = doc["sample_dt"].get<double>();
  if (doc.contains("oversample")) c.oversample = doc["oversample"].get<int>();
  if (doc.contains("seed")) c.seed = doc["seed"].get<unsigned>();

  if (c.s < 2) throw std::runtime_error("s must be >= 2");
  if (c.pieces_per_polyhedron < 1) {
    throw std::runtime_error("pieces_per_polyhedron must be >= 1");
  }
  if (c.penalty.kappa < 1) throw std::runtime_error("kappa must be >= 1");
  if (c.sample_dt <= 0.0) throw std::runtime_error("sample_dt must be > 0");
  if (c.oversample < 1) throw std::runtime_error("oversample must be >= 1");
  if (c.shape_box.minCoeff() <= 0.0) {
    throw std::runtime_error("shape.cuboid extents must be > 0");
  }
  return c;
}

void saveRunConfig(const std::string& path, const RunConfig& config) {
  json doc;
  doc["s"] = config.s;
  doc["pieces_per_polyhedron"] = config.pieces_per_polyhedron;
  doc["k_rho"] = config.k_rho;
  doc["kappa"] = config.penalty.kappa;
  doc["v_max"] = config.penalty.v_max;
  doc["a_max"] = config.penalty.a_max;
  doc["omega_max"] = config.penalty.omega_max;
  doc["w_velocity"] = config.penalty.w_v;
  doc["w_acceleration"] = config.penalty.w_a;
  doc["w_omega"] = config.penalty.w_omega;
  doc["w_safety"] = config.penalty.w_c;
  doc["threads"] = config.penalty.threads;
  doc["mass"] = config.vehicle.mass;
  doc["inertia"] = {config.vehicle.inertia[0], config.vehicle.inertia[1],
                    config.vehicle.inertia[2]};
  doc["shape"]["cuboid"] = {config.shape_box[0], config.shape_box[1],
                            config.shape_box[2]};
  auto pose = [](const Pose& p) {
    json j;
    j["position"] = {p.position[0], p.position[1], p.position[2]};
    j["quaternion"] = {p.quaternion[0], p.quaternion[1], p.quaternion[2],
                       p.quaternion[3]};
    return j;
  };
  doc["start"] = pose(config.start);
  doc["end"] = pose(config.end);
  doc["solver"]["memory"] = config.solver.memory;
  doc["solver"]["grad_tol"] = config.solver.grad_tol;
  doc["solver"]["max_iterations"] = config.solver.max_iterations;
  doc["solver"]["armijo_c1"] = config.solver.armijo_c1;
  doc["solver"]["backtrack_factor"] = config.solver.backtrack;
  doc["solver"]["max_ls_steps"] = config.solver.max_line_search;
  doc["sample_dt"] = config.sample_dt;
  doc["oversample"] = config.oversample;
  doc["seed"] = config.seed;

  std::ofstream stream(path);
  if (!stream) throw std::runtime_error("cannot write config file: " + path);
  stream << doc.dump(2) << "\n";
}

Eigen::Vector3d sigmaFromQuaternion(const Eigen::Vector4d& q) {
  const double norm = q.norm();
  if (!(norm > 1e-12)) {
    throw std::invalid_argument("quaternion norm must be positive");
  }
  Eigen::Vector4d u = q / norm;
  if (u[0] > 0.0) u = -u;  // chart covers the w <= 0 hemisphere
  return u.tail<3>() / (1.0 - u[0]);
}

problem::Spec buildSpec(const RunConfig& config,
                        const geometry::Corridor& corridor) {
  spline::BoundaryCondition bc;
  bc.start = Eigen::MatrixXd::Zero(6, config.s);
  bc.end = Eigen::MatrixXd::Zero(6, config.s);
  bc.start.col(0).head<3>() = config.start.position;
  bc.start.col(0).tail<3>() = sigmaFromQuaternion(config.start.quaternion);
  bc.end.col(0).head<3>() = config.end.position;
  bc.end.col(0).tail<3>() = sigmaFromQuaternion(config.end.quaternion);

  return problem::Spec{
      corridor,
      geometry::VehicleShape::cuboid(config.shape_box[0], config.shape_box[1],
                                     config.shape_box[2]),
      bc, config.s, config.penalty, config.k_rho};
}

void writeArtifacts(const std::string& out_dir, const RunConfig& config,
                    const geometry::Corridor& corridor,
                    const problem::OptimizeResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const spline::Trajectory& traj = result.trajectory;

  {
    json doc;
    doc["s"] = traj.order();
    doc["pieces"] = traj.pieces();
    json durations = json::array();
    for (int i = 0; i < traj.pieces(); ++i) durations.push_back(traj.durations()[i]);
    doc["durations"] = std::move(durations);
    json pieces = json::array();
    for (int i = 0; i < traj.pieces(); ++i) {
      Eigen::Ref<const Eigen::MatrixXd> c = traj.pieceCoefficients(i);
      json rows = json::array();
      for (Eigen::Index r = 0; r < c.rows(); ++r) {
        rows.push_back({c(r, 0), c(r, 1), c(r, 2), c(r, 3), c(r, 4), c(r, 5)});
      }
      pieces.push_back(std::move(rows));
    }
    doc["coefficients"] = std::move(pieces);
    std::ofstream stream(fs::path(out_dir) / "trajectory.json");
    stream << doc.dump(2) << "\n";
  }

  auto samples = flatness::sampleProfile(traj, config.vehicle, config.sample_dt);
  {
    std::ofstream csv(fs::path(out_dir) / "profile.csv");
    csv << "t,px,py,pz,vx,vy,vz,ax,ay,az,qw,qx,qy,qz,"
        << "wx,wy,wz,dwx,dwy,dwz,fx,fy,fz,taux,tauy,tauz\n";
    for (const auto& [st, in] : samples) {
      csv << g17(st.t);
      for (int i = 0; i < 3; ++i) csv << ',' << g17(st.position[i]);
      for (int i = 0; i < 3; ++i) csv << ',' << g17(st.velocity[i]);
      for (int i = 0; i < 3; ++i) csv << ',' << g17(st.acceleration[i]);
      for (int i = 0; i < 4; ++i) csv << ',' << g17(st.quaternion[i]);
      for (int i = 0; i < 3; ++i) csv << ',' << g17(st.omega[i]);
      for (int i = 0; i < 3; ++i) csv << ',' << g17(st.omega_dot[i]);
      for (int i = 0; i < 3; ++i) csv << ',' << g17(in.force_body[i]);
      for (int i = 0; i < 3; ++i) csv << ',' << g17(in.torque_body[i]);
      csv << "\n";
    }
  }

  {
    geometry::VehicleShape shape = geometry::VehicleShape::cuboid(
        config.shape_box[0], config.shape_box[1], config.shape_box[2]);
    const int sweep = config.penalty.kappa * config.oversample;
    penalty::ViolationProfile vp =
        penalty::maxViolationProfile(traj, corridor, shape, sweep);
    const double slack = 1.02;  // soft-constraint overshoot allowance
    json doc;
    doc["samples_per_piece"] = sweep;
    doc["max_speed"] = vp.max_speed;
    doc["speed_limit"] = config.penalty.v_max;
    doc["speed_ok"] = vp.max_speed <= slack * config.penalty.v_max;
    doc["max_acceleration"] = vp.max_acceleration;
    doc["acceleration_limit"] = config.penalty.a_max;
    doc["acceleration_ok"] =
        vp.max_acceleration <= slack * config.penalty.a_max;
    doc["max_omega"] = vp.max_omega;
    doc["omega_limit"] = config.penalty.omega_max;
    doc["omega_ok"] = vp.max_omega <= slack * config.penalty.omega_max;
    doc["max_penetration"] = vp.max_penetration;
    doc["penetration_ok"] = vp.max_penetration <= 1e-3;
    doc["ok"] = doc["speed_ok"].get<bool>() &&
                doc["acceleration_ok"].get<bool>() &&
                doc["omega_ok"].get<bool>() && doc["penetration_ok"].get<bool>();
    std::ofstream stream(fs::path(out_dir) / "violations.json");
    stream << doc.dump(2) << "\n";
  }

  {
    json doc;
    doc["status"] = solver::statusName(result.solve.status);
    doc["objective"] = result.solve.value;
    doc["smoothness"] = result.diagnostics.smoothness;
    doc["time_cost"] = result.diagnostics.time_cost;
    doc["penalty"]["total"] = result.diagnostics.penalty.total;
    doc["penalty"]["velocity"] = result.diagnostics.penalty.velocity;
    doc["penalty"]["acceleration"] = result.diagnostics.penalty.acceleration;
    doc["penalty"]["omega"] = result.diagnostics.penalty.omega;
    doc["penalty"]["safety"] = result.diagnostics.penalty.safety;
    doc["total_duration"] = traj.duration();
    doc["iterations"] = result.solve.iterations;
    doc["clamp_events"] = result.diagnostics.clamp_events;
    doc["wall_time_ms"] = result.wall_time_s * 1000.0;
    doc["t_opt_per_piece_ms"] =
        result.wall_time_s * 1000.0 / std::max(1, traj.pieces());
    std::ofstream stream(fs::path(out_dir) / "summary.json");
    stream << doc.dump(2) << "\n";
  }

  writeSvg((fs::path(out_dir) / "profile.svg").string(), samples,
           config.penalty);
}

RunOutcome runCommand(const RunConfig& config, const std::string& corridor_path,
                      const std::string& out_dir) {
  RunOutcome out;

  if (!std::filesystem::exists(corridor_path)) {
    out.exit_code = 1;
    out.message = "cannot open corridor file: " + corridor_path;
    return out;
  }

  geometry::Corridor corridor;
  try {
    io::CorridorFile file = io::loadCorridorFile(corridor_path);
    corridor = io::buildCorridor(file, config.pieces_per_polyhedron);
    geometry::CorridorReport report = geometry::validateCorridor(corridor);
    if (!report.ok) {
      out.exit_code = 2;
      out.message = "corridor validation failed";
      for (const std::string& issue : report.issues) {
        out.message += "\n  " + issue;
      }
      for (const auto& pair : report.pairs) {
        if (!pair.ok) {
          out.message += "\n  polyhedra " + std::to_string(pair.first) +
                         " and " + std::to_string(pair.second) +
                         " do not overlap with interior";
        }
      }
      return out;
    }
  } catch (const std::exception& e) {
    out.exit_code = 2;
    out.message = e.what();
    return out;
  }

  try {
    problem::Spec spec = buildSpec(config, corridor);
    out.result = problem::optimize(spec, config.solver);
    out.has_result = true;
    writeArtifacts(out_dir, config, corridor, out.result);
    out.message = solver::statusName(out.result.solve.status);
    if (out.result.solve.status == solver::Status::LineSearchFailure ||
        out.result.solve.status == solver::Status::NonFiniteObjective) {
      out.exit_code = 3;
    }
  } catch (const std::exception& e) {
    out.exit_code = 3;
    out.message = e.what();
  }
  return out;
}

BenchResult benchScaling(const RunConfig& base,
                         const std::vector<int>& piece_counts, int repeats,
                         int iterations) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  BenchResult out;

  for (int target : piece_counts) {
    const int ppp = std::max(1, base.pieces_per_polyhedron);
    const int boxes = std::max(2, target / ppp);
    fixtures::Fixture fx = fixtures::makeFixture("straight", boxes, 0.0, base.seed);
    geometry::Corridor corridor = io::buildCorridor(fx.corridor, ppp);

    RunConfig cfg = base;
    cfg.start.position = fx.start_position;
    cfg.start.quaternion = fx.start_quaternion;
    cfg.end.position = fx.end_position;
    cfg.end.quaternion = fx.end_quaternion;
    cfg.solver.grad_tol = 0.0;  // fixed budget: every size runs all iterations
    cfg.solver.max_iterations = iterations;

    problem::Spec spec = buildSpec(cfg, corridor);
    std::vector<double> times;
    times.reserve(repeats);
    for (int r = 0; r < repeats; ++r) {
      problem::OptimizeResult res = problem::optimize(spec, cfg.solver);
      times.push_back(res.wall_time_s);
    }
    BenchPoint point;
    point.pieces = corridor.pieces();
    point.median_s = median(times);
    point.per_piece_ms = point.median_s * 1000.0 / corridor.pieces();
    out.points.push_back(point);
  }

  const int n = static_cast<int>(out.points.size());
  if (n >= 2) {
    double sx = 0, sy = 0;
    for (const BenchPoint& p : out.points) {
      sx += p.pieces;
      sy += p.median_s;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const BenchPoint& p : out.points) {
      const double dx = p.pieces - mx, dy = p.median_s - my;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    if (sxx > 0.0) {
      out.slope = sxy / sxx;
      out.intercept = my - out.slope * mx;
      double ss_res = 0.0;
      for (const BenchPoint& p : out.points) {
        const double e = p.median_s - (out.slope * p.pieces + out.intercept);
        ss_res += e * e;
      }
      out.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    }
  }
  return out;
}

}  // namespace omnitraj::run
