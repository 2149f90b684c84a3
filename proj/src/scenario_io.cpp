/*
 Copyright 2026 The herdopt authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "herdopt/scenario_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "herdopt/dynamics.hpp"
#include "herdopt/errors.hpp"
#include "herdopt/lqr.hpp"
#include "herdopt/rootfind.hpp"
#include "herdopt/shooting.hpp"

namespace herdopt {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::uint64_t env_seed() {
  const char* s = std::getenv("HERDOPT_SEED");
  if (!s || !*s) return 0;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (errno != 0 || end == s || *end != '\0')
    throw ParseError("HERDOPT_SEED must be a nonnegative integer");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

std::string axis_name(int k) {
  static const char* xyz[] = {"x", "y", "z"};
  if (k < 3) return xyz[k];
  return "c" + std::to_string(k);
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian(double sigma) {
  const double u1 = uniform();
  const double u2 = uniform();
  return sigma * std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(kTwoPi * u2);
}

Vec Rng::on_sphere(int dim, double radius) {
  Vec v(dim);
  while (true) {
    for (int k = 0; k < dim; ++k) v[k] = gaussian();
    const double n = norm2(v);
    if (n > 1e-12) {
      for (int k = 0; k < dim; ++k) v[k] *= radius / n;
      return v;
    }
  }
}

ScenarioSpec parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("scenario: top level must be an object");

  static const std::set<std::string> known = {
      "m",          "n",          "dim",
      "tf",         "lambda",     "epsilon",
      "alpha",      "beta",       "dog_cost_mode",
      "seed",       "dog_positions",  "dog_velocities",
      "sheep_positions", "sheep_velocities"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw ParseError("scenario: unknown key '" + item.key() + "'");

  ScenarioSpec spec;
  try {
    auto read_blocks = [&j](const char* key) {
      std::vector<Vec> out;
      if (!j.contains(key)) return out;
      if (!j.at(key).is_array())
        throw ParseError(std::string("scenario: ") + key +
                         " must be a list of coordinate lists");
      for (const auto& row : j.at(key)) {
        Vec v;
        for (const auto& x : row) v.push_back(x.get<double>());
        out.push_back(std::move(v));
      }
      return out;
    };

    spec.dog_positions = read_blocks("dog_positions");
    spec.dog_velocities = read_blocks("dog_velocities");
    spec.sheep_positions = read_blocks("sheep_positions");
    spec.sheep_velocities = read_blocks("sheep_velocities");
    if (spec.dog_positions.empty())
      throw ParseError("scenario: dog_positions is required");

    spec.dog_count =
        j.value("m", static_cast<int>(spec.dog_positions.size()));
    spec.sheep_count =
        j.value("n", static_cast<int>(spec.sheep_positions.size()));
    spec.dim =
        j.value("dim", static_cast<int>(spec.dog_positions[0].size()));
    spec.tf = j.value("tf", spec.tf);
    spec.lambda = j.value("lambda", spec.lambda);
    spec.epsilon = j.value("epsilon", spec.epsilon);
    spec.alpha = j.value("alpha", spec.alpha);
    spec.beta = j.value("beta", spec.beta);

    const std::string mode = j.value("dog_cost_mode", std::string("origin"));
    if (mode == "origin")
      spec.dog_cost_mode = DogCostMode::origin;
    else if (mode == "ring")
      spec.dog_cost_mode = DogCostMode::ring;
    else
      throw ParseError("scenario: dog_cost_mode must be 'origin' or 'ring'");

    spec.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>()
                                   : env_seed();
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }

  if (spec.dog_velocities.empty())
    spec.dog_velocities.assign(spec.dog_positions.size(),
                               Vec(spec.dim, 0.0));
  if (spec.sheep_velocities.empty())
    spec.sheep_velocities.assign(spec.sheep_positions.size(),
                                 Vec(spec.dim, 0.0));
  spec.validate();
  return spec;
}

ScenarioSpec parse_scenario(const std::string& path) {
  return parse_scenario_text(read_file(path));
}

void write_scenario(const ScenarioSpec& spec, const std::string& path) {
  json j;
  j["m"] = spec.dog_count;
  j["n"] = spec.sheep_count;
  j["dim"] = spec.dim;
  j["tf"] = spec.tf;
  j["lambda"] = spec.lambda;
  j["epsilon"] = spec.epsilon;
  j["alpha"] = spec.alpha;
  j["beta"] = spec.beta;
  j["dog_cost_mode"] =
      spec.dog_cost_mode == DogCostMode::ring ? "ring" : "origin";
  j["seed"] = spec.seed;
  j["dog_positions"] = spec.dog_positions;
  j["dog_velocities"] = spec.dog_velocities;
  j["sheep_positions"] = spec.sheep_positions;
  j["sheep_velocities"] = spec.sheep_velocities;
  write_file(path, j.dump(2) + "\n");
}

ScenarioSpec random_scenario(int dogs, int sheep, int dim, double dog_radius,
                             double sheep_radius, VelocityMode mode,
                             double sigma, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.dog_count = dogs;
  spec.sheep_count = sheep;
  spec.dim = dim;
  spec.seed = seed;

  Rng rng(seed);
  for (int jdx = 0; jdx < dogs; ++jdx)
    spec.dog_positions.push_back(rng.on_sphere(dim, dog_radius));
  for (int i = 0; i < sheep; ++i)
    spec.sheep_positions.push_back(rng.on_sphere(dim, sheep_radius));

  auto velocities = [&](int count) {
    std::vector<Vec> out;
    for (int c = 0; c < count; ++c) {
      Vec v(dim, 0.0);
      if (mode == VelocityMode::gaussian)
        for (int k = 0; k < dim; ++k) v[k] = rng.gaussian(sigma);
      out.push_back(std::move(v));
    }
    return out;
  };
  spec.dog_velocities = velocities(dogs);
  spec.sheep_velocities = velocities(sheep);
  spec.validate();
  return spec;
}

namespace {

Vec uniform_nodes(double tf, int nodes) {
  Vec t(nodes);
  for (int k = 0; k < nodes; ++k) t[k] = tf * k / (nodes - 1);
  t.back() = tf;
  return t;
}

}  // namespace

Mesh constant_guess(const ScenarioSpec& spec, int nodes) {
  spec.validate();
  if (nodes < 3) throw ValidationError("guess needs at least three nodes");
  Mesh mesh;
  mesh.nodes = uniform_nodes(spec.tf, nodes);
  Vec value(spec.augmented_size(), 0.0);
  const Vec x0 = spec.initial_state();
  for (int k = 0; k < spec.state_size(); ++k) value[k] = x0[k];
  mesh.values.assign(nodes, value);
  return mesh;
}

Mesh noise_guess(const ScenarioSpec& spec, int nodes, double sigma,
                 std::uint64_t seed) {
  Mesh mesh = constant_guess(spec, nodes);
  Rng rng(seed);
  const int ns = spec.state_size();
  for (Vec& value : mesh.values)
    for (int k = 0; k < ns; ++k) value[ns + k] = rng.gaussian(sigma);
  return mesh;
}

namespace {

// Wrapped angular distance from theta to the nearest direction
// 2*pi*k/m, ties resolved toward the smaller k.  The result lies in
// (-pi/m, pi/m] by construction.
double nearest_root_delta(double theta, int m) {
  double best = 0.0;
  double best_abs = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    double w = std::fmod(kTwoPi * k / m - theta, kTwoPi);
    if (w > 0.5 * kTwoPi) w -= kTwoPi;
    if (w <= -0.5 * kTwoPi) w += kTwoPi;
    if (std::abs(w) < best_abs) {
      best_abs = std::abs(w);
      best = w;
    }
  }
  return best;
}

}  // namespace

Mesh structured_guess(const ScenarioSpec& spec, double target_radius,
                      int nodes) {
  spec.validate();
  if (spec.dim != 2 && spec.dim != 3)
    throw ValidationError("structured guess supports dim 2 and 3 only");
  if (nodes < 3) throw ValidationError("guess needs at least three nodes");

  const StateLayout lay = spec.layout();
  const int ns = lay.state_size();
  Mesh mesh;
  mesh.nodes = uniform_nodes(spec.tf, nodes);
  mesh.values.assign(nodes, Vec(2 * ns, 0.0));

  for (int j = 0; j < spec.dog_count; ++j) {
    const Vec& p0 = spec.dog_positions[j];
    const double r0 = std::hypot(p0[0], p0[1]);
    const double th0 = std::atan2(p0[1], p0[0]);
    const double thf = th0 + nearest_root_delta(th0, spec.dog_count);
    const double rdot = (target_radius - r0) / spec.tf;
    const double thdot = (thf - th0) / spec.tf;
    const double z0 = spec.dim == 3 ? p0[2] : 0.0;

    for (int k = 0; k < nodes; ++k) {
      const double tau = mesh.nodes[k] / spec.tf;
      const double r = r0 + (target_radius - r0) * tau;
      const double th = th0 + (thf - th0) * tau;
      const double ct = std::cos(th), st = std::sin(th);
      Vec& v = mesh.values[k];
      v[lay.dog_pos(j) + 0] = r * ct;
      v[lay.dog_pos(j) + 1] = r * st;
      v[lay.dog_vel(j) + 0] = rdot * ct - r * thdot * st;
      v[lay.dog_vel(j) + 1] = rdot * st + r * thdot * ct;
      // Radius and sweep rate are constant along the curve, so the
      // acceleration is Coriolis plus centripetal only; q = 2a makes the
      // implied control reproduce it.
      const double ax = -2.0 * rdot * thdot * st - r * thdot * thdot * ct;
      const double ay = 2.0 * rdot * thdot * ct - r * thdot * thdot * st;
      v[ns + lay.dog_vel(j) + 0] = 2.0 * ax;
      v[ns + lay.dog_vel(j) + 1] = 2.0 * ay;
      if (spec.dim == 3) {
        v[lay.dog_pos(j) + 2] = z0 * (1.0 - tau);
        v[lay.dog_vel(j) + 2] = -z0 / spec.tf;
      }
    }
  }

  for (int i = 0; i < spec.sheep_count; ++i) {
    const Vec& s0 = spec.sheep_positions[i];
    for (int k = 0; k < nodes; ++k) {
      const double tau = mesh.nodes[k] / spec.tf;
      Vec& v = mesh.values[k];
      for (int d = 0; d < spec.dim; ++d) {
        v[lay.sheep_pos(i) + d] = s0[d] * (1.0 - tau);
        v[lay.sheep_vel(i) + d] = -s0[d] / spec.tf;
      }
    }
  }

  const Vec x0 = spec.initial_state();
  for (int k = 0; k < ns; ++k) mesh.values[0][k] = x0[k];
  return mesh;
}

void export_trajectory_csv(const Trajectory& traj, const ScenarioSpec& spec,
                           const std::string& path) {
  if (!traj.has_controls())
    throw MissingControlsError("cannot export a trajectory without controls");
  const StateLayout lay = spec.layout();

  std::ostringstream out;
  out << "t";
  for (int j = 0; j < lay.dogs; ++j) {
    for (int k = 0; k < lay.dim; ++k) out << ",d" << j << "_" << axis_name(k);
    for (int k = 0; k < lay.dim; ++k) out << ",vd" << j << "_" << axis_name(k);
  }
  for (int i = 0; i < lay.sheep; ++i) {
    for (int k = 0; k < lay.dim; ++k) out << ",s" << i << "_" << axis_name(k);
    for (int k = 0; k < lay.dim; ++k) out << ",vs" << i << "_" << axis_name(k);
  }
  for (int j = 0; j < lay.dogs; ++j)
    for (int k = 0; k < lay.dim; ++k) out << ",u" << j << "_" << axis_name(k);
  out << "\n";

  for (std::size_t row = 0; row < traj.size(); ++row) {
    out << fmt17(traj.times[row]);
    for (double v : traj.states[row]) out << "," << fmt17(v);
    for (double v : traj.controls[row]) out << "," << fmt17(v);
    out << "\n";
  }
  write_file(path, out.str());
}

Trajectory parse_trajectory_csv(const std::string& path,
                                const ScenarioSpec& spec) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("trajectory: empty file " + path);

  const std::size_t ncols = 1 + static_cast<std::size_t>(spec.state_size()) +
                            static_cast<std::size_t>(spec.control_size());
  std::size_t header_cols = 1;
  for (char c : line)
    if (c == ',') ++header_cols;
  if (header_cols != ncols)
    throw ParseError("trajectory: expected " + std::to_string(ncols) +
                     " columns, header has " + std::to_string(header_cols));

  Trajectory traj;
  const std::size_t ns = static_cast<std::size_t>(spec.state_size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Vec row;
    row.reserve(ncols);
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(p, &end);
      if (end == p)
        throw ParseError("trajectory: bad number at line " +
                         std::to_string(lineno));
      row.push_back(v);
      p = end;
      if (*p == ',')
        ++p;
      else
        break;
    }
    if (*p != '\0' && *p != '\r')
      throw ParseError("trajectory: trailing junk at line " +
                       std::to_string(lineno));
    if (row.size() != ncols)
      throw ParseError("trajectory: wrong column count at line " +
                       std::to_string(lineno));
    traj.times.push_back(row[0]);
    traj.states.emplace_back(row.begin() + 1, row.begin() + 1 + ns);
    traj.controls.emplace_back(row.begin() + 1 + ns, row.end());
  }
  if (traj.size() == 0) throw ParseError("trajectory: no data rows in " + path);
  return traj;
}

void export_trajectory_svg(const Trajectory& traj, const ScenarioSpec& spec,
                           const std::string& path) {
  const StateLayout lay = spec.layout();
  const auto px = [&](const Vec& state, int offset) {
    return state[offset];
  };
  const auto py = [&](const Vec& state, int offset) {
    return lay.dim >= 2 ? -state[offset + 1] : 0.0;
  };

  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  for (const Vec& s : traj.states) {
    for (int j = 0; j < lay.dogs; ++j) {
      xmin = std::min(xmin, px(s, lay.dog_pos(j)));
      xmax = std::max(xmax, px(s, lay.dog_pos(j)));
      ymin = std::min(ymin, py(s, lay.dog_pos(j)));
      ymax = std::max(ymax, py(s, lay.dog_pos(j)));
    }
    for (int i = 0; i < lay.sheep; ++i) {
      xmin = std::min(xmin, px(s, lay.sheep_pos(i)));
      xmax = std::max(xmax, px(s, lay.sheep_pos(i)));
      ymin = std::min(ymin, py(s, lay.sheep_pos(i)));
      ymax = std::max(ymax, py(s, lay.sheep_pos(i)));
    }
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-6});
  const double pad = 0.08 * span;
  xmin -= pad;
  ymin -= pad;
  const double w = (xmax + pad) - xmin;
  const double h = (ymax + pad) - ymin;
  const double stroke = 0.008 * span;
  const double marker = 0.015 * span;

  static const char* dog_colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                     "#d62728", "#9467bd", "#8c564b",
                                     "#e377c2", "#7f7f7f"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
      << fmt6(xmin) << " " << fmt6(ymin) << " " << fmt6(w) << " " << fmt6(h)
      << "\">\n";
  out << "<style>path{fill:none;stroke-width:" << fmt6(stroke)
      << "}.origin{stroke:#999;stroke-width:" << fmt6(0.5 * stroke)
      << "}.sheep{stroke:#555;stroke-dasharray:" << fmt6(2.5 * stroke)
      << "}</style>\n";

  const double cross = 0.025 * span;
  out << "<line class=\"origin\" x1=\"" << fmt6(-cross)
      << "\" y1=\"0\" x2=\"" << fmt6(cross) << "\" y2=\"0\"/>\n";
  out << "<line class=\"origin\" x1=\"0\" y1=\"" << fmt6(-cross)
      << "\" x2=\"0\" y2=\"" << fmt6(cross) << "\"/>\n";

  const auto emit_path = [&](int offset, const std::string& cls,
                             const std::string& color) {
    out << "<path class=\"" << cls << "\"";
    if (!color.empty()) out << " stroke=\"" << color << "\"";
    out << " d=\"";
    for (std::size_t k = 0; k < traj.size(); ++k) {
      out << (k == 0 ? "M" : " L") << fmt6(px(traj.states[k], offset)) << " "
          << fmt6(py(traj.states[k], offset));
    }
    out << "\"/>\n";
    const auto marker_at = [&](const Vec& s, bool filled,
                               const std::string& c) {
      out << "<circle cx=\"" << fmt6(px(s, offset)) << "\" cy=\""
          << fmt6(py(s, offset)) << "\" r=\"" << fmt6(marker) << "\" fill=\""
          << (filled ? c : std::string("none")) << "\" stroke=\"" << c
          << "\" stroke-width=\"" << fmt6(0.5 * stroke) << "\"/>\n";
    };
    marker_at(traj.states.front(), false,
              color.empty() ? "#555" : color);
    marker_at(traj.states.back(), true, color.empty() ? "#555" : color);
  };

  for (int j = 0; j < lay.dogs; ++j)
    emit_path(lay.dog_pos(j), "dog", dog_colors[j % 8]);
  for (int i = 0; i < lay.sheep; ++i)
    emit_path(lay.sheep_pos(i), "sheep", "");

  out << "</svg>\n";
  write_file(path, out.str());
}

namespace {

Mesh build_guess(const ScenarioSpec& spec, const std::string& style,
                 double target_radius, double sigma, int nodes,
                 std::uint64_t seed) {
  if (style == "spiral") return structured_guess(spec, target_radius, nodes);
  if (style == "zeros") return constant_guess(spec, nodes);
  if (style == "noise") return noise_guess(spec, nodes, sigma, seed);
  throw ParseError("unknown guess style '" + style + "'");
}

int run_solve_bvp(const std::string& scenario_path, const std::string& out,
                  const std::string& svg, const std::string& guess_style,
                  double target_radius, double sigma, int nodes,
                  const BvpOptions& opts, std::uint64_t seed,
                  bool seed_given) {
  const ScenarioSpec spec = parse_scenario(scenario_path);
  const Mesh guess = build_guess(spec, guess_style, target_radius, sigma,
                                 nodes, seed_given ? seed : spec.seed);
  const auto [traj, report] = solve_with_restarts(spec, guess, opts);

  if (!out.empty()) export_trajectory_csv(traj, spec, out);
  if (!svg.empty()) export_trajectory_svg(traj, spec, svg);

  std::printf("status: %s\n", report.converged ? "converged" : "failed");
  if (!report.converged && !report.failure_reason.empty())
    std::printf("reason: %s\n", report.failure_reason.c_str());
  std::printf("restarts: %d\n", report.restarts_used);
  std::printf("newton iterations: %d\n", report.newton_iterations);
  std::printf("residual estimate: %s\n", fmt6(report.max_rms_residual).c_str());
  std::printf("cost: %s\n", fmt17(report.final_cost).c_str());
  if (!out.empty()) std::printf("trajectory: %s\n", out.c_str());
  return report.converged ? 0 : 2;
}

int run_shoot(const std::string& scenario_path, const std::string& out,
              const std::string& guess_style, double sigma, int max_iter,
              double tol, double rtol, std::uint64_t seed, bool seed_given) {
  const ScenarioSpec spec = parse_scenario(scenario_path);
  Vec guess(spec.state_size(), 0.0);
  if (guess_style == "noise") {
    Rng rng(seed_given ? seed : spec.seed);
    for (double& g : guess) g = rng.gaussian(sigma);
  } else if (guess_style != "zero") {
    throw ParseError("unknown costate guess '" + guess_style + "'");
  }

  const ShootResult result = shoot(spec, guess, max_iter, tol, rtol);
  const char* status = result.status == ShootStatus::converged ? "converged"
                       : result.status == ShootStatus::diverged
                           ? "diverged"
                           : "max iterations";
  std::printf("status: %s\n", status);
  std::printf("iterations: %d\n", result.iterations);
  std::printf("terminal costate norm: %s\n",
              fmt6(result.terminal_costate_norm).c_str());
  if (!out.empty() && result.trajectory.size() > 0) {
    export_trajectory_csv(result.trajectory, spec, out);
    std::printf("trajectory: %s\n", out.c_str());
  }
  return result.converged ? 0 : 2;
}

LqrWeights parse_weights_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("weights: ") + e.what());
  }
  static const std::set<std::string> known = {"control_effort", "sheep_pos",
                                              "sheep_vel",      "dog_vel",
                                              "dog_pos",        "epsilon"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw ParseError("weights: unknown key '" + item.key() + "'");
  LqrWeights w;
  try {
    w.control_effort = j.value("control_effort", w.control_effort);
    w.sheep_pos = j.value("sheep_pos", w.sheep_pos);
    w.sheep_vel = j.value("sheep_vel", w.sheep_vel);
    w.dog_vel = j.value("dog_vel", w.dog_vel);
    w.dog_pos = j.value("dog_pos", w.dog_pos);
    w.epsilon = j.value("epsilon", w.epsilon);
  } catch (const json::exception& e) {
    throw ParseError(std::string("weights: ") + e.what());
  }
  return w;
}

int run_simulate_lqr(const std::string& scenario_path, const std::string& out,
                     const std::string& svg, const std::string& weights_path,
                     double rtol) {
  const ScenarioSpec spec = parse_scenario(scenario_path);
  const LqrWeights weights =
      weights_path.empty() ? LqrWeights{} : parse_weights_file(weights_path);

  ControllerCache cache;
  const auto [traj, report] = simulate_lqr(spec, weights, rtol, &cache);
  if (!out.empty()) export_trajectory_csv(traj, spec, out);
  if (!svg.empty()) export_trajectory_svg(traj, spec, svg);

  std::printf("steps: %zu\n", traj.size());
  std::printf("riccati solves: %d (failures: %d)\n", cache.care_solves,
              cache.care_failures);
  std::printf("cost: %s\n", fmt17(report.final_cost).c_str());
  if (!out.empty()) std::printf("trajectory: %s\n", out.c_str());
  return 0;
}

int run_eval_cost(const std::string& traj_path,
                  const std::string& scenario_path) {
  const ScenarioSpec spec = parse_scenario(scenario_path);
  const Trajectory traj = parse_trajectory_csv(traj_path, spec);
  std::printf("%s\n", fmt17(trajectory_cost(traj, spec)).c_str());
  return 0;
}

int run_check_gradients(const std::string& scenario_path, int samples,
                        std::uint64_t seed, bool seed_given) {
  const ScenarioSpec spec = parse_scenario(scenario_path);
  Rng rng(seed_given ? seed : spec.seed);

  double worst_interaction = 0.0;
  double worst_dynamics = 0.0;
  double worst_augmented = 0.0;

  for (int s = 0; s < samples; ++s) {
    Vec x(spec.dim);
    for (double& v : x) v = rng.uniform(-3.0, 3.0);
    const std::vector<Vec> origin_dog(1, Vec(spec.dim, 0.0));
    const auto phi = [&](const Vec& p) {
      return sheep_accel(p, origin_dog, spec.epsilon, spec.lambda);
    };
    worst_interaction = std::max(
        worst_interaction,
        max_relative_difference(
            interaction_jacobian(x, spec.epsilon, spec.lambda),
            finite_difference_jacobian(phi, x)));

    Vec state(spec.state_size());
    for (std::size_t k = 0; k < state.size(); ++k)
      state[k] = rng.uniform(-2.0, 2.0);
    Vec controls(spec.control_size());
    for (double& u : controls) u = rng.uniform(-1.0, 1.0);
    worst_dynamics = std::max(
        worst_dynamics,
        max_relative_difference(
            dynamics_jacobian(state, spec),
            finite_difference_jacobian(
                [&](const Vec& y) { return state_deriv(y, controls, spec); },
                state)));

    Vec aug(spec.augmented_size());
    for (std::size_t k = 0; k < aug.size(); ++k)
      aug[k] = rng.uniform(-2.0, 2.0);
    worst_augmented = std::max(
        worst_augmented,
        max_relative_difference(
            augmented_jacobian(aug, spec),
            finite_difference_jacobian(
                [&](const Vec& y) { return augmented_deriv(y, spec); },
                aug)));
  }

  std::printf("interaction jacobian max error: %s\n",
              fmt6(worst_interaction).c_str());
  std::printf("dynamics jacobian max error:    %s\n",
              fmt6(worst_dynamics).c_str());
  std::printf("augmented jacobian max error:   %s\n",
              fmt6(worst_augmented).c_str());
  const bool ok = worst_interaction <= 1e-5 && worst_dynamics <= 1e-5 &&
                  worst_augmented <= 1e-5;
  std::printf("%s\n", ok ? "all checks passed" : "CHECK FAILED");
  return ok ? 0 : 2;
}

int run_init_random(int dogs, int sheep, int dim, double dog_radius,
                    double sheep_radius, const std::string& velocities,
                    double sigma, std::uint64_t seed, bool seed_given,
                    const std::string& out) {
  VelocityMode mode;
  if (velocities == "zero")
    mode = VelocityMode::zero;
  else if (velocities == "gaussian")
    mode = VelocityMode::gaussian;
  else
    throw ParseError("velocities must be 'zero' or 'gaussian'");
  const ScenarioSpec spec =
      random_scenario(dogs, sheep, dim, dog_radius, sheep_radius, mode, sigma,
                      seed_given ? seed : env_seed());
  write_scenario(spec, out);
  std::printf("scenario: %s\n", out.c_str());
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"trajectory optimization for pursuit-driven herding"};
  app.require_subcommand(1);

  // solve-bvp
  auto* bvp_cmd =
      app.add_subcommand("solve-bvp", "solve the two-point BVP with collocation");
  std::string bvp_scenario, bvp_out = "trajectory.csv", bvp_svg,
              bvp_guess = "spiral";
  double bvp_rf = 5.0, bvp_sigma = 0.1;
  int bvp_nodes = 21;
  BvpOptions bvp_opts;
  std::uint64_t bvp_seed = 0;
  bvp_cmd->add_option("scenario", bvp_scenario, "scenario JSON file")
      ->required();
  bvp_cmd->add_option("--out", bvp_out, "trajectory CSV path");
  bvp_cmd->add_option("--svg", bvp_svg, "plot SVG path");
  bvp_cmd->add_option("--guess", bvp_guess, "zeros|noise|spiral");
  bvp_cmd->add_option("--target-radius", bvp_rf, "spiral end radius");
  bvp_cmd->add_option("--sigma", bvp_sigma, "noise guess deviation");
  bvp_cmd->add_option("--nodes", bvp_nodes, "guess node count");
  bvp_cmd->add_option("--tol", bvp_opts.residual_tol, "residual tolerance");
  bvp_cmd->add_option("--max-nodes", bvp_opts.max_nodes, "mesh size limit");
  bvp_cmd->add_option("--max-newton", bvp_opts.max_newton_iter,
                      "newton iterations per round");
  bvp_cmd->add_option("--max-restarts", bvp_opts.max_restarts,
                      "restart limit");
  auto* bvp_seed_opt =
      bvp_cmd->add_option("--seed", bvp_seed, "noise guess seed");

  // shoot
  auto* shoot_cmd =
      app.add_subcommand("shoot", "single shooting on the initial costate");
  std::string shoot_scenario, shoot_out = "shoot.csv", shoot_guess = "noise";
  double shoot_sigma = 1.0, shoot_tol = 1e-8, shoot_rtol = 1e-10;
  int shoot_max_iter = 30;
  std::uint64_t shoot_seed = 0;
  shoot_cmd->add_option("scenario", shoot_scenario, "scenario JSON file")
      ->required();
  shoot_cmd->add_option("--out", shoot_out, "trajectory CSV path");
  shoot_cmd->add_option("--guess", shoot_guess, "zero|noise");
  shoot_cmd->add_option("--sigma", shoot_sigma, "costate guess deviation");
  shoot_cmd->add_option("--max-iter", shoot_max_iter, "newton iterations");
  shoot_cmd->add_option("--tol", shoot_tol, "terminal costate tolerance");
  shoot_cmd->add_option("--rtol", shoot_rtol, "integration tolerance");
  auto* shoot_seed_opt =
      shoot_cmd->add_option("--seed", shoot_seed, "costate guess seed");

  // simulate-lqr
  auto* lqr_cmd = app.add_subcommand(
      "simulate-lqr", "closed-loop simulation with pointwise regulators");
  std::string lqr_scenario, lqr_out = "lqr.csv", lqr_svg, lqr_weights;
  double lqr_rtol = 1e-6;
  lqr_cmd->add_option("scenario", lqr_scenario, "scenario JSON file")
      ->required();
  lqr_cmd->add_option("--out", lqr_out, "trajectory CSV path");
  lqr_cmd->add_option("--svg", lqr_svg, "plot SVG path");
  lqr_cmd->add_option("--weights", lqr_weights, "weights JSON file");
  lqr_cmd->add_option("--rtol", lqr_rtol, "integration tolerance");

  // eval-cost
  auto* cost_cmd =
      app.add_subcommand("eval-cost", "integrate the running cost of a CSV");
  std::string cost_traj, cost_scenario;
  cost_cmd->add_option("trajectory", cost_traj, "trajectory CSV")->required();
  cost_cmd->add_option("scenario", cost_scenario, "scenario JSON file")
      ->required();

  // check-gradients
  auto* grad_cmd = app.add_subcommand(
      "check-gradients", "compare hand-written Jacobians to finite differences");
  std::string grad_scenario;
  int grad_samples = 20;
  std::uint64_t grad_seed = 0;
  grad_cmd->add_option("scenario", grad_scenario, "scenario JSON file")
      ->required();
  grad_cmd->add_option("--samples", grad_samples, "random states per check");
  auto* grad_seed_opt =
      grad_cmd->add_option("--seed", grad_seed, "sampling seed");

  // init-random
  auto* init_cmd = app.add_subcommand(
      "init-random", "write a scenario with agents on random circles");
  int init_dogs = 1, init_sheep = 0, init_dim = 2;
  double init_dog_radius = 2.0, init_sheep_radius = 1.0, init_sigma = 0.1;
  std::string init_velocities = "zero", init_out = "scenario.json";
  std::uint64_t init_seed = 0;
  init_cmd->add_option("dogs", init_dogs, "dog count")->required();
  init_cmd->add_option("sheep", init_sheep, "sheep count")->required();
  init_cmd->add_option("--dim", init_dim, "space dimension");
  init_cmd->add_option("--dog-radius", init_dog_radius, "dog circle radius");
  init_cmd->add_option("--sheep-radius", init_sheep_radius,
                       "sheep circle radius");
  init_cmd->add_option("--velocities", init_velocities, "zero|gaussian");
  init_cmd->add_option("--sigma", init_sigma, "velocity deviation");
  auto* init_seed_opt =
      init_cmd->add_option("--seed", init_seed, "placement seed");
  init_cmd->add_option("--out", init_out, "output scenario path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (bvp_cmd->parsed())
      return run_solve_bvp(bvp_scenario, bvp_out, bvp_svg, bvp_guess, bvp_rf,
                           bvp_sigma, bvp_nodes, bvp_opts, bvp_seed,
                           bvp_seed_opt->count() > 0);
    if (shoot_cmd->parsed())
      return run_shoot(shoot_scenario, shoot_out, shoot_guess, shoot_sigma,
                       shoot_max_iter, shoot_tol, shoot_rtol, shoot_seed,
                       shoot_seed_opt->count() > 0);
    if (lqr_cmd->parsed())
      return run_simulate_lqr(lqr_scenario, lqr_out, lqr_svg, lqr_weights,
                              lqr_rtol);
    if (cost_cmd->parsed()) return run_eval_cost(cost_traj, cost_scenario);
    if (grad_cmd->parsed())
      return run_check_gradients(grad_scenario, grad_samples, grad_seed,
                                 grad_seed_opt->count() > 0);
    if (init_cmd->parsed())
      return run_init_random(init_dogs, init_sheep, init_dim, init_dog_radius,
                             init_sheep_radius, init_velocities, init_sigma,
                             init_seed, init_seed_opt->count() > 0, init_out);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const MissingControlsError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 2;
  }
  return 1;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("herdopt");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace herdopt
