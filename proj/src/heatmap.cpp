// Copyright 2026 The cclmarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cclmarl/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "cclmarl/errors.hpp"

namespace ccl {

HeatmapGrid HeatmapGrid::empty(int grid, const WorldExtent& extent) {
  if (grid < 1) throw ConfigError("heatmap grid must be positive");
  HeatmapGrid h;
  h.grid = grid;
  h.extent = extent;
  h.cells = nn::Matrix::Zero(grid, grid);
  return h;
}

int heatmap_bin(double value, double lo, double hi, int grid) {
  const double scaled = (value - lo) / (hi - lo) * grid;
  if (!(scaled > 0.0)) return 0;
  return std::min(grid - 1, static_cast<int>(scaled));
}

void accumulate_rollouts(HeatmapGrid& heatmap, Controller& controller,
                         const MultiAgentEnv& prototype, int rollouts, std::uint64_t seed,
                         double weight) {
  std::unique_ptr<MultiAgentEnv> env = prototype.clone_fresh();
  Rng env_rng(derive_seed(seed, "heatmap_env"));
  std::vector<nn::Vector> team;
  std::vector<nn::Vector> adversary;
  const WorldExtent& x = heatmap.extent;
  for (int r = 0; r < rollouts; ++r) {
    EnvObservations obs = env->reset(env_rng);
    controller.begin_episode(*env, obs);
    for (int t = 0; t < env->episode_length(); ++t) {
      controller.act(*env, obs, team, adversary);
      EnvStep step = env->step(team, adversary);
      for (const Vec2& p : env->team_positions()) {
        const int col = heatmap_bin(p.x(), x.min_x, x.max_x, heatmap.grid);
        const int row = heatmap_bin(p.y(), x.min_y, x.max_y, heatmap.grid);
        heatmap.cells(row, col) += weight;
      }
      obs = std::move(step.observations);
      if (step.done) break;
    }
  }
}

HeatmapGrid heatmap_from_run(const std::filesystem::path& run_dir,
                             const std::vector<int>& iterations, int rollouts, int grid) {
  if (iterations.empty()) throw ConfigError("heatmap: no iterations requested");
  if (rollouts < 1) throw ConfigError("heatmap: rollouts must be positive");
  for (int it : iterations) {
    if (!std::filesystem::exists(checkpoint_path(run_dir, it))) {
      throw TrainingError("missing checkpoint for iteration " + std::to_string(it));
    }
  }
  HeatmapGrid heatmap;
  const double weight = 1.0 / (static_cast<double>(rollouts) * iterations.size());
  bool first = true;
  for (int it : iterations) {
    Trainer trainer = load_trainer(run_dir, it);
    if (first) {
      heatmap = HeatmapGrid::empty(grid, trainer.env().extent());
      first = false;
    }
    const std::uint64_t seed =
        derive_seed(trainer.config().train.seed, "heatmap", static_cast<std::uint64_t>(it));
    Rng sampler(derive_seed(seed, "heatmap_sample"));
    PolicyController controller(trainer.policies(), &sampler);
    accumulate_rollouts(heatmap, controller, trainer.env(), rollouts, seed, weight);
  }
  heatmap.iterations = iterations;
  heatmap.rollouts = rollouts;
  return heatmap;
}

void write_heatmap_csv(std::ostream& out, const HeatmapGrid& h) {
  char buf[128];
  out << "# grid=" << h.grid << "\n";
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", h.extent.min_x, h.extent.max_x,
                h.extent.min_y, h.extent.max_y);
  out << "# extent=" << buf << "\n";
  out << "# iterations=";
  for (std::size_t i = 0; i < h.iterations.size(); ++i) out << (i ? ";" : "") << h.iterations[i];
  out << "\n# rollouts=" << h.rollouts << "\n";
  for (Eigen::Index r = 0; r < h.cells.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.cells.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", h.cells(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

namespace {

std::vector<double> split_doubles(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    out.push_back(std::strtod(item.c_str(), nullptr));
  }
  return out;
}

}  // namespace

HeatmapGrid read_heatmap_csv(std::istream& in) {
  HeatmapGrid h;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "grid") {
        h.grid = std::stoi(value);
      } else if (key == "extent") {
        const auto v = split_doubles(value, ',');
        if (v.size() != 4) throw ConfigError("heatmap csv: bad extent");
        h.extent = {v[0], v[1], v[2], v[3]};
      } else if (key == "iterations") {
        for (double d : split_doubles(value, ';')) h.iterations.push_back(static_cast<int>(d));
      } else if (key == "rollouts") {
        h.rollouts = std::stoi(value);
      }
      continue;
    }
    rows.push_back(split_doubles(line, ','));
  }
  if (static_cast<int>(rows.size()) != h.grid) throw ConfigError("heatmap csv: row count");
  h.cells.resize(h.grid, h.grid);
  for (int r = 0; r < h.grid; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != h.grid) {
      throw ConfigError("heatmap csv: column count");
    }
    for (int c = 0; c < h.grid; ++c) h.cells(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return h;
}

namespace {

// Dark blue through teal to yellow.
std::string ramp(double u) {
  static const double stops[][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(u));
  const double f = u - i;
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k) {
    rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

std::string render_heatmap_svg(const HeatmapGrid& h) {
  const int cell = 10;
  const int size = h.grid * cell;
  const double peak = h.cells.size() > 0 ? h.cells.maxCoeff() : 0.0;
  std::string svg;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                size, size, size, size);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"" + ramp(0.0) + "\"/>\n";
  for (int r = 0; r < h.grid; ++r) {
    for (int c = 0; c < h.grid; ++c) {
      const double v = h.cells(r, c);
      if (v <= 0.0) continue;
      // Square-root scaling keeps faint trails visible next to dense spots.
      const double u = peak > 0.0 ? std::sqrt(v / peak) : 0.0;
      std::snprintf(buf, sizeof buf, "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\"/>\n",
                    c * cell, (h.grid - 1 - r) * cell, cell, cell, ramp(u).c_str());
      svg += buf;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace ccl
