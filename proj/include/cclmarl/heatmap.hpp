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

#ifndef CCLMARL_HEATMAP_HPP_
#define CCLMARL_HEATMAP_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cclmarl/env.hpp"
#include "cclmarl/trainer.hpp"

namespace ccl {

// Occupancy over the world extent. Row 0 is the lowest y band, column 0 the
// lowest x band. Values are mean agent-step counts per rollout.
struct HeatmapGrid {
  int grid = 50;
  WorldExtent extent;
  std::vector<int> iterations;
  int rollouts = 0;
  nn::Matrix cells;

  static HeatmapGrid empty(int grid, const WorldExtent& extent);
  double total() const { return cells.sum(); }
};

// Cell index of a coordinate; points on or past the upper edge land in the
// last cell.
int heatmap_bin(double value, double lo, double hi, int grid);

// Runs `rollouts` stochastic episodes and adds every team position after
// each step with the given weight.
void accumulate_rollouts(HeatmapGrid& heatmap, Controller& controller,
                         const MultiAgentEnv& prototype, int rollouts, std::uint64_t seed,
                         double weight);

// Loads each requested checkpoint of a run and averages its rollouts.
HeatmapGrid heatmap_from_run(const std::filesystem::path& run_dir, const std::vector<int>& iterations,
                             int rollouts, int grid);

void write_heatmap_csv(std::ostream& out, const HeatmapGrid& heatmap);
HeatmapGrid read_heatmap_csv(std::istream& in);

// Rendering depends only on the matrix and its metadata.
std::string render_heatmap_svg(const HeatmapGrid& heatmap);

}  // namespace ccl

#endif  // CCLMARL_HEATMAP_HPP_
