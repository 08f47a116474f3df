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

#include <doctest.h>

#include <sstream>

#include "cclmarl/config.hpp"
#include "cclmarl/heatmap.hpp"
#include "cclmarl/rover.hpp"
#include "cclmarl/trainer.hpp"
#include "scripted.hpp"

using namespace ccl;
namespace fs = std::filesystem;

TEST_CASE("heatmap: binning edges") {
  CHECK(heatmap_bin(0.0, 0.0, 30.0, 50) == 0);
  CHECK(heatmap_bin(0.6, 0.0, 30.0, 50) == 1);
  CHECK(heatmap_bin(0.5999, 0.0, 30.0, 50) == 0);
  CHECK(heatmap_bin(30.0, 0.0, 30.0, 50) == 49);
  CHECK(heatmap_bin(-1.0, 0.0, 30.0, 50) == 0);
  CHECK(heatmap_bin(31.0, 0.0, 30.0, 50) == 49);
}

TEST_CASE("heatmap: a single stationary agent puts all its mass in one cell") {
  RoverConfig c = rover_one_poi_preset(1, 1);
  c.spawn_radius = 0.0;
  RoverEnv env(c);
  testing::StationaryController still;
  HeatmapGrid h = HeatmapGrid::empty(50, env.extent());
  accumulate_rollouts(h, still, env, 4, 9, 0.25);
  const int cell = heatmap_bin(c.center().x(), 0.0, c.world_size, 50);
  CHECK(h.cells(cell, cell) == doctest::Approx(c.episode_length).epsilon(1e-15));
  CHECK(h.total() == doctest::Approx(c.episode_length).epsilon(1e-15));
  int nonzero = 0;
  for (double v : h.cells.reshaped()) nonzero += v != 0.0;
  CHECK(nonzero == 1);
}

TEST_CASE("heatmap: counting identity for random walkers") {
  const RoverConfig c = rover_one_poi_preset(3, 2);
  RoverEnv env(c);
  testing::RandomController walk(5);
  HeatmapGrid h = HeatmapGrid::empty(50, env.extent());
  accumulate_rollouts(h, walk, env, 6, 10, 1.0 / 6.0);
  CHECK(std::abs(h.total() - 50.0 * 3.0) < 1e-9);
  CHECK(h.cells.minCoeff() >= 0.0);
}

TEST_CASE("heatmap: CSV round trip is bitwise and SVG depends only on the matrix") {
  const RoverConfig c = rover_one_poi_preset(3, 2);
  RoverEnv env(c);
  testing::RandomController walk(6);
  HeatmapGrid h = HeatmapGrid::empty(20, env.extent());
  accumulate_rollouts(h, walk, env, 3, 11, 1.0 / 3.0);
  h.iterations = {4, 8};
  h.rollouts = 3;
  std::stringstream csv;
  write_heatmap_csv(csv, h);
  const HeatmapGrid back = read_heatmap_csv(csv);
  CHECK(back.grid == 20);
  CHECK(back.iterations == h.iterations);
  CHECK(back.rollouts == 3);
  CHECK(back.cells == h.cells);
  CHECK(render_heatmap_svg(back) == render_heatmap_svg(h));
  const std::string svg = render_heatmap_svg(h);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("heatmap: from checkpoints of a run") {
  const fs::path dir = fs::temp_directory_path() / "cclmarl_heatmap_run";
  fs::remove_all(dir);
  train(parse_config_json(nlohmann::json::object(),
                          {"hidden_sizes=[8,8]", "rollout_steps=50", "eval_episodes=1", "iterations=2",
                           "checkpoint_every=1", "epochs=1", "train.output_dir=\"" + dir.string() + "\""}));
  const HeatmapGrid h = heatmap_from_run(dir, {1, 2}, 5, 50);
  CHECK(std::abs(h.total() - 150.0) < 1e-9);
  CHECK(h.iterations == std::vector<int>{1, 2});
  const HeatmapGrid again = heatmap_from_run(dir, {1, 2}, 5, 50);
  CHECK(again.cells == h.cells);
  CHECK_THROWS(heatmap_from_run(dir, {7}, 5, 50));
  fs::remove_all(dir);
}
