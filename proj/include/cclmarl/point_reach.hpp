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

#ifndef CCLMARL_POINT_REACH_HPP_
#define CCLMARL_POINT_REACH_HPP_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cclmarl/env.hpp"

namespace ccl {

// Single agent, goal at the origin, dense reward -|p| every step. Used as a
// sanity task for the learner.
struct PointReachConfig {
  int episode_length = 50;
  double start_extent = 1.0;  // start uniform in [-extent, extent]^2
  double max_step = 0.1;      // per-axis displacement bound
  void validate() const;
};

class PointReachEnv : public MultiAgentEnv {
 public:
  explicit PointReachEnv(PointReachConfig config);

  std::string name() const override { return "point_reach"; }
  int team_size() const override { return 1; }
  int team_observation_dim() const override { return 2; }
  int episode_length() const override { return config_.episode_length; }

  EnvObservations reset(Rng& rng) override;
  EnvStep step(std::span<const nn::Vector> team_actions,
               std::span<const nn::Vector> adversary_actions) override;

  double saliency(int /*agent*/) const override { return 1.0; }
  std::vector<Vec2> team_positions() const override { return {position_}; }
  WorldExtent extent() const override;
  std::unique_ptr<MultiAgentEnv> clone_fresh() const override;

  const PointReachConfig& config() const { return config_; }
  const Vec2& position() const { return position_; }

 private:
  PointReachConfig config_;
  Vec2 position_{0.0, 0.0};
  int timestep_ = 0;
};

// Greedy per-axis move toward the origin at full speed, in action units.
nn::Vector point_reach_optimal_action(const PointReachConfig& config, const Vec2& position);

}  // namespace ccl

#endif  // CCLMARL_POINT_REACH_HPP_
