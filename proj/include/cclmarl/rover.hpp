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

#ifndef CCLMARL_ROVER_HPP_
#define CCLMARL_ROVER_HPP_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cclmarl/env.hpp"

namespace ccl {

struct Poi {
  Vec2 position{0.0, 0.0};
  double value = 1.0;
  double observation_radius = 4.0;
  int coupling = 1;
};

struct RoverConfig {
  int n_agents = 3;
  double world_size = 30.0;
  std::vector<Poi> pois;
  int episode_length = 50;
  double max_step = 1.0;
  double spawn_radius = 2.0;

  void validate() const;
  Vec2 center() const { return {0.5 * world_size, 0.5 * world_size}; }
};

// Two POIs near opposite walls.
RoverConfig rover_two_poi_preset(int n_agents, int coupling);
// A single POI near one wall.
RoverConfig rover_one_poi_preset(int n_agents, int coupling);

struct RoverState {
  std::vector<Vec2> positions;
  std::vector<bool> observed;
  int timestep = 0;
};

inline constexpr int kRoverObservationDim = 8;
inline constexpr double kRoverSensorClip = 10.0;

// Quadrant densities: 4 POI readings then 4 rover readings. Each reading sums
// value / max(distance^2, 0.001) over entities in the quadrant, clipped to
// [0, 10]. Quadrant q covers angles [q*90, (q+1)*90) degrees.
std::vector<nn::Vector> rover_observations(const RoverConfig& config, const RoverState& state);

struct RoverReset {
  RoverState state;
  std::vector<nn::Vector> observations;
};

RoverReset rover_reset(const RoverConfig& config, Rng& rng);

struct RoverStepResult {
  std::vector<nn::Vector> observations;
  bool done = false;
};

// Moves every agent by its per-axis clamped action, clips to the world, then
// runs the simultaneity check for every POI.
RoverStepResult rover_step(const RoverConfig& config, RoverState& state,
                           std::span<const nn::Vector> joint_action);

// True once at least `coupling` agents sit strictly inside the POI radius at
// the same step; stays true for the rest of the episode.
bool poi_simultaneity_check(const RoverConfig& config, const RoverState& state, int poi);

// Observed POI value over total POI value.
double rover_team_reward(const RoverConfig& config, const RoverState& state);

// Largest value among POIs whose radius contains the agent, else 0.
double rover_saliency(const RoverConfig& config, const RoverState& state, int agent);

class RoverEnv : public MultiAgentEnv {
 public:
  explicit RoverEnv(RoverConfig config);

  std::string name() const override { return "rover"; }
  int team_size() const override { return config_.n_agents; }
  int team_observation_dim() const override { return kRoverObservationDim; }
  int episode_length() const override { return config_.episode_length; }

  EnvObservations reset(Rng& rng) override;
  EnvStep step(std::span<const nn::Vector> team_actions,
               std::span<const nn::Vector> adversary_actions) override;

  double saliency(int agent) const override;
  std::vector<Vec2> team_positions() const override { return state_.positions; }
  WorldExtent extent() const override;
  std::unique_ptr<MultiAgentEnv> clone_fresh() const override;

  const RoverConfig& config() const { return config_; }
  const RoverState& state() const { return state_; }
  RoverState& mutable_state() { return state_; }

 private:
  RoverConfig config_;
  RoverState state_;
};

}  // namespace ccl

#endif  // CCLMARL_ROVER_HPP_
