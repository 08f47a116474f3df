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

#include "cclmarl/rover.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cclmarl/errors.hpp"

namespace ccl {

void RoverConfig::validate() const {
  if (n_agents < 1) throw ConfigError("rover: n_agents must be >= 1");
  if (!(world_size > 0.0)) throw ConfigError("rover: world_size must be positive");
  if (episode_length < 1) throw ConfigError("rover: episode_length must be >= 1");
  if (!(max_step > 0.0)) throw ConfigError("rover: max_step must be positive");
  if (!(spawn_radius >= 0.0) || spawn_radius > 0.5 * world_size) {
    throw ConfigError("rover: spawn_radius must lie in [0, world_size / 2]");
  }
  for (std::size_t p = 0; p < pois.size(); ++p) {
    const auto& poi = pois[p];
    const std::string tag = "rover: poi " + std::to_string(p);
    if (poi.coupling < 1) throw ConfigError(tag + " coupling must be >= 1");
    if (!(poi.value > 0.0)) throw ConfigError(tag + " value must be positive");
    if (!(poi.observation_radius > 0.0)) throw ConfigError(tag + " radius must be positive");
    if (poi.position.x() < 0.0 || poi.position.x() > world_size || poi.position.y() < 0.0 ||
        poi.position.y() > world_size) {
      throw ConfigError(tag + " lies outside the world");
    }
  }
}

RoverConfig rover_two_poi_preset(int n_agents, int coupling) {
  RoverConfig config;
  config.n_agents = n_agents;
  const double mid = 0.5 * config.world_size;
  config.pois = {Poi{{4.0, mid}, 1.0, 4.0, coupling}, Poi{{config.world_size - 4.0, mid}, 1.0, 4.0, coupling}};
  return config;
}

RoverConfig rover_one_poi_preset(int n_agents, int coupling) {
  RoverConfig config;
  config.n_agents = n_agents;
  const double mid = 0.5 * config.world_size;
  config.pois = {Poi{{config.world_size - 4.0, mid}, 1.0, 4.0, coupling}};
  return config;
}

namespace {

int quadrant(const Vec2& delta) {
  double angle = std::atan2(delta.y(), delta.x());
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  const int q = static_cast<int>(angle / (0.5 * std::numbers::pi));
  return std::clamp(q, 0, 3);
}

double density_term(double value, const Vec2& delta) {
  return value / std::max(delta.squaredNorm(), 0.001);
}

bool inside(const Poi& poi, const Vec2& position) {
  return (position - poi.position).norm() < poi.observation_radius;
}

}  // namespace

std::vector<nn::Vector> rover_observations(const RoverConfig& config, const RoverState& state) {
  const auto n = static_cast<std::size_t>(config.n_agents);
  std::vector<nn::Vector> out(n, nn::Vector::Zero(kRoverObservationDim));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& me = state.positions[i];
    for (const auto& poi : config.pois) {
      const Vec2 delta = poi.position - me;
      out[i][quadrant(delta)] += density_term(poi.value, delta);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec2 delta = state.positions[j] - me;
      out[i][4 + quadrant(delta)] += density_term(1.0, delta);
    }
    out[i] = out[i].cwiseMin(kRoverSensorClip).cwiseMax(0.0);
  }
  return out;
}

RoverReset rover_reset(const RoverConfig& config, Rng& rng) {
  config.validate();
  RoverReset reset;
  const Vec2 center = config.center();
  for (int i = 0; i < config.n_agents; ++i) {
    const double r = config.spawn_radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    reset.state.positions.push_back(center + r * Vec2(std::cos(theta), std::sin(theta)));
  }
  reset.state.observed.assign(config.pois.size(), false);
  reset.state.timestep = 0;
  reset.observations = rover_observations(config, reset.state);
  return reset;
}

bool poi_simultaneity_check(const RoverConfig& config, const RoverState& state, int poi) {
  const auto p = static_cast<std::size_t>(poi);
  if (state.observed.at(p)) return true;
  int count = 0;
  for (const auto& position : state.positions) {
    if (inside(config.pois[p], position)) ++count;
  }
  return count >= config.pois[p].coupling;
}

RoverStepResult rover_step(const RoverConfig& config, RoverState& state,
                           std::span<const nn::Vector> joint_action) {
  if (joint_action.size() != state.positions.size()) {
    throw ConfigError("rover_step: expected one action per agent");
  }
  for (std::size_t i = 0; i < joint_action.size(); ++i) {
    const auto& a = joint_action[i];
    if (a.size() != 2) throw ConfigError("rover_step: actions are 2-D");
    Vec2 move(std::clamp(a[0], -config.max_step, config.max_step),
              std::clamp(a[1], -config.max_step, config.max_step));
    if (!move.allFinite()) throw ConfigError("rover_step: non-finite action");
    Vec2& pos = state.positions[i];
    pos = (pos + move).cwiseMax(0.0).cwiseMin(config.world_size);
  }
  for (std::size_t p = 0; p < config.pois.size(); ++p) {
    state.observed[p] = poi_simultaneity_check(config, state, static_cast<int>(p));
  }
  ++state.timestep;
  return {rover_observations(config, state), state.timestep >= config.episode_length};
}

double rover_team_reward(const RoverConfig& config, const RoverState& state) {
  double total = 0.0;
  double seen = 0.0;
  for (std::size_t p = 0; p < config.pois.size(); ++p) {
    total += config.pois[p].value;
    if (state.observed[p]) seen += config.pois[p].value;
  }
  return total > 0.0 ? seen / total : 0.0;
}

double rover_saliency(const RoverConfig& config, const RoverState& state, int agent) {
  double best = 0.0;
  const Vec2& pos = state.positions.at(static_cast<std::size_t>(agent));
  for (const auto& poi : config.pois) {
    if (inside(poi, pos)) best = std::max(best, poi.value);
  }
  return best;
}

RoverEnv::RoverEnv(RoverConfig config) : config_(std::move(config)) { config_.validate(); }

EnvObservations RoverEnv::reset(Rng& rng) {
  auto r = rover_reset(config_, rng);
  state_ = std::move(r.state);
  return {std::move(r.observations), {}};
}

EnvStep RoverEnv::step(std::span<const nn::Vector> team_actions,
                       std::span<const nn::Vector> /*adversary_actions*/) {
  auto r = rover_step(config_, state_, team_actions);
  EnvStep out;
  out.observations.team = std::move(r.observations);
  out.done = r.done;
  out.team_reward = r.done ? rover_team_reward(config_, state_) : 0.0;
  return out;
}

double RoverEnv::saliency(int agent) const { return rover_saliency(config_, state_, agent); }

WorldExtent RoverEnv::extent() const { return {0.0, config_.world_size, 0.0, config_.world_size}; }

std::unique_ptr<MultiAgentEnv> RoverEnv::clone_fresh() const {
  return std::make_unique<RoverEnv>(config_);
}

}  // namespace ccl
