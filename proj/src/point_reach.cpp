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

#include "cclmarl/point_reach.hpp"

#include <algorithm>

#include "cclmarl/errors.hpp"

namespace ccl {

void PointReachConfig::validate() const {
  if (episode_length < 1) throw ConfigError("point_reach: episode_length must be >= 1");
  if (!(start_extent > 0.0)) throw ConfigError("point_reach: start_extent must be positive");
  if (!(max_step > 0.0)) throw ConfigError("point_reach: max_step must be positive");
}

PointReachEnv::PointReachEnv(PointReachConfig config) : config_(config) { config_.validate(); }

EnvObservations PointReachEnv::reset(Rng& rng) {
  const double e = config_.start_extent;
  position_ = Vec2(rng.uniform(-e, e), rng.uniform(-e, e));
  timestep_ = 0;
  return {{nn::Vector(position_)}, {}};
}

EnvStep PointReachEnv::step(std::span<const nn::Vector> team_actions,
                            std::span<const nn::Vector> /*adversary_actions*/) {
  if (team_actions.size() != 1 || team_actions[0].size() != 2) {
    throw ConfigError("point_reach: expects one 2-D action");
  }
  const auto& a = team_actions[0];
  position_ += config_.max_step * Vec2(std::clamp(a[0], -1.0, 1.0), std::clamp(a[1], -1.0, 1.0));
  ++timestep_;
  EnvStep out;
  out.observations.team = {nn::Vector(position_)};
  out.team_reward = -position_.norm();
  out.done = timestep_ >= config_.episode_length;
  return out;
}

WorldExtent PointReachEnv::extent() const {
  const double b = 2.0 * config_.start_extent;
  return {-b, b, -b, b};
}

std::unique_ptr<MultiAgentEnv> PointReachEnv::clone_fresh() const {
  return std::make_unique<PointReachEnv>(config_);
}

nn::Vector point_reach_optimal_action(const PointReachConfig& config, const Vec2& position) {
  nn::Vector a(2);
  a[0] = std::clamp(-position.x() / config.max_step, -1.0, 1.0);
  a[1] = std::clamp(-position.y() / config.max_step, -1.0, 1.0);
  return a;
}

}  // namespace ccl
