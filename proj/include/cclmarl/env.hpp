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

#ifndef CCLMARL_ENV_HPP_
#define CCLMARL_ENV_HPP_

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cclmarl/neural.hpp"
#include "cclmarl/rng.hpp"

namespace ccl {

using Vec2 = Eigen::Vector2d;

struct WorldExtent {
  double min_x = 0.0;
  double max_x = 1.0;
  double min_y = 0.0;
  double max_y = 1.0;
};

struct EnvObservations {
  std::vector<nn::Vector> team;
  std::vector<nn::Vector> adversary;
};

struct EnvStep {
  EnvObservations observations;
  // Environment reward for this step. Sparse environments report zero until
  // the terminal step, which carries the episode's team reward.
  double team_reward = 0.0;
  double adversary_reward = 0.0;
  bool done = false;
};

// Common surface the trainer drives. A cooperative team of team_size()
// agents plus at most one adversary; 2-D continuous actions.
class MultiAgentEnv {
 public:
  virtual ~MultiAgentEnv() = default;

  virtual std::string name() const = 0;
  virtual int team_size() const = 0;
  virtual int adversary_count() const { return 0; }
  virtual int team_observation_dim() const = 0;
  virtual int adversary_observation_dim() const { return 0; }
  virtual int action_dim() const { return 2; }
  virtual int episode_length() const = 0;

  virtual EnvObservations reset(Rng& rng) = 0;
  virtual EnvStep step(std::span<const nn::Vector> team_actions,
                       std::span<const nn::Vector> adversary_actions) = 0;

  // Saliency V for a team agent in the current state.
  virtual double saliency(int agent) const = 0;
  virtual std::vector<Vec2> team_positions() const = 0;
  virtual WorldExtent extent() const = 0;

  // A new, unreset instance with the same configuration.
  virtual std::unique_ptr<MultiAgentEnv> clone_fresh() const = 0;
};

}  // namespace ccl

#endif  // CCLMARL_ENV_HPP_
