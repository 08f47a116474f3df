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

#ifndef CCLMARL_PARTICLE_HPP_
#define CCLMARL_PARTICLE_HPP_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cclmarl/env.hpp"

namespace ccl {

enum class ParticleScenario { kPhysicalDeception, kKeepAway, kPredatorPrey };

std::string to_string(ParticleScenario scenario);
ParticleScenario parse_particle_scenario(const std::string& text);

struct ParticleConfig {
  ParticleScenario scenario = ParticleScenario::kPhysicalDeception;
  int n_good = 3;
  int n_adv = 1;
  int n_landmarks = 2;
  int episode_length = 80;
  double dt = 0.1;
  double damping = 0.25;
  double observation_radius = 1.0;
  double half_extent = 1.0;
  double contact_radius = 0.15;
  double good_accel = 1.0;
  double adversary_accel = 1.0;

  void validate() const;
  // Positions are clamped to this bound on every axis.
  double soft_bound() const { return 2.0 * half_extent; }
};

// Paper-shaped defaults for a scenario (3 good agents, 1 adversary; the
// predator-prey team is slower than the adversary).
ParticleConfig particle_preset(ParticleScenario scenario);

struct ParticleState {
  // Good agents first, then the adversary.
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  std::vector<Vec2> landmarks;
  int target = 0;
  double good_score_sum = 0.0;
  double adversary_score_sum = 0.0;
  int contacts = 0;
  int timestep = 0;
};

struct ParticleObservations {
  std::vector<nn::Vector> good;
  std::vector<nn::Vector> adversary;
};

int particle_good_observation_dim(const ParticleConfig& config);
int particle_adversary_observation_dim(const ParticleConfig& config);

// Own velocity, own position, then landmark and other-entity offsets. Offsets
// of anything farther than observation_radius are zero. Good agents in
// deception and keep-away additionally see the target offset unmasked.
ParticleObservations particle_observations(const ParticleConfig& config,
                                           const ParticleState& state);

struct ParticleReset {
  ParticleState state;
  ParticleObservations observations;
};

ParticleReset particle_reset(const ParticleConfig& config, Rng& rng);

struct StepScores {
  double good = 0.0;
  double adversary = 0.0;
  int contacts = 0;
};

StepScores scenario_step_scores(const ParticleConfig& config, const ParticleState& state);

struct ParticleStepResult {
  ParticleObservations observations;
  bool done = false;
};

// Force control with damping and semi-implicit Euler integration:
// v' = v (1 - damping) + accel * force * dt, p' = p + v' dt.
ParticleStepResult particle_step(const ParticleConfig& config, ParticleState& state,
                                 std::span<const nn::Vector> good_actions,
                                 std::span<const nn::Vector> adversary_actions);

// Accumulated per-step score averaged over the episode length.
double particle_terminal_team_reward(const ParticleConfig& config, double accumulated_score);

class ParticleEnv : public MultiAgentEnv {
 public:
  explicit ParticleEnv(ParticleConfig config);

  std::string name() const override { return to_string(config_.scenario); }
  int team_size() const override { return config_.n_good; }
  int adversary_count() const override { return config_.n_adv; }
  int team_observation_dim() const override;
  int adversary_observation_dim() const override;
  int episode_length() const override { return config_.episode_length; }

  EnvObservations reset(Rng& rng) override;
  EnvStep step(std::span<const nn::Vector> team_actions,
               std::span<const nn::Vector> adversary_actions) override;

  double saliency(int /*agent*/) const override { return 1.0; }
  std::vector<Vec2> team_positions() const override;
  WorldExtent extent() const override;
  std::unique_ptr<MultiAgentEnv> clone_fresh() const override;

  const ParticleConfig& config() const { return config_; }
  const ParticleState& state() const { return state_; }

 private:
  ParticleConfig config_;
  ParticleState state_;
};

}  // namespace ccl

#endif  // CCLMARL_PARTICLE_HPP_
