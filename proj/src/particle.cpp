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

#include "cclmarl/particle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cclmarl/errors.hpp"

namespace ccl {

std::string to_string(ParticleScenario scenario) {
  switch (scenario) {
    case ParticleScenario::kPhysicalDeception: return "physical_deception";
    case ParticleScenario::kKeepAway: return "keep_away";
    case ParticleScenario::kPredatorPrey: return "predator_prey";
  }
  return "physical_deception";
}

ParticleScenario parse_particle_scenario(const std::string& text) {
  if (text == "physical_deception") return ParticleScenario::kPhysicalDeception;
  if (text == "keep_away") return ParticleScenario::kKeepAway;
  if (text == "predator_prey") return ParticleScenario::kPredatorPrey;
  throw ConfigError("unknown particle scenario '" + text + "'");
}

void ParticleConfig::validate() const {
  if (n_good < 1) throw ConfigError("particle: n_good must be >= 1");
  if (n_adv != 1) throw ConfigError("particle: exactly one adversary is supported");
  if (n_landmarks < 1) throw ConfigError("particle: n_landmarks must be >= 1");
  if (scenario != ParticleScenario::kPredatorPrey && n_landmarks < 2) {
    throw ConfigError("particle: deception and keep-away need two landmarks");
  }
  if (episode_length < 1) throw ConfigError("particle: episode_length must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("particle: dt must be positive");
  if (!(damping > 0.0) || damping >= 1.0) throw ConfigError("particle: damping must be in (0, 1)");
  if (!(observation_radius > 0.0)) throw ConfigError("particle: observation_radius must be positive");
  if (!(half_extent > 0.0)) throw ConfigError("particle: half_extent must be positive");
  if (!(contact_radius > 0.0)) throw ConfigError("particle: contact_radius must be positive");
  if (!(good_accel > 0.0) || !(adversary_accel > 0.0)) {
    throw ConfigError("particle: acceleration scales must be positive");
  }
  if (scenario == ParticleScenario::kPredatorPrey && !(good_accel < adversary_accel)) {
    throw ConfigError("particle: predator_prey requires good_accel < adversary_accel");
  }
}

ParticleConfig particle_preset(ParticleScenario scenario) {
  ParticleConfig config;
  config.scenario = scenario;
  if (scenario == ParticleScenario::kPredatorPrey) {
    config.good_accel = 0.8;
    config.adversary_accel = 1.0;
  }
  return config;
}

namespace {

bool has_target(const ParticleConfig& config) {
  return config.scenario != ParticleScenario::kPredatorPrey;
}

int base_observation_dim(const ParticleConfig& config) {
  const int entities = config.n_good + config.n_adv;
  return 4 + 2 * config.n_landmarks + 2 * (entities - 1);
}

void write_masked(nn::Vector& obs, int& at, const Vec2& delta, double radius) {
  const bool visible = delta.norm() <= radius;
  obs[at++] = visible ? delta.x() : 0.0;
  obs[at++] = visible ? delta.y() : 0.0;
}

}  // namespace

int particle_good_observation_dim(const ParticleConfig& config) {
  return base_observation_dim(config) + (has_target(config) ? 2 : 0);
}

int particle_adversary_observation_dim(const ParticleConfig& config) {
  return base_observation_dim(config);
}

ParticleObservations particle_observations(const ParticleConfig& config,
                                           const ParticleState& state) {
  ParticleObservations out;
  const int entities = config.n_good + config.n_adv;
  for (int e = 0; e < entities; ++e) {
    const bool good = e < config.n_good;
    const int dim = good ? particle_good_observation_dim(config)
                         : particle_adversary_observation_dim(config);
    nn::Vector obs = nn::Vector::Zero(dim);
    const Vec2& me = state.positions[static_cast<std::size_t>(e)];
    const Vec2& vel = state.velocities[static_cast<std::size_t>(e)];
    int at = 0;
    obs[at++] = vel.x();
    obs[at++] = vel.y();
    obs[at++] = me.x();
    obs[at++] = me.y();
    for (const auto& landmark : state.landmarks) {
      write_masked(obs, at, landmark - me, config.observation_radius);
    }
    for (int other = 0; other < entities; ++other) {
      if (other == e) continue;
      write_masked(obs, at, state.positions[static_cast<std::size_t>(other)] - me,
                   config.observation_radius);
    }
    if (good && has_target(config)) {
      const Vec2 delta = state.landmarks[static_cast<std::size_t>(state.target)] - me;
      obs[at++] = delta.x();
      obs[at++] = delta.y();
    }
    (good ? out.good : out.adversary).push_back(std::move(obs));
  }
  return out;
}

ParticleReset particle_reset(const ParticleConfig& config, Rng& rng) {
  config.validate();
  ParticleReset reset;
  auto& s = reset.state;
  const double h = config.half_extent;
  const int entities = config.n_good + config.n_adv;
  for (int e = 0; e < entities; ++e) {
    s.positions.emplace_back(rng.uniform(-h, h), rng.uniform(-h, h));
    s.velocities.emplace_back(0.0, 0.0);
  }
  for (int l = 0; l < config.n_landmarks; ++l) {
    s.landmarks.emplace_back(rng.uniform(-h, h), rng.uniform(-h, h));
  }
  s.target = has_target(config) ? static_cast<int>(rng.below(2)) : 0;
  reset.observations = particle_observations(config, s);
  return reset;
}

StepScores scenario_step_scores(const ParticleConfig& config, const ParticleState& state) {
  StepScores scores;
  const auto adv = static_cast<std::size_t>(config.n_good);
  switch (config.scenario) {
    case ParticleScenario::kPhysicalDeception: {
      const Vec2& target = state.landmarks[static_cast<std::size_t>(state.target)];
      double closest = std::numeric_limits<double>::infinity();
      for (int g = 0; g < config.n_good; ++g) {
        closest = std::min(closest, (state.positions[static_cast<std::size_t>(g)] - target).norm());
      }
      scores.good = -closest + (state.positions[adv] - target).norm();
      scores.adversary = -scores.good;
      break;
    }
    case ParticleScenario::kKeepAway: {
      const Vec2& target = state.landmarks[static_cast<std::size_t>(state.target)];
      double total = 0.0;
      for (int g = 0; g < config.n_good; ++g) {
        total += (state.positions[static_cast<std::size_t>(g)] - target).norm();
      }
      scores.good = -total / config.n_good;
      scores.adversary = -scores.good;
      break;
    }
    case ParticleScenario::kPredatorPrey: {
      for (int g = 0; g < config.n_good; ++g) {
        if ((state.positions[static_cast<std::size_t>(g)] - state.positions[adv]).norm() <
            config.contact_radius) {
          ++scores.contacts;
        }
      }
      scores.good = 10.0 * scores.contacts;
      scores.adversary = -10.0 * scores.contacts;
      break;
    }
  }
  return scores;
}

ParticleStepResult particle_step(const ParticleConfig& config, ParticleState& state,
                                 std::span<const nn::Vector> good_actions,
                                 std::span<const nn::Vector> adversary_actions) {
  if (static_cast<int>(good_actions.size()) != config.n_good ||
      static_cast<int>(adversary_actions.size()) != config.n_adv) {
    throw ConfigError("particle_step: wrong number of actions");
  }
  const double bound = config.soft_bound();
  const int entities = config.n_good + config.n_adv;
  for (int e = 0; e < entities; ++e) {
    const bool good = e < config.n_good;
    const nn::Vector& a = good ? good_actions[static_cast<std::size_t>(e)]
                               : adversary_actions[static_cast<std::size_t>(e - config.n_good)];
    if (a.size() != 2) throw ConfigError("particle_step: actions are 2-D");
    const Vec2 force(std::clamp(a[0], -1.0, 1.0), std::clamp(a[1], -1.0, 1.0));
    const double accel = good ? config.good_accel : config.adversary_accel;
    auto& v = state.velocities[static_cast<std::size_t>(e)];
    auto& p = state.positions[static_cast<std::size_t>(e)];
    v = v * (1.0 - config.damping) + accel * force * config.dt;
    p = (p + v * config.dt).cwiseMax(-bound).cwiseMin(bound);
  }
  const StepScores scores = scenario_step_scores(config, state);
  state.good_score_sum += scores.good;
  state.adversary_score_sum += scores.adversary;
  state.contacts += scores.contacts;
  ++state.timestep;
  return {particle_observations(config, state), state.timestep >= config.episode_length};
}

double particle_terminal_team_reward(const ParticleConfig& config, double accumulated_score) {
  return accumulated_score / static_cast<double>(config.episode_length);
}

ParticleEnv::ParticleEnv(ParticleConfig config) : config_(config) { config_.validate(); }

int ParticleEnv::team_observation_dim() const { return particle_good_observation_dim(config_); }

int ParticleEnv::adversary_observation_dim() const {
  return particle_adversary_observation_dim(config_);
}

EnvObservations ParticleEnv::reset(Rng& rng) {
  auto r = particle_reset(config_, rng);
  state_ = std::move(r.state);
  return {std::move(r.observations.good), std::move(r.observations.adversary)};
}

EnvStep ParticleEnv::step(std::span<const nn::Vector> team_actions,
                          std::span<const nn::Vector> adversary_actions) {
  auto r = particle_step(config_, state_, team_actions, adversary_actions);
  EnvStep out;
  out.observations = {std::move(r.observations.good), std::move(r.observations.adversary)};
  out.done = r.done;
  if (r.done) {
    out.team_reward = particle_terminal_team_reward(config_, state_.good_score_sum);
    out.adversary_reward = particle_terminal_team_reward(config_, state_.adversary_score_sum);
  }
  return out;
}

std::vector<Vec2> ParticleEnv::team_positions() const {
  return {state_.positions.begin(), state_.positions.begin() + config_.n_good};
}

WorldExtent ParticleEnv::extent() const {
  const double b = config_.soft_bound();
  return {-b, b, -b, b};
}

std::unique_ptr<MultiAgentEnv> ParticleEnv::clone_fresh() const {
  return std::make_unique<ParticleEnv>(config_);
}

}  // namespace ccl
