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

#ifndef CCLMARL_CONFIG_HPP_
#define CCLMARL_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cclmarl/env.hpp"
#include "cclmarl/intrinsic.hpp"
#include "cclmarl/particle.hpp"
#include "cclmarl/point_reach.hpp"
#include "cclmarl/rover.hpp"

namespace ccl {

struct RoverSettings {
  std::string preset = "one_poi";  // one_poi | two_poi
  int n_agents = 3;
  int coupling = 2;
  double world_size = 30.0;
  double observation_radius = 4.0;
  double poi_wall_offset = 4.0;  // POI distance from its wall
  double max_step = 1.0;
  double spawn_radius = 2.0;
  int episode_length = 50;

  RoverConfig to_config() const;
};

struct ParticleSettings {
  std::string scenario = "physical_deception";
  int episode_length = 80;
  double dt = 0.1;
  double damping = 0.25;
  double observation_radius = 1.0;
  double half_extent = 1.0;
  double contact_radius = 0.15;

  ParticleConfig to_config() const;
};

struct EnvSettings {
  std::string kind = "rover";  // rover | particle | point_reach
  RoverSettings rover;
  ParticleSettings particle;
  PointReachConfig point_reach;
};

struct EncoderSettings {
  // One encoder for all teammates (they share an observation space).
  bool shared = true;
};

struct IntrinsicSettings {
  std::string mode = "ccl";
  double alpha = 0.5;
  double beta = 1.0;
  double cap = 5.0;
  std::vector<int> k_set{3, 5, 7};
  std::string saliency_mode = "auto";  // auto | poi_gated | constant_one
  bool average_before_shaping = true;

  IntrinsicConfig to_config(const std::string& env_kind) const;
};

struct PpoHyper {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  int epochs = 10;
  double entropy_coef = 0.01;
  double max_grad_norm = 1.0;
  int minibatch_size = 32;  // steps, rounded to whole episodes (at least one)
  int rollout_steps = 1200;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  std::vector<int> hidden_sizes{128, 128};
  double init_log_std = 0.01;
  bool normalize_advantages = true;
  bool clip_value_loss = true;

  void validate() const;
};

struct TrainSettings {
  int iterations = 400;
  std::uint64_t seed = 0;
  int eval_episodes = 20;
  int checkpoint_every = 10;
  std::string output_dir = "runs/default";
  // Record CCL diagnostics for the first episode of every iteration.
  bool diagnostics = true;
};

struct RunConfig {
  EnvSettings env;
  EncoderSettings encoder;
  IntrinsicSettings intrinsic;
  PpoHyper ppo;
  TrainSettings train;

  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

// Defaults as a JSON document (the reference for key names and types).
nlohmann::json default_config_json();

// Merges `layer` into `base`, rejecting keys absent from `base` and values
// whose JSON type differs from the default. `where` prefixes error messages.
void merge_strict(nlohmann::json& base, const nlohmann::json& layer, const std::string& where);

// Applies "key=value" overrides. Keys are dotted paths ("intrinsic.alpha") or
// a leaf name that is unique across sections ("alpha").
void apply_overrides(nlohmann::json& config, const std::vector<std::string>& overrides);

// defaults < file < overrides. An empty path means no file.
RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);
RunConfig parse_config_json(const nlohmann::json& file_layer,
                            const std::vector<std::string>& overrides);

std::unique_ptr<MultiAgentEnv> make_env(const RunConfig& config);

// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const RunConfig& config);

// Relative output paths resolve against $CCL_OUTPUT_ROOT when it is set.
std::filesystem::path resolve_output_dir(const std::string& dir);

}  // namespace ccl

#endif  // CCLMARL_CONFIG_HPP_
