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

#include "cclmarl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "cclmarl/errors.hpp"

namespace ccl {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RoverSettings, preset, n_agents, coupling, world_size,
                                   observation_radius, poi_wall_offset, max_step, spawn_radius,
                                   episode_length)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ParticleSettings, scenario, episode_length, dt, damping,
                                   observation_radius, half_extent, contact_radius)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PointReachConfig, episode_length, start_extent, max_step)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EnvSettings, kind, rover, particle, point_reach)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EncoderSettings, shared)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(IntrinsicSettings, mode, alpha, beta, cap, k_set, saliency_mode,
                                   average_before_shaping)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PpoHyper, gamma, gae_lambda, clip, epochs, entropy_coef,
                                   max_grad_norm, minibatch_size, rollout_steps, actor_lr,
                                   critic_lr, hidden_sizes, init_log_std, normalize_advantages,
                                   clip_value_loss)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrainSettings, iterations, seed, eval_episodes,
                                   checkpoint_every, output_dir, diagnostics)

void to_json(json& j, const RunConfig& c) {
  j = json{{"env", c.env},
           {"encoder", c.encoder},
           {"intrinsic", c.intrinsic},
           {"ppo", c.ppo},
           {"train", c.train}};
}

void from_json(const json& j, RunConfig& c) {
  j.at("env").get_to(c.env);
  j.at("encoder").get_to(c.encoder);
  j.at("intrinsic").get_to(c.intrinsic);
  j.at("ppo").get_to(c.ppo);
  j.at("train").get_to(c.train);
}

RoverConfig RoverSettings::to_config() const {
  RoverConfig config;
  if (preset == "one_poi") {
    config = rover_one_poi_preset(n_agents, coupling);
  } else if (preset == "two_poi") {
    config = rover_two_poi_preset(n_agents, coupling);
  } else {
    throw ConfigError("env.rover.preset: unknown preset '" + preset + "'");
  }
  config.world_size = world_size;
  config.max_step = max_step;
  config.spawn_radius = spawn_radius;
  config.episode_length = episode_length;
  const double mid = 0.5 * world_size;
  if (preset == "one_poi") {
    config.pois[0].position = Vec2(world_size - poi_wall_offset, mid);
  } else {
    config.pois[0].position = Vec2(poi_wall_offset, mid);
    config.pois[1].position = Vec2(world_size - poi_wall_offset, mid);
  }
  for (auto& poi : config.pois) poi.observation_radius = observation_radius;
  config.validate();
  return config;
}

ParticleConfig ParticleSettings::to_config() const {
  ParticleConfig config = particle_preset(parse_particle_scenario(scenario));
  config.episode_length = episode_length;
  config.dt = dt;
  config.damping = damping;
  config.observation_radius = observation_radius;
  config.half_extent = half_extent;
  config.contact_radius = contact_radius;
  config.validate();
  return config;
}

IntrinsicConfig IntrinsicSettings::to_config(const std::string& env_kind) const {
  IntrinsicConfig config;
  config.k_set = k_set;
  config.beta = beta;
  config.cap = cap;
  config.alpha = alpha;
  config.mode = parse_intrinsic_mode(mode);
  if (saliency_mode == "auto") {
    config.saliency_mode =
        env_kind == "rover" ? SaliencyMode::kPoiGated : SaliencyMode::kConstantOne;
  } else {
    config.saliency_mode = parse_saliency_mode(saliency_mode);
  }
  config.average_before_shaping = average_before_shaping;
  config.validate();
  return config;
}

void PpoHyper::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("ppo.gamma must lie in [0, 1)");
  if (!(gae_lambda >= 0.0 && gae_lambda < 1.0)) {
    throw ConfigError("ppo.gae_lambda must lie in [0, 1)");
  }
  if (!(clip > 0.0)) throw ConfigError("ppo.clip must be positive");
  if (epochs < 1) throw ConfigError("ppo.epochs must be >= 1");
  if (!(entropy_coef >= 0.0)) throw ConfigError("ppo.entropy_coef must be >= 0");
  if (!(max_grad_norm > 0.0)) throw ConfigError("ppo.max_grad_norm must be positive");
  if (minibatch_size < 1) throw ConfigError("ppo.minibatch_size must be >= 1");
  if (rollout_steps < 1) throw ConfigError("ppo.rollout_steps must be >= 1");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("ppo learning rates must be > 0");
  if (hidden_sizes.empty()) throw ConfigError("ppo.hidden_sizes must be nonempty");
  for (int h : hidden_sizes) {
    if (h < 1) throw ConfigError("ppo.hidden_sizes entries must be positive");
  }
}

void RunConfig::validate() const {
  if (env.kind == "rover") {
    env.rover.to_config();
  } else if (env.kind == "particle") {
    env.particle.to_config();
  } else if (env.kind == "point_reach") {
    env.point_reach.validate();
  } else {
    throw ConfigError("env.kind: unknown environment '" + env.kind + "'");
  }
  intrinsic.to_config(env.kind);
  ppo.validate();
  if (train.iterations < 0) throw ConfigError("train.iterations must be >= 0");
  if (train.eval_episodes < 1) throw ConfigError("train.eval_episodes must be >= 1");
  if (train.checkpoint_every < 1) throw ConfigError("train.checkpoint_every must be >= 1");
}

json default_config_json() { return json(RunConfig{}); }

namespace {

bool same_kind(const json& expected, const json& given) {
  if (expected.is_number_float()) return given.is_number();
  if (expected.is_number_integer()) return given.is_number_integer();
  if (expected.is_array()) {
    if (!given.is_array()) return false;
    if (expected.empty()) return true;
    for (const auto& item : given) {
      if (!same_kind(expected.front(), item)) return false;
    }
    return true;
  }
  return expected.type() == given.type();
}

std::string type_label(const json& value) {
  if (value.is_number_float()) return "number";
  if (value.is_number_integer()) return "integer";
  if (value.is_array()) return "array";
  return value.type_name();
}

void collect_leaves(const json& node, const std::string& prefix, std::vector<std::string>& out) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      collect_leaves(*it, path, out);
    } else {
      out.push_back(path);
    }
  }
}

std::string leaf_name(const std::string& path) {
  const auto dot = path.rfind('.');
  return dot == std::string::npos ? path : path.substr(dot + 1);
}

}  // namespace

void merge_strict(json& base, const json& layer, const std::string& where) {
  if (!layer.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = layer.begin(); it != layer.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json& target = base[it.key()];
    if (target.is_object()) {
      merge_strict(target, *it, key);
      continue;
    }
    if (!same_kind(target, *it)) {
      throw ConfigError("config key '" + key + "' expects " + type_label(target) + ", got " +
                        type_label(*it));
    }
    target = target.is_number_float() ? json(it->get<double>()) : *it;
  }
}

void apply_overrides(json& config, const std::vector<std::string>& overrides) {
  std::vector<std::string> leaves;
  collect_leaves(config, "", leaves);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + item + "' is not of the form key=value");
    }
    std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    if (key.find('.') == std::string::npos) {
      std::vector<std::string> matches;
      for (const auto& leaf : leaves) {
        if (leaf_name(leaf) == key) matches.push_back(leaf);
      }
      if (matches.empty()) throw ConfigError("unknown config key '" + key + "'");
      if (matches.size() > 1) {
        std::string options;
        for (const auto& m : matches) options += (options.empty() ? "" : ", ") + m;
        throw ConfigError("ambiguous config key '" + key + "' (one of: " + options + ")");
      }
      key = matches.front();
    }
    json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded() || value.is_object()) value = text;

    json layer = json::object();
    json* cursor = &layer;
    std::stringstream parts(key);
    std::string part;
    std::vector<std::string> segments;
    while (std::getline(parts, part, '.')) segments.push_back(part);
    for (std::size_t s = 0; s + 1 < segments.size(); ++s) cursor = &(*cursor)[segments[s]];
    (*cursor)[segments.back()] = value;
    merge_strict(config, layer, "");
  }
}

RunConfig parse_config_json(const json& file_layer, const std::vector<std::string>& overrides) {
  json resolved = default_config_json();
  if (!file_layer.is_null()) merge_strict(resolved, file_layer, "");
  apply_overrides(resolved, overrides);
  RunConfig config = resolved.get<RunConfig>();
  config.validate();
  return config;
}

RunConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides) {
  json layer;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
      try {
        layer = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
      }
    }
  }
  return parse_config_json(layer, overrides);
}

std::unique_ptr<MultiAgentEnv> make_env(const RunConfig& config) {
  if (config.env.kind == "rover") return std::make_unique<RoverEnv>(config.env.rover.to_config());
  if (config.env.kind == "particle") {
    return std::make_unique<ParticleEnv>(config.env.particle.to_config());
  }
  if (config.env.kind == "point_reach") {
    return std::make_unique<PointReachEnv>(config.env.point_reach);
  }
  throw ConfigError("env.kind: unknown environment '" + config.env.kind + "'");
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string text = json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::filesystem::path resolve_output_dir(const std::string& dir) {
  std::filesystem::path path(dir);
  if (path.is_relative()) {
    if (const char* root = std::getenv("CCL_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
      return std::filesystem::path(root) / path;
    }
  }
  return path;
}

}  // namespace ccl
