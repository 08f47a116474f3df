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

#include "cclmarl/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "cclmarl/errors.hpp"

namespace ccl {

std::string to_string(IntrinsicMode mode) {
  switch (mode) {
    case IntrinsicMode::kNone: return "none";
    case IntrinsicMode::kCcl: return "ccl";
    case IntrinsicMode::kOem: return "oem";
    case IntrinsicMode::kMixture: return "mixture";
  }
  return "none";
}

std::string to_string(SaliencyMode mode) {
  return mode == SaliencyMode::kPoiGated ? "poi_gated" : "constant_one";
}

IntrinsicMode parse_intrinsic_mode(const std::string& text) {
  if (text == "none") return IntrinsicMode::kNone;
  if (text == "ccl") return IntrinsicMode::kCcl;
  if (text == "oem") return IntrinsicMode::kOem;
  if (text == "mixture") return IntrinsicMode::kMixture;
  throw ConfigError("unknown intrinsic mode '" + text + "' (expected ccl|oem|mixture|none)");
}

SaliencyMode parse_saliency_mode(const std::string& text) {
  if (text == "poi_gated") return SaliencyMode::kPoiGated;
  if (text == "constant_one") return SaliencyMode::kConstantOne;
  throw ConfigError("unknown saliency mode '" + text + "' (expected poi_gated|constant_one)");
}

void IntrinsicConfig::validate() const {
  if (k_set.empty()) throw ConfigError("intrinsic.k_set must be nonempty");
  if (!std::is_sorted(k_set.begin(), k_set.end())) {
    throw ConfigError("intrinsic.k_set must be sorted ascending");
  }
  if (k_set.front() < 1) throw ConfigError("intrinsic.k_set entries must be positive");
  if (!(beta > 0.0)) throw ConfigError("intrinsic.beta must be positive");
  if (!(cap > 0.0)) throw ConfigError("intrinsic.cap must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("intrinsic.alpha must be nonnegative");
}

EpisodicJointMemory::EpisodicJointMemory(int n_agents, int embedding_dim)
    : n_agents_(n_agents),
      embedding_dim_(embedding_dim),
      joint_(static_cast<std::size_t>(n_agents * embedding_dim), Metric::kChebyshev) {
  if (n_agents < 1 || embedding_dim < 1) throw ConfigError("memory: sizes must be positive");
}

void EpisodicJointMemory::append(const nn::Vector& joint) {
  joint_.append({joint.data(), static_cast<std::size_t>(joint.size())});
}

PointSetView EpisodicJointMemory::per_agent_view(int agent) const {
  if (agent < 0 || agent >= n_agents_) throw ConfigError("memory: agent index out of range");
  return PointSetView(joint_, static_cast<std::size_t>(agent * embedding_dim_),
                      static_cast<std::size_t>(embedding_dim_));
}

AgentObservationHistory::AgentObservationHistory(int n_agents, int obs_dim) {
  if (n_agents < 1 || obs_dim < 1) throw ConfigError("history: sizes must be positive");
  histories_.assign(static_cast<std::size_t>(n_agents),
                    PointSet(static_cast<std::size_t>(obs_dim), Metric::kEuclidean));
}

void AgentObservationHistory::reset(std::span<const nn::Vector> initial_observations) {
  if (initial_observations.size() != histories_.size()) {
    throw ConfigError("history: expected one initial observation per agent");
  }
  for (std::size_t i = 0; i < histories_.size(); ++i) {
    histories_[i].clear();
    const auto& o = initial_observations[i];
    histories_[i].append({o.data(), static_cast<std::size_t>(o.size())});
  }
}

double oem_reward(int agent_id, const nn::Vector& new_observation,
                  AgentObservationHistory& history, std::span<const int> k_set) {
  PointSet& points = history.agent(agent_id);
  const std::span<const double> query{new_observation.data(),
                                      static_cast<std::size_t>(new_observation.size())};
  double total = 0.0;
  for (int k : k_set) total += std::log(kth_nearest_radius(query, points, k) + 1.0);
  points.append(query);
  return total / static_cast<double>(k_set.size());
}

namespace {

std::span<const double> as_span(const nn::Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

CclKDiagnostics ccl_raw_detailed(int agent_id, const nn::Vector& actual_joint,
                                 const nn::Vector& cfact_joint, const EpisodicJointMemory& memory,
                                 int k) {
  CclKDiagnostics d;
  d.k = k;
  if (memory.empty()) return d;
  const int e = memory.embedding_dim();
  d.eps_act = kth_nearest_radius(as_span(actual_joint), memory.joint(), k);
  d.eps_cfact = kth_nearest_radius(as_span(cfact_joint), memory.joint(), k);
  d.eps_shared = std::max(d.eps_act, d.eps_cfact);
  const PointSetView block = memory.per_agent_view(agent_id);
  const auto offset = static_cast<std::size_t>(agent_id * e);
  const auto width = static_cast<std::size_t>(e);
  d.n_act = count_within_radius(as_span(actual_joint).subspan(offset, width), block, d.eps_shared);
  d.n_cfact = count_within_radius(as_span(cfact_joint).subspan(offset, width), block, d.eps_shared);
  d.raw = digamma_of_count(d.n_act) - digamma_of_count(d.n_cfact);
  return d;
}

double ccl_raw(int agent_id, const nn::Vector& actual_joint, const nn::Vector& cfact_joint,
               const EpisodicJointMemory& memory, int k) {
  return ccl_raw_detailed(agent_id, actual_joint, cfact_joint, memory, k).raw;
}

double shape_ccl(double raw, double beta, double cap) {
  const double x = -raw;
  const double softplus = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  return std::clamp(beta * softplus, std::numeric_limits<double>::min(), cap);
}

CclStepResult ccl_rewards_step(std::span<const nn::Vector> observations,
                               std::span<const nn::Vector> previous_observations,
                               EpisodicJointMemory& memory,
                               std::span<const RandomEncoder* const> encoders,
                               const IntrinsicConfig& config) {
  const std::size_t n = observations.size();
  if (previous_observations.size() != n || encoders.size() != n ||
      static_cast<int>(n) != memory.agents()) {
    throw ConfigError("ccl_rewards_step: agent count mismatch");
  }
  const int e = memory.embedding_dim();

  std::vector<Embedding> actual(n);
  for (std::size_t i = 0; i < n; ++i) actual[i] = encoders[i]->encode(observations[i]);
  const nn::Vector joint = joint_embedding(actual);

  CclStepResult result;
  result.rewards.resize(n);
  result.diagnostics.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    nn::Vector cfact = joint;
    cfact.segment(static_cast<Eigen::Index>(i) * e, e) =
        encoders[i]->encode(previous_observations[i]);

    auto& diag = result.diagnostics[i];
    double raw_sum = 0.0;
    double shaped_sum = 0.0;
    for (int k : config.k_set) {
      diag.per_k.push_back(ccl_raw_detailed(static_cast<int>(i), joint, cfact, memory, k));
      raw_sum += diag.per_k.back().raw;
      shaped_sum += shape_ccl(diag.per_k.back().raw, config.beta, config.cap);
    }
    const auto count = static_cast<double>(config.k_set.size());
    diag.raw_mean = raw_sum / count;
    diag.shaped = config.average_before_shaping ? shape_ccl(diag.raw_mean, config.beta, config.cap)
                                                : shaped_sum / count;
    result.rewards[i] = diag.shaped;
  }
  memory.append(joint);
  return result;
}

double combine_rewards(double team_terminal, double saliency, double ccl, double oem,
                       const IntrinsicConfig& config) {
  double intrinsic = 0.0;
  switch (config.mode) {
    case IntrinsicMode::kNone: break;
    case IntrinsicMode::kCcl: intrinsic = ccl; break;
    case IntrinsicMode::kOem: intrinsic = oem; break;
    case IntrinsicMode::kMixture: intrinsic = ccl + config.alpha * oem; break;
  }
  return team_terminal + saliency * intrinsic;
}

IntrinsicEngine::IntrinsicEngine(IntrinsicConfig config,
                                 std::vector<const RandomEncoder*> encoders, int obs_dim)
    : config_(std::move(config)),
      encoders_(std::move(encoders)),
      memory_(static_cast<int>(encoders_.size())),
      history_(static_cast<int>(encoders_.size()), obs_dim) {
  config_.validate();
  for (const auto* enc : encoders_) {
    if (enc == nullptr) throw ConfigError("intrinsic engine: null encoder");
    if (enc->observation_dim() != obs_dim) throw ConfigError("intrinsic engine: encoder dim");
    if (enc->embedding_dim() != memory_.embedding_dim()) {
      throw ConfigError("intrinsic engine: embedding dim");
    }
  }
}

bool IntrinsicEngine::uses_ccl() const {
  return config_.mode == IntrinsicMode::kCcl || config_.mode == IntrinsicMode::kMixture;
}

bool IntrinsicEngine::uses_oem() const {
  return config_.mode == IntrinsicMode::kOem || config_.mode == IntrinsicMode::kMixture;
}

void IntrinsicEngine::begin_episode(std::span<const nn::Vector> observations) {
  if (observations.size() != encoders_.size()) throw ConfigError("begin_episode: agent count");
  memory_.reset();
  history_.reset(observations);
  previous_.assign(observations.begin(), observations.end());
  if (uses_ccl()) {
    // No predecessor exists: the counterfactual is the observation itself.
    ccl_rewards_step(observations, observations, memory_, encoders_, config_);
  }
}

IntrinsicTerms IntrinsicEngine::step(std::span<const nn::Vector> observations) {
  const std::size_t n = encoders_.size();
  if (observations.size() != n) throw ConfigError("intrinsic step: agent count");
  if (previous_.size() != n) throw ConfigError("intrinsic step: begin_episode not called");
  IntrinsicTerms terms;
  terms.ccl.assign(n, 0.0);
  terms.oem.assign(n, 0.0);
  if (uses_ccl()) {
    terms.ccl_detail = ccl_rewards_step(observations, previous_, memory_, encoders_, config_);
    terms.ccl = terms.ccl_detail.rewards;
  }
  if (uses_oem()) {
    for (std::size_t i = 0; i < n; ++i) {
      terms.oem[i] = oem_reward(static_cast<int>(i), observations[i], history_, config_.k_set);
    }
  }
  previous_.assign(observations.begin(), observations.end());
  return terms;
}

}  // namespace ccl
