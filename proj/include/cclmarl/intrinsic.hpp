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

#ifndef CCLMARL_INTRINSIC_HPP_
#define CCLMARL_INTRINSIC_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cclmarl/density.hpp"
#include "cclmarl/encoder.hpp"
#include "cclmarl/neural.hpp"

namespace ccl {

enum class IntrinsicMode { kNone, kCcl, kOem, kMixture };
enum class SaliencyMode { kPoiGated, kConstantOne };

std::string to_string(IntrinsicMode mode);
std::string to_string(SaliencyMode mode);
IntrinsicMode parse_intrinsic_mode(const std::string& text);
SaliencyMode parse_saliency_mode(const std::string& text);

struct IntrinsicConfig {
  std::vector<int> k_set{3, 5, 7};
  double beta = 1.0;
  double cap = 5.0;
  double alpha = 0.5;
  IntrinsicMode mode = IntrinsicMode::kCcl;
  SaliencyMode saliency_mode = SaliencyMode::kPoiGated;
  // Average raw digamma differences over k_set, then shape once. When false,
  // each k is shaped separately and the shaped values are averaged.
  bool average_before_shaping = true;

  void validate() const;
};

// Per-episode store of joint embeddings (Chebyshev metric) with views onto
// each agent's block.
class EpisodicJointMemory {
 public:
  explicit EpisodicJointMemory(int n_agents, int embedding_dim = kEmbeddingDim);

  void append(const nn::Vector& joint);
  void reset() { joint_.clear(); }

  std::size_t size() const { return joint_.size(); }
  bool empty() const { return joint_.empty(); }
  int agents() const { return n_agents_; }
  int embedding_dim() const { return embedding_dim_; }
  const PointSet& joint() const { return joint_; }
  PointSetView per_agent_view(int agent) const;

 private:
  int n_agents_;
  int embedding_dim_;
  PointSet joint_;
};

// Per-agent episodic history of raw local observations (Euclidean metric).
class AgentObservationHistory {
 public:
  AgentObservationHistory(int n_agents, int obs_dim);

  void reset(std::span<const nn::Vector> initial_observations);
  PointSet& agent(int i) { return histories_.at(static_cast<std::size_t>(i)); }
  const PointSet& agent(int i) const { return histories_.at(static_cast<std::size_t>(i)); }
  int agents() const { return static_cast<int>(histories_.size()); }

 private:
  std::vector<PointSet> histories_;
};

// Mean over k of log(1 + d_k), d_k the Euclidean distance from the new
// observation to its k-th nearest neighbour in the agent's history; the
// observation is then appended to that history.
double oem_reward(int agent_id, const nn::Vector& new_observation,
                  AgentObservationHistory& history, std::span<const int> k_set);

struct CclKDiagnostics {
  int k = 0;
  double eps_act = 0.0;
  double eps_cfact = 0.0;
  double eps_shared = 0.0;
  std::size_t n_act = 0;
  std::size_t n_cfact = 0;
  double raw = 0.0;
};

CclKDiagnostics ccl_raw_detailed(int agent_id, const nn::Vector& actual_joint,
                                 const nn::Vector& cfact_joint, const EpisodicJointMemory& memory,
                                 int k);

// psi(n_act + 1) - psi(n_cfact + 1) with counts taken in the agent's block
// under the shared radius max(eps_act, eps_cfact). Zero on empty memory.
double ccl_raw(int agent_id, const nn::Vector& actual_joint, const nn::Vector& cfact_joint,
               const EpisodicJointMemory& memory, int k);

// min(beta * softplus(-raw), cap), floored at the smallest normal double so
// the result stays strictly positive when softplus underflows.
double shape_ccl(double raw, double beta, double cap);

struct CclAgentDiagnostics {
  std::vector<CclKDiagnostics> per_k;
  double raw_mean = 0.0;
  double shaped = 0.0;
};

struct CclStepResult {
  std::vector<double> rewards;
  std::vector<CclAgentDiagnostics> diagnostics;
};

// One full step of the CCL pipeline. Queries run against the memory as it
// stood before this step; z_t is appended once every agent is scored.
CclStepResult ccl_rewards_step(std::span<const nn::Vector> observations,
                               std::span<const nn::Vector> previous_observations,
                               EpisodicJointMemory& memory,
                               std::span<const RandomEncoder* const> encoders,
                               const IntrinsicConfig& config);

// Per-step scalar for one agent: terminal team reward plus saliency-gated
// intrinsic term selected by the mode.
double combine_rewards(double team_terminal, double saliency, double ccl, double oem,
                       const IntrinsicConfig& config);

struct IntrinsicTerms {
  std::vector<double> ccl;
  std::vector<double> oem;
  CclStepResult ccl_detail;
};

// Owns the episodic state for one team: joint memory, observation histories
// and the previous joint observation.
class IntrinsicEngine {
 public:
  IntrinsicEngine(IntrinsicConfig config, std::vector<const RandomEncoder*> encoders, int obs_dim);

  // Resets memories and primes them with the initial observations.
  void begin_episode(std::span<const nn::Vector> observations);
  IntrinsicTerms step(std::span<const nn::Vector> observations);

  const IntrinsicConfig& config() const { return config_; }
  const EpisodicJointMemory& memory() const { return memory_; }
  const AgentObservationHistory& history() const { return history_; }
  int agents() const { return static_cast<int>(encoders_.size()); }

 private:
  bool uses_ccl() const;
  bool uses_oem() const;

  IntrinsicConfig config_;
  std::vector<const RandomEncoder*> encoders_;
  EpisodicJointMemory memory_;
  AgentObservationHistory history_;
  std::vector<nn::Vector> previous_;
};

}  // namespace ccl

#endif  // CCLMARL_INTRINSIC_HPP_
