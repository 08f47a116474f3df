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

#ifndef CCLMARL_PPO_HPP_
#define CCLMARL_PPO_HPP_

#include <span>
#include <vector>

#include "cclmarl/config.hpp"
#include "cclmarl/neural.hpp"
#include "cclmarl/policy.hpp"
#include "cclmarl/rng.hpp"

namespace ccl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Recursive GAE; a done step bootstraps from 0. Past the last step the
// sequence is treated as terminal.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      const std::vector<bool>& dones, double gamma, double lambda);

// Actor, centralized critic and their optimizers for one role (the
// cooperative team or the adversary). Teammates share the actor and carry a
// one-hot agent id in their inputs.
struct RoleModel {
  ActorParams actor;
  CriticParams critic;
  nn::AdamState actor_opt;
  nn::AdamState critic_opt;
  int agents = 1;
  int obs_dim = 1;
};

RoleModel make_role_model(int agents, int obs_dim, int critic_input_dim, int action_dim,
                          const PpoHyper& hyper, Rng& rng);

// Observation i followed by a one-hot of i; one column per agent.
nn::Matrix actor_inputs(std::span<const nn::Vector> observations);
// All observations concatenated in agent order, then a one-hot of i.
nn::Matrix centralized_critic_inputs(std::span<const nn::Vector> observations);

// Rollout data for one role over whole episodes of equal length. Per-episode
// matrices are T x N (step by agent).
struct RoleBatch {
  int agents = 0;
  int episode_length = 0;
  std::vector<std::vector<nn::Matrix>> actor_inputs;   // [episode][t]: in x N
  std::vector<std::vector<nn::Matrix>> critic_inputs;  // [episode][t]: cin x N
  std::vector<std::vector<nn::Matrix>> actions;        // [episode][t]: A x N
  std::vector<nn::Matrix> log_probs;
  std::vector<nn::Matrix> values;
  std::vector<nn::Matrix> rewards;
  std::vector<std::vector<bool>> dones;  // [episode][t]
  std::vector<nn::Matrix> advantages;
  std::vector<nn::Matrix> returns;

  int episodes() const { return static_cast<int>(actor_inputs.size()); }
  int steps() const { return episodes() * episode_length; }
};

// Fills advantages/returns per (episode, agent) sequence; optionally
// normalizes advantages over the whole batch to mean 0, std 1.
void compute_advantages(RoleBatch& batch, double gamma, double lambda, bool normalize);

// Whole-episode minibatch laid out for recurrent replay; B = episodes x N.
struct SequenceBatch {
  std::vector<nn::Matrix> inputs;   // [t]: in x B
  std::vector<nn::Matrix> actions;  // [t]: A x B
  nn::Matrix old_log_probs;         // T x B
  nn::Matrix advantages;            // T x B
};

SequenceBatch gather_sequences(const RoleBatch& batch, std::span<const int> episodes);

struct ActorLossStats {
  double loss = 0.0;
  double surrogate = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// loss = -mean(min(r A, clip(r) A)) - entropy_coef * entropy; gradients are
// accumulated into grads.
ActorLossStats actor_loss_and_grad(const ActorParams& actor, const SequenceBatch& batch,
                                   double clip, double entropy_coef, ActorParams& grads);

// 0.5 * mean of the (optionally clipped) squared value error.
double critic_loss_and_grad(const CriticParams& critic, const nn::Matrix& inputs,
                            const nn::Vector& returns, const nn::Vector& old_values, double clip,
                            bool clip_value_loss, CriticParams& grads);

struct UpdateMetrics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double actor_grad_norm = 0.0;
  double critic_grad_norm = 0.0;
};

int episodes_per_minibatch(const PpoHyper& hyper, int episode_length);

// Epochs of shuffled whole-episode minibatches. Throws TrainingError on a
// non-finite loss.
UpdateMetrics ppo_update(RoleModel& model, const RoleBatch& batch, const PpoHyper& hyper,
                         Rng& rng);

}  // namespace ccl

#endif  // CCLMARL_PPO_HPP_
