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

#ifndef CCLMARL_POLICY_HPP_
#define CCLMARL_POLICY_HPP_

#include <vector>

#include "cclmarl/neural.hpp"
#include "cclmarl/rng.hpp"

namespace ccl {

// Actor: one LSTM layer of width hidden[0] followed by a ReLU MLP over
// hidden[1..] and a linear Gaussian-mean head. log_std is a free vector.
struct ActorShape {
  int input_dim = 1;
  int action_dim = 2;
  std::vector<int> hidden{128, 128};
};

struct ActorParams {
  nn::LstmParams lstm;
  nn::MlpParams head;
  nn::Vector log_std;

  static ActorParams zeros(const ActorShape& shape);
  int input_dim() const { return static_cast<int>(lstm.input_dim()); }
  int hidden_dim() const { return static_cast<int>(lstm.hidden_dim()); }
  int action_dim() const { return static_cast<int>(log_std.size()); }
  nn::TensorList tensors();
  nn::ConstTensorList tensors() const;
};

// Orthogonal weights (gain sqrt(2) hidden, 0.01 on the mean head), zero biases.
ActorParams init_actor(const ActorShape& shape, double init_log_std, Rng& rng);

// Feed-forward value network over the centralized input.
struct CriticParams {
  nn::MlpParams mlp;

  nn::TensorList tensors() { return mlp.tensors(); }
  nn::ConstTensorList tensors() const { return mlp.tensors(); }
  int input_dim() const { return static_cast<int>(mlp.input_dim()); }
};

CriticParams init_critic(int input_dim, const std::vector<int>& hidden, Rng& rng);
CriticParams critic_zeros(int input_dim, const std::vector<int>& hidden);

// One rollout step for a batch of agents; returns action means (A x B).
nn::Matrix actor_step(const ActorParams& params, const nn::Matrix& inputs,
                      nn::BatchRecurrentState& state);

struct ActorSequenceTape {
  std::vector<nn::LstmStepTape> lstm;
  std::vector<nn::MlpTape> head;
};

// Replays whole sequences from a zero recurrent state.
std::vector<nn::Matrix> actor_forward_sequence(const ActorParams& params,
                                               const std::vector<nn::Matrix>& inputs,
                                               ActorSequenceTape& tape);

// Backpropagation through time given d loss / d mean at every step.
// Accumulates into grads (log_std gradients are left to the caller).
void actor_backward_sequence(const ActorParams& params, const ActorSequenceTape& tape,
                             const std::vector<nn::Matrix>& grad_means, ActorParams& grads);

// Values for a batch of critic inputs (1 x B).
nn::Matrix critic_forward(const CriticParams& params, const nn::Matrix& inputs);

}  // namespace ccl

#endif  // CCLMARL_POLICY_HPP_
