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

#include "cclmarl/policy.hpp"

#include <cmath>

#include "cclmarl/errors.hpp"

namespace ccl {

namespace {

std::vector<int> head_sizes(const ActorShape& shape) {
  if (shape.hidden.empty()) throw ConfigError("actor: hidden sizes must be nonempty");
  std::vector<int> sizes(shape.hidden.begin(), shape.hidden.end());
  sizes.push_back(shape.action_dim);
  return sizes;
}

}  // namespace

ActorParams ActorParams::zeros(const ActorShape& shape) {
  if (shape.input_dim < 1 || shape.action_dim < 1) throw ConfigError("actor: bad shape");
  ActorParams p;
  p.lstm = nn::LstmParams::zeros(shape.input_dim, shape.hidden.front());
  p.head = nn::MlpParams::zeros(head_sizes(shape));
  p.log_std = nn::Vector::Zero(shape.action_dim);
  return p;
}

nn::TensorList ActorParams::tensors() {
  nn::TensorList out = lstm.tensors();
  for (auto& t : head.tensors()) out.push_back(t);
  out.emplace_back(log_std.data(), static_cast<std::size_t>(log_std.size()));
  return out;
}

nn::ConstTensorList ActorParams::tensors() const {
  nn::ConstTensorList out = lstm.tensors();
  for (const auto& t : head.tensors()) out.push_back(t);
  out.emplace_back(log_std.data(), static_cast<std::size_t>(log_std.size()));
  return out;
}

ActorParams init_actor(const ActorShape& shape, double init_log_std, Rng& rng) {
  ActorParams p = ActorParams::zeros(shape);
  nn::orthogonal_init(p.lstm.weights, 1.0, rng);
  for (std::size_t i = 0; i < p.head.layers.size(); ++i) {
    const bool last = i + 1 == p.head.layers.size();
    nn::orthogonal_init(p.head.layers[i].weights, last ? 0.01 : std::sqrt(2.0), rng);
  }
  p.log_std.setConstant(init_log_std);
  return p;
}

CriticParams critic_zeros(int input_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return {nn::MlpParams::zeros(sizes)};
}

CriticParams init_critic(int input_dim, const std::vector<int>& hidden, Rng& rng) {
  CriticParams p = critic_zeros(input_dim, hidden);
  for (std::size_t i = 0; i < p.mlp.layers.size(); ++i) {
    const bool last = i + 1 == p.mlp.layers.size();
    nn::orthogonal_init(p.mlp.layers[i].weights, last ? 1.0 : std::sqrt(2.0), rng);
  }
  return p;
}

nn::Matrix actor_step(const ActorParams& params, const nn::Matrix& inputs,
                      nn::BatchRecurrentState& state) {
  nn::Matrix hidden = nn::lstm_step_batch(params.lstm, inputs, state);
  return nn::mlp_forward(params.head, hidden, nn::Activation::kReLU);
}

std::vector<nn::Matrix> actor_forward_sequence(const ActorParams& params,
                                               const std::vector<nn::Matrix>& inputs,
                                               ActorSequenceTape& tape) {
  std::vector<nn::Matrix> means;
  if (inputs.empty()) return means;
  const Eigen::Index batch = inputs.front().cols();
  auto state = nn::BatchRecurrentState::zeros(params.lstm.hidden_dim(), batch);
  tape.lstm.resize(inputs.size());
  tape.head.resize(inputs.size());
  means.reserve(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    nn::Matrix hidden = nn::lstm_step_batch(params.lstm, inputs[t], state, &tape.lstm[t]);
    means.push_back(
        nn::mlp_forward_taped(params.head, hidden, nn::Activation::kReLU, tape.head[t]));
  }
  return means;
}

void actor_backward_sequence(const ActorParams& params, const ActorSequenceTape& tape,
                             const std::vector<nn::Matrix>& grad_means, ActorParams& grads) {
  const std::size_t steps = grad_means.size();
  if (steps == 0) return;
  const Eigen::Index h = params.lstm.hidden_dim();
  const Eigen::Index batch = grad_means.front().cols();
  nn::Matrix carry_hidden = nn::Matrix::Zero(h, batch);
  nn::Matrix carry_cell = nn::Matrix::Zero(h, batch);
  for (std::size_t t = steps; t-- > 0;) {
    nn::Matrix d_hidden = nn::mlp_backward(params.head, tape.head[t], nn::Activation::kReLU,
                                           grad_means[t], grads.head);
    d_hidden += carry_hidden;
    auto step = nn::lstm_step_backward(params.lstm, tape.lstm[t], d_hidden, carry_cell, grads.lstm);
    carry_hidden = std::move(step.hidden_prev);
    carry_cell = std::move(step.cell_prev);
  }
}

nn::Matrix critic_forward(const CriticParams& params, const nn::Matrix& inputs) {
  return nn::mlp_forward(params.mlp, inputs, nn::Activation::kReLU);
}

}  // namespace ccl
