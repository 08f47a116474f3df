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

#include "cclmarl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "cclmarl/errors.hpp"

namespace ccl {

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      const std::vector<bool>& dones, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw ConfigError("compute_gae: length mismatch");
  GaeResult out{std::vector<double>(n), std::vector<double>(n)};
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const bool terminal = dones[t] || t + 1 == n;
    const double next_value = terminal ? 0.0 : values[t + 1];
    const double delta = rewards[t] + gamma * next_value - values[t];
    running = delta + (terminal ? 0.0 : gamma * lambda * running);
    out.advantages[t] = running;
    out.returns[t] = running + values[t];
  }
  return out;
}

RoleModel make_role_model(int agents, int obs_dim, int critic_input_dim, int action_dim,
                          const PpoHyper& hyper, Rng& rng) {
  RoleModel model;
  model.agents = agents;
  model.obs_dim = obs_dim;
  ActorShape shape{obs_dim + agents, action_dim, hyper.hidden_sizes};
  model.actor = init_actor(shape, hyper.init_log_std, rng);
  model.critic = init_critic(critic_input_dim, hyper.hidden_sizes, rng);
  model.actor_opt = nn::make_adam_state(std::as_const(model.actor).tensors(), hyper.actor_lr);
  model.critic_opt = nn::make_adam_state(std::as_const(model.critic).tensors(), hyper.critic_lr);
  return model;
}

nn::Matrix actor_inputs(std::span<const nn::Vector> observations) {
  const auto n = static_cast<Eigen::Index>(observations.size());
  if (n == 0) throw ConfigError("actor_inputs: no observations");
  const Eigen::Index dim = observations.front().size();
  nn::Matrix out = nn::Matrix::Zero(dim + n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = observations[static_cast<std::size_t>(i)];
    if (o.size() != dim) throw ConfigError("actor_inputs: ragged observations");
    out.col(i).head(dim) = o;
    out(dim + i, i) = 1.0;
  }
  return out;
}

nn::Matrix centralized_critic_inputs(std::span<const nn::Vector> observations) {
  const auto n = static_cast<Eigen::Index>(observations.size());
  if (n == 0) throw ConfigError("critic_inputs: no observations");
  Eigen::Index total = 0;
  for (const auto& o : observations) total += o.size();
  nn::Vector joint(total);
  Eigen::Index at = 0;
  for (const auto& o : observations) {
    joint.segment(at, o.size()) = o;
    at += o.size();
  }
  nn::Matrix out = nn::Matrix::Zero(total + n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.col(i).head(total) = joint;
    out(total + i, i) = 1.0;
  }
  return out;
}

void compute_advantages(RoleBatch& batch, double gamma, double lambda, bool normalize) {
  const int t_len = batch.episode_length;
  batch.advantages.assign(batch.rewards.size(), nn::Matrix());
  batch.returns.assign(batch.rewards.size(), nn::Matrix());
  std::vector<double> rewards(static_cast<std::size_t>(t_len));
  std::vector<double> values(static_cast<std::size_t>(t_len));
  for (std::size_t e = 0; e < batch.rewards.size(); ++e) {
    batch.advantages[e].resize(t_len, batch.agents);
    batch.returns[e].resize(t_len, batch.agents);
    for (int a = 0; a < batch.agents; ++a) {
      for (int t = 0; t < t_len; ++t) {
        rewards[static_cast<std::size_t>(t)] = batch.rewards[e](t, a);
        values[static_cast<std::size_t>(t)] = batch.values[e](t, a);
      }
      const GaeResult gae = compute_gae(rewards, values, batch.dones[e], gamma, lambda);
      for (int t = 0; t < t_len; ++t) {
        batch.advantages[e](t, a) = gae.advantages[static_cast<std::size_t>(t)];
        batch.returns[e](t, a) = gae.returns[static_cast<std::size_t>(t)];
      }
    }
  }
  if (!normalize || batch.advantages.empty()) return;
  double sum = 0.0;
  double count = 0.0;
  for (const auto& m : batch.advantages) {
    sum += m.sum();
    count += static_cast<double>(m.size());
  }
  const double mean = sum / count;
  double sq = 0.0;
  for (const auto& m : batch.advantages) sq += (m.array() - mean).square().sum();
  const double std = std::sqrt(sq / count);
  // Floor rather than offset, so rescaled rewards give identical advantages.
  const double scale = std::max(std, 1e-8);
  for (auto& m : batch.advantages) m = ((m.array() - mean) / scale).matrix();
}

SequenceBatch gather_sequences(const RoleBatch& batch, std::span<const int> episodes) {
  const int t_len = batch.episode_length;
  const int n = batch.agents;
  const auto b = static_cast<Eigen::Index>(episodes.size()) * n;
  SequenceBatch seq;
  seq.inputs.resize(static_cast<std::size_t>(t_len));
  seq.actions.resize(static_cast<std::size_t>(t_len));
  seq.old_log_probs.resize(t_len, b);
  seq.advantages.resize(t_len, b);
  for (int t = 0; t < t_len; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const auto& first = batch.actor_inputs[static_cast<std::size_t>(episodes[0])][ts];
    seq.inputs[ts].resize(first.rows(), b);
    seq.actions[ts].resize(batch.actions[static_cast<std::size_t>(episodes[0])][ts].rows(), b);
    for (std::size_t k = 0; k < episodes.size(); ++k) {
      const auto e = static_cast<std::size_t>(episodes[k]);
      const Eigen::Index col = static_cast<Eigen::Index>(k) * n;
      seq.inputs[ts].middleCols(col, n) = batch.actor_inputs[e][ts];
      seq.actions[ts].middleCols(col, n) = batch.actions[e][ts];
      seq.old_log_probs.block(t, col, 1, n) = batch.log_probs[e].row(t);
      seq.advantages.block(t, col, 1, n) = batch.advantages[e].row(t);
    }
  }
  return seq;
}

ActorLossStats actor_loss_and_grad(const ActorParams& actor, const SequenceBatch& batch,
                                   double clip, double entropy_coef, ActorParams& grads) {
  ActorSequenceTape tape;
  const std::vector<nn::Matrix> means = actor_forward_sequence(actor, batch.inputs, tape);
  const auto t_len = static_cast<Eigen::Index>(means.size());
  const Eigen::Index b = batch.old_log_probs.cols();
  const Eigen::Index dims = actor.log_std.size();
  const double count = static_cast<double>(t_len * b);
  const nn::Vector inv_var = (-2.0 * actor.log_std.array()).exp().matrix();
  const double log_norm = actor.log_std.sum() +
                          0.5 * static_cast<double>(dims) * std::log(2.0 * std::numbers::pi);

  ActorLossStats stats;
  std::vector<nn::Matrix> grad_means(means.size());
  nn::Vector grad_log_std = nn::Vector::Zero(dims);
  double surrogate = 0.0;
  double clipped = 0.0;
  double kl = 0.0;
  for (Eigen::Index t = 0; t < t_len; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const nn::Matrix diff = batch.actions[ts] - means[ts];
    grad_means[ts].resize(dims, b);
    for (Eigen::Index c = 0; c < b; ++c) {
      double quad = 0.0;
      for (Eigen::Index d = 0; d < dims; ++d) quad += diff(d, c) * diff(d, c) * inv_var[d];
      const double log_prob = -0.5 * quad - log_norm;
      const double log_ratio = log_prob - batch.old_log_probs(t, c);
      const double ratio = std::exp(log_ratio);
      const double adv = batch.advantages(t, c);
      const double unclipped = ratio * adv;
      const double clipped_term = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * adv;
      surrogate += std::min(unclipped, clipped_term);
      if (std::abs(ratio - 1.0) > clip) clipped += 1.0;
      kl += (ratio - 1.0) - log_ratio;
      // d(-surrogate / count) / d log_prob
      const double g = unclipped <= clipped_term ? -unclipped / count : 0.0;
      for (Eigen::Index d = 0; d < dims; ++d) {
        grad_means[ts](d, c) = g * diff(d, c) * inv_var[d];
        grad_log_std[d] += g * (diff(d, c) * diff(d, c) * inv_var[d] - 1.0);
      }
    }
  }
  actor_backward_sequence(actor, tape, grad_means, grads);
  grads.log_std += grad_log_std;
  grads.log_std.array() -= entropy_coef;

  stats.surrogate = surrogate / count;
  stats.entropy = nn::gaussian_entropy(actor.log_std);
  stats.loss = -stats.surrogate - entropy_coef * stats.entropy;
  stats.clip_fraction = clipped / count;
  stats.approx_kl = kl / count;
  return stats;
}

double critic_loss_and_grad(const CriticParams& critic, const nn::Matrix& inputs,
                            const nn::Vector& returns, const nn::Vector& old_values, double clip,
                            bool clip_value_loss, CriticParams& grads) {
  nn::MlpTape tape;
  const nn::Matrix values = nn::mlp_forward_taped(critic.mlp, inputs, nn::Activation::kReLU, tape);
  const Eigen::Index m = values.cols();
  const double count = static_cast<double>(m);
  nn::Matrix grad(1, m);
  double loss = 0.0;
  for (Eigen::Index c = 0; c < m; ++c) {
    const double v = values(0, c);
    const double err = v - returns[c];
    const double plain = err * err;
    if (!clip_value_loss) {
      loss += 0.5 * plain;
      grad(0, c) = err / count;
      continue;
    }
    const double delta = v - old_values[c];
    const double v_clipped = old_values[c] + std::clamp(delta, -clip, clip);
    const double err_clipped = v_clipped - returns[c];
    const double clipped = err_clipped * err_clipped;
    if (plain >= clipped) {
      loss += 0.5 * plain;
      grad(0, c) = err / count;
    } else {
      loss += 0.5 * clipped;
      grad(0, c) = std::abs(delta) < clip ? err_clipped / count : 0.0;
    }
  }
  nn::mlp_backward(critic.mlp, tape, nn::Activation::kReLU, grad, grads.mlp);
  return loss / count;
}

int episodes_per_minibatch(const PpoHyper& hyper, int episode_length) {
  const double ratio = static_cast<double>(hyper.minibatch_size) / episode_length;
  return std::max(1, static_cast<int>(std::lround(ratio)));
}

namespace {

void check_finite(double value, const std::string& what) {
  if (!std::isfinite(value)) throw TrainingError("ppo_update: non-finite " + what);
}

}  // namespace

UpdateMetrics ppo_update(RoleModel& model, const RoleBatch& batch, const PpoHyper& hyper,
                         Rng& rng) {
  UpdateMetrics metrics;
  const int episodes = batch.episodes();
  if (episodes == 0) return metrics;
  const int per_batch = std::min(episodes, episodes_per_minibatch(hyper, batch.episode_length));
  const int t_len = batch.episode_length;
  const int n = batch.agents;

  std::vector<int> order(static_cast<std::size_t>(episodes));
  std::iota(order.begin(), order.end(), 0);
  ActorParams actor_grads = model.actor;
  CriticParams critic_grads = model.critic;
  double updates = 0.0;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    // Fisher-Yates with the trainer's stream.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (int start = 0; start < episodes; start += per_batch) {
      const int stop = std::min(episodes, start + per_batch);
      const std::span<const int> chosen(order.data() + start, static_cast<std::size_t>(stop - start));

      nn::zero(actor_grads.tensors());
      const SequenceBatch seq = gather_sequences(batch, chosen);
      const ActorLossStats actor_stats =
          actor_loss_and_grad(model.actor, seq, hyper.clip, hyper.entropy_coef, actor_grads);
      check_finite(actor_stats.loss, "actor loss");

      const Eigen::Index cols = static_cast<Eigen::Index>(chosen.size()) * t_len * n;
      const Eigen::Index cin = batch.critic_inputs[0][0].rows();
      nn::Matrix critic_in(cin, cols);
      nn::Vector returns(cols);
      nn::Vector old_values(cols);
      Eigen::Index col = 0;
      for (int e : chosen) {
        const auto es = static_cast<std::size_t>(e);
        for (int t = 0; t < t_len; ++t) {
          critic_in.middleCols(col, n) = batch.critic_inputs[es][static_cast<std::size_t>(t)];
          returns.segment(col, n) = batch.returns[es].row(t).transpose();
          old_values.segment(col, n) = batch.values[es].row(t).transpose();
          col += n;
        }
      }
      nn::zero(critic_grads.tensors());
      const double value_loss =
          critic_loss_and_grad(model.critic, critic_in, returns, old_values, hyper.clip,
                               hyper.clip_value_loss, critic_grads);
      check_finite(value_loss, "value loss");

      metrics.actor_grad_norm += nn::clip_grad_norm(actor_grads.tensors(), hyper.max_grad_norm);
      metrics.critic_grad_norm += nn::clip_grad_norm(critic_grads.tensors(), hyper.max_grad_norm);
      nn::adam_update(model.actor.tensors(), std::as_const(actor_grads).tensors(), model.actor_opt);
      nn::adam_update(model.critic.tensors(), std::as_const(critic_grads).tensors(), model.critic_opt);

      metrics.policy_loss += actor_stats.loss;
      metrics.value_loss += value_loss;
      metrics.entropy += actor_stats.entropy;
      metrics.clip_fraction += actor_stats.clip_fraction;
      metrics.approx_kl += actor_stats.approx_kl;
      updates += 1.0;
    }
  }
  metrics.policy_loss /= updates;
  metrics.value_loss /= updates;
  metrics.entropy /= updates;
  metrics.clip_fraction /= updates;
  metrics.approx_kl /= updates;
  metrics.actor_grad_norm /= updates;
  metrics.critic_grad_norm /= updates;
  return metrics;
}

}  // namespace ccl
