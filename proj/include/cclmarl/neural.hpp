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

#ifndef CCLMARL_NEURAL_HPP_
#define CCLMARL_NEURAL_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cclmarl/rng.hpp"

// Small dense/recurrent kernel set with hand-written reverse-mode gradients.
// Batched kernels take column-major batches: one sample per column.
namespace ccl::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Flat views over every trainable tensor of a parameter struct, in a fixed
// order. Gradient structs share the parameter type, so their views line up.
using TensorList = std::vector<std::span<double>>;
using ConstTensorList = std::vector<std::span<const double>>;

enum class Activation { kReLU, kSiLU, kIdentity };

struct DenseLayerParams {
  Matrix weights;  // out x in
  Vector biases;   // out

  static DenseLayerParams zeros(Eigen::Index in, Eigen::Index out);
  Eigen::Index input_dim() const { return weights.cols(); }
  Eigen::Index output_dim() const { return weights.rows(); }
  void append_tensors(TensorList& out);
  void append_tensors(ConstTensorList& out) const;
};

// Hidden layers apply (optional layer norm then) the activation; the last
// layer is linear.
struct MlpParams {
  std::vector<DenseLayerParams> layers;

  // sizes = {input, hidden..., output}
  static MlpParams zeros(std::span<const int> sizes);
  Eigen::Index input_dim() const { return layers.front().input_dim(); }
  Eigen::Index output_dim() const { return layers.back().output_dim(); }
  TensorList tensors();
  ConstTensorList tensors() const;
};

Vector mlp_forward(const MlpParams& params, const Vector& input, Activation activation,
                   bool layer_norm = false);
Matrix mlp_forward(const MlpParams& params, const Matrix& inputs, Activation activation,
                   bool layer_norm = false);

struct MlpTape {
  std::vector<Matrix> inputs;          // input to each layer
  std::vector<Matrix> preactivations;  // affine output of each layer
};

// Forward pass that records what mlp_backward needs. No layer norm.
Matrix mlp_forward_taped(const MlpParams& params, const Matrix& inputs, Activation activation,
                         MlpTape& tape);
// Accumulates parameter gradients into `grads` and returns d loss / d inputs.
Matrix mlp_backward(const MlpParams& params, const MlpTape& tape, Activation activation,
                    const Matrix& grad_output, MlpParams& grads);

// Gate blocks are stacked row-wise in the order input, forget, cell, output;
// each block is hidden x (input + hidden) acting on [x; h].
struct LstmParams {
  Matrix weights;  // 4H x (in + H)
  Vector biases;   // 4H

  static LstmParams zeros(Eigen::Index input_dim, Eigen::Index hidden_dim);
  Eigen::Index hidden_dim() const { return weights.rows() / 4; }
  Eigen::Index input_dim() const { return weights.cols() - hidden_dim(); }
  TensorList tensors();
  ConstTensorList tensors() const;
};

struct RecurrentState {
  Vector hidden;
  Vector cell;
  static RecurrentState zeros(Eigen::Index hidden_dim);
};

struct LstmStepResult {
  Vector output;
  RecurrentState state;
};

LstmStepResult lstm_step(const LstmParams& params, const Vector& input,
                         const RecurrentState& state);

struct BatchRecurrentState {
  Matrix hidden;  // H x B
  Matrix cell;    // H x B
  static BatchRecurrentState zeros(Eigen::Index hidden_dim, Eigen::Index batch);
};

struct LstmStepTape {
  Matrix joined;  // [x; h_prev]
  Matrix cell_prev;
  Matrix input_gate, forget_gate, cell_candidate, output_gate;
  Matrix cell_tanh;
};

// Advances `state` in place and returns the new hidden matrix.
Matrix lstm_step_batch(const LstmParams& params, const Matrix& inputs, BatchRecurrentState& state,
                       LstmStepTape* tape = nullptr);

struct LstmStepGrad {
  Matrix input;
  Matrix hidden_prev;
  Matrix cell_prev;
};

// grad_hidden / grad_cell are total gradients w.r.t. the step's new hidden
// and cell. Parameter gradients are accumulated into `grads`.
LstmStepGrad lstm_step_backward(const LstmParams& params, const LstmStepTape& tape,
                                const Matrix& grad_hidden, const Matrix& grad_cell,
                                LstmParams& grads);

// Diagonal Gaussian log density summed over dimensions.
double gaussian_log_prob(const Vector& mean, const Vector& log_std, const Vector& action);
double gaussian_entropy(const Vector& log_std);

struct SampledAction {
  Vector action;
  double log_prob = 0.0;
};

SampledAction sample_action(const Vector& mean, const Vector& log_std, Rng& rng);

struct AdamState {
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;
  std::int64_t step = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam_state(const ConstTensorList& params, double learning_rate);

// Bias-corrected Adam step. Throws TrainingError on a non-finite gradient,
// leaving parameters untouched.
void adam_update(const TensorList& params, const ConstTensorList& grads, AdamState& state);

double global_norm(const ConstTensorList& tensors);
// Rescales so the global norm is at most max_norm; returns the pre-clip norm.
double clip_grad_norm(const TensorList& grads, double max_norm);

void zero(const TensorList& tensors);
ConstTensorList as_const(const TensorList& tensors);
Vector flatten(const ConstTensorList& tensors);
void unflatten(const Vector& flat, const TensorList& tensors);

// Orthogonal matrix scaled by gain (QR of a Gaussian draw, sign-corrected).
void orthogonal_init(Matrix& weights, double gain, Rng& rng);

// Max over parameters of |analytic - numeric| / max(1e-8, |analytic|, |numeric|) using
// central differences. Parameters are restored before returning.
double finite_diff_check(const std::function<double()>& loss_fn, const TensorList& params,
                         const ConstTensorList& analytic, double epsilon = 1e-5);

}  // namespace ccl::nn

#endif  // CCLMARL_NEURAL_HPP_
