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

#include "cclmarl/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cclmarl/errors.hpp"

namespace ccl::nn {

namespace {

constexpr double kLayerNormVarianceFloor = 1e-5;

std::span<double> view(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> view(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> view(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("dimension mismatch: " + what);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }

Matrix activate(const Matrix& x, Activation activation) {
  switch (activation) {
    case Activation::kReLU:
      return x.cwiseMax(0.0);
    case Activation::kSiLU:
      return x.cwiseProduct(sigmoid(x));
    case Activation::kIdentity:
      return x;
  }
  return x;
}

// d activation / d x, evaluated at the pre-activation.
Matrix activation_slope(const Matrix& pre, Activation activation) {
  switch (activation) {
    case Activation::kReLU:
      return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::kSiLU:
      return pre.unaryExpr([](double v) {
        const double s = sigmoid(v);
        return s * (1.0 + v * (1.0 - s));
      });
    case Activation::kIdentity:
      return Matrix::Ones(pre.rows(), pre.cols());
  }
  return Matrix::Ones(pre.rows(), pre.cols());
}

Matrix layer_normalize(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    const double var = (x.col(c).array() - mean).square().mean();
    out.col(c) = (x.col(c).array() - mean) / std::sqrt(var + kLayerNormVarianceFloor);
  }
  return out;
}

}  // namespace

DenseLayerParams DenseLayerParams::zeros(Eigen::Index in, Eigen::Index out) {
  return {Matrix::Zero(out, in), Vector::Zero(out)};
}

void DenseLayerParams::append_tensors(TensorList& out) {
  out.push_back(view(weights));
  out.push_back(view(biases));
}

void DenseLayerParams::append_tensors(ConstTensorList& out) const {
  out.push_back(view(weights));
  out.push_back(view(biases));
}

MlpParams MlpParams::zeros(std::span<const int> sizes) {
  if (sizes.size() < 2) throw ConfigError("mlp needs at least input and output sizes");
  MlpParams params;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i + 1] < 1) throw ConfigError("mlp layer sizes must be positive");
    params.layers.push_back(DenseLayerParams::zeros(sizes[i], sizes[i + 1]));
  }
  return params;
}

TensorList MlpParams::tensors() {
  TensorList out;
  for (auto& layer : layers) layer.append_tensors(out);
  return out;
}

ConstTensorList MlpParams::tensors() const {
  ConstTensorList out;
  for (const auto& layer : layers) layer.append_tensors(out);
  return out;
}

Matrix mlp_forward(const MlpParams& params, const Matrix& inputs, Activation activation,
                   bool layer_norm) {
  require(!params.layers.empty(), "empty mlp");
  require(inputs.rows() == params.input_dim(),
          "mlp input has " + std::to_string(inputs.rows()) + " rows, expected " +
              std::to_string(params.input_dim()));
  Matrix x = inputs;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    Matrix pre = layer.weights * x;
    pre.colwise() += layer.biases;
    if (i + 1 == params.layers.size()) return pre;
    if (layer_norm) pre = layer_normalize(pre);
    x = activate(pre, activation);
  }
  return x;
}

Vector mlp_forward(const MlpParams& params, const Vector& input, Activation activation,
                   bool layer_norm) {
  return mlp_forward(params, Matrix(input), activation, layer_norm).col(0);
}

Matrix mlp_forward_taped(const MlpParams& params, const Matrix& inputs, Activation activation,
                         MlpTape& tape) {
  require(!params.layers.empty(), "empty mlp");
  require(inputs.rows() == params.input_dim(), "mlp input rows");
  tape.inputs.clear();
  tape.preactivations.clear();
  Matrix x = inputs;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    tape.inputs.push_back(x);
    Matrix pre = layer.weights * x;
    pre.colwise() += layer.biases;
    tape.preactivations.push_back(pre);
    if (i + 1 == params.layers.size()) return pre;
    x = activate(pre, activation);
  }
  return x;
}

Matrix mlp_backward(const MlpParams& params, const MlpTape& tape, Activation activation,
                    const Matrix& grad_output, MlpParams& grads) {
  Matrix delta = grad_output;
  for (std::size_t i = params.layers.size(); i-- > 0;) {
    if (i + 1 != params.layers.size()) {
      delta = delta.cwiseProduct(activation_slope(tape.preactivations[i], activation));
    }
    grads.layers[i].weights.noalias() += delta * tape.inputs[i].transpose();
    grads.layers[i].biases.noalias() += delta.rowwise().sum();
    delta = params.layers[i].weights.transpose() * delta;
  }
  return delta;
}

LstmParams LstmParams::zeros(Eigen::Index input_dim, Eigen::Index hidden_dim) {
  return {Matrix::Zero(4 * hidden_dim, input_dim + hidden_dim), Vector::Zero(4 * hidden_dim)};
}

TensorList LstmParams::tensors() { return {view(weights), view(biases)}; }
ConstTensorList LstmParams::tensors() const { return {view(weights), view(biases)}; }

RecurrentState RecurrentState::zeros(Eigen::Index hidden_dim) {
  return {Vector::Zero(hidden_dim), Vector::Zero(hidden_dim)};
}

BatchRecurrentState BatchRecurrentState::zeros(Eigen::Index hidden_dim, Eigen::Index batch) {
  return {Matrix::Zero(hidden_dim, batch), Matrix::Zero(hidden_dim, batch)};
}

Matrix lstm_step_batch(const LstmParams& params, const Matrix& inputs, BatchRecurrentState& state,
                       LstmStepTape* tape) {
  const Eigen::Index h = params.hidden_dim();
  require(inputs.rows() == params.input_dim(), "lstm input rows");
  require(state.hidden.rows() == h && state.cell.rows() == h, "lstm state rows");
  require(state.hidden.cols() == inputs.cols() && state.cell.cols() == inputs.cols(),
          "lstm batch size");
  const Eigen::Index batch = inputs.cols();

  Matrix joined(inputs.rows() + h, batch);
  joined.topRows(inputs.rows()) = inputs;
  joined.bottomRows(h) = state.hidden;
  Matrix gates = params.weights * joined;
  gates.colwise() += params.biases;

  Matrix in_gate = sigmoid(gates.middleRows(0, h));
  Matrix forget_gate = sigmoid(gates.middleRows(h, h));
  Matrix candidate = gates.middleRows(2 * h, h).array().tanh().matrix();
  Matrix out_gate = sigmoid(gates.middleRows(3 * h, h));

  Matrix cell = forget_gate.cwiseProduct(state.cell) + in_gate.cwiseProduct(candidate);
  Matrix cell_tanh = cell.array().tanh().matrix();
  Matrix hidden = out_gate.cwiseProduct(cell_tanh);

  if (tape != nullptr) {
    tape->joined = std::move(joined);
    tape->cell_prev = state.cell;
    tape->input_gate = std::move(in_gate);
    tape->forget_gate = std::move(forget_gate);
    tape->cell_candidate = std::move(candidate);
    tape->output_gate = std::move(out_gate);
    tape->cell_tanh = std::move(cell_tanh);
  }
  state.hidden = hidden;
  state.cell = std::move(cell);
  return hidden;
}

LstmStepResult lstm_step(const LstmParams& params, const Vector& input,
                         const RecurrentState& state) {
  BatchRecurrentState batch{Matrix(state.hidden), Matrix(state.cell)};
  Matrix out = lstm_step_batch(params, Matrix(input), batch);
  return {out.col(0), {batch.hidden.col(0), batch.cell.col(0)}};
}

LstmStepGrad lstm_step_backward(const LstmParams& params, const LstmStepTape& tape,
                                const Matrix& grad_hidden, const Matrix& grad_cell,
                                LstmParams& grads) {
  const Eigen::Index h = params.hidden_dim();
  const Eigen::Index in = params.input_dim();
  const auto& i = tape.input_gate;
  const auto& f = tape.forget_gate;
  const auto& g = tape.cell_candidate;
  const auto& o = tape.output_gate;

  Matrix d_out = grad_hidden.cwiseProduct(tape.cell_tanh);
  Matrix d_cell =
      grad_cell + grad_hidden.cwiseProduct(o).cwiseProduct(
                      (1.0 - tape.cell_tanh.array().square()).matrix());

  Matrix d_gates(4 * h, grad_hidden.cols());
  d_gates.middleRows(0, h) =
      d_cell.cwiseProduct(g).cwiseProduct(i.cwiseProduct((1.0 - i.array()).matrix()));
  d_gates.middleRows(h, h) = d_cell.cwiseProduct(tape.cell_prev)
                                 .cwiseProduct(f.cwiseProduct((1.0 - f.array()).matrix()));
  d_gates.middleRows(2 * h, h) =
      d_cell.cwiseProduct(i).cwiseProduct((1.0 - g.array().square()).matrix());
  d_gates.middleRows(3 * h, h) =
      d_out.cwiseProduct(o.cwiseProduct((1.0 - o.array()).matrix()));

  grads.weights.noalias() += d_gates * tape.joined.transpose();
  grads.biases.noalias() += d_gates.rowwise().sum();

  Matrix d_joined = params.weights.transpose() * d_gates;
  return {d_joined.topRows(in), d_joined.bottomRows(h), d_cell.cwiseProduct(f)};
}

double gaussian_log_prob(const Vector& mean, const Vector& log_std, const Vector& action) {
  require(mean.size() == log_std.size() && mean.size() == action.size(), "gaussian lengths");
  double total = 0.0;
  for (Eigen::Index d = 0; d < mean.size(); ++d) {
    const double z = (action[d] - mean[d]) * std::exp(-log_std[d]);
    total += -0.5 * z * z - log_std[d] - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return total;
}

double gaussian_entropy(const Vector& log_std) {
  return log_std.sum() +
         0.5 * static_cast<double>(log_std.size()) *
             (1.0 + std::log(2.0 * std::numbers::pi));
}

SampledAction sample_action(const Vector& mean, const Vector& log_std, Rng& rng) {
  require(mean.size() == log_std.size(), "gaussian lengths");
  Vector action(mean.size());
  for (Eigen::Index d = 0; d < mean.size(); ++d) {
    action[d] = mean[d] + std::exp(log_std[d]) * rng.normal();
  }
  return {action, gaussian_log_prob(mean, log_std, action)};
}

AdamState make_adam_state(const ConstTensorList& params, double learning_rate) {
  AdamState state;
  state.learning_rate = learning_rate;
  for (const auto& p : params) {
    state.first_moment.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
    state.second_moment.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
  }
  return state;
}

void adam_update(const TensorList& params, const ConstTensorList& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw ConfigError("adam: tensor count mismatch");
  }
  for (std::size_t t = 0; t < grads.size(); ++t) {
    if (params[t].size() != grads[t].size() ||
        static_cast<Eigen::Index>(params[t].size()) != state.first_moment[t].size()) {
      throw ConfigError("adam: tensor " + std::to_string(t) + " shape mismatch");
    }
    for (std::size_t j = 0; j < grads[t].size(); ++j) {
      if (!std::isfinite(grads[t][j])) {
        throw TrainingError("adam: non-finite gradient in tensor " + std::to_string(t) +
                            " at index " + std::to_string(j));
      }
    }
  }
  ++state.step;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < grads.size(); ++t) {
    auto& m = state.first_moment[t];
    auto& v = state.second_moment[t];
    for (std::size_t j = 0; j < grads[t].size(); ++j) {
      const double g = grads[t][j];
      const auto idx = static_cast<Eigen::Index>(j);
      m[idx] = state.beta1 * m[idx] + (1.0 - state.beta1) * g;
      v[idx] = state.beta2 * v[idx] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[idx] / correction1;
      const double v_hat = v[idx] / correction2;
      params[t][j] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

double global_norm(const ConstTensorList& tensors) {
  double sq = 0.0;
  for (const auto& t : tensors) {
    for (double x : t) sq += x * x;
  }
  return std::sqrt(sq);
}

double clip_grad_norm(const TensorList& grads, double max_norm) {
  const double norm = global_norm(as_const(grads));
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (const auto& t : grads) {
      for (double& x : t) x *= scale;
    }
  }
  return norm;
}

void zero(const TensorList& tensors) {
  for (const auto& t : tensors) std::fill(t.begin(), t.end(), 0.0);
}

ConstTensorList as_const(const TensorList& tensors) {
  return ConstTensorList(tensors.begin(), tensors.end());
}

Vector flatten(const ConstTensorList& tensors) {
  std::size_t total = 0;
  for (const auto& t : tensors) total += t.size();
  Vector flat(static_cast<Eigen::Index>(total));
  Eigen::Index k = 0;
  for (const auto& t : tensors) {
    for (double x : t) flat[k++] = x;
  }
  return flat;
}

void unflatten(const Vector& flat, const TensorList& tensors) {
  Eigen::Index k = 0;
  for (const auto& t : tensors) {
    for (double& x : t) {
      if (k >= flat.size()) throw ConfigError("unflatten: vector too short");
      x = flat[k++];
    }
  }
  if (k != flat.size()) throw ConfigError("unflatten: vector too long");
}

void orthogonal_init(Matrix& weights, double gain, Rng& rng) {
  const Eigen::Index rows = weights.rows();
  const Eigen::Index cols = weights.cols();
  const Eigen::Index big = std::max(rows, cols);
  const Eigen::Index small = std::min(rows, cols);
  Matrix draw(big, small);
  for (Eigen::Index c = 0; c < small; ++c) {
    for (Eigen::Index r = 0; r < big; ++r) draw(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(draw);
  Matrix q = qr.householderQ() * Matrix::Identity(big, small);
  const Matrix r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < small; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  weights = gain * (rows >= cols ? q : Matrix(q.transpose()));
}

double finite_diff_check(const std::function<double()>& loss_fn, const TensorList& params,
                         const ConstTensorList& analytic, double epsilon) {
  if (params.size() != analytic.size()) throw ConfigError("finite_diff_check: tensor count");
  double worst = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size() != analytic[t].size()) throw ConfigError("finite_diff_check: shape");
    for (std::size_t j = 0; j < params[t].size(); ++j) {
      const double saved = params[t][j];
      params[t][j] = saved + epsilon;
      const double up = loss_fn();
      params[t][j] = saved - epsilon;
      const double down = loss_fn();
      params[t][j] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double err = std::abs(analytic[t][j] - numeric) /
                         std::max({1e-8, std::abs(numeric), std::abs(analytic[t][j])});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace ccl::nn
