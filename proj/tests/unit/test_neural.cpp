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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <utility>

#include "cclmarl/errors.hpp"
#include "cclmarl/neural.hpp"
#include "oracles.hpp"

using namespace ccl;
using nn::Matrix;
using nn::Vector;

namespace {

void fill_normal(const nn::TensorList& tensors, Rng& rng, double scale) {
  for (auto t : tensors) {
    for (double& v : t) v = scale * rng.normal();
  }
}

oracle::DenseLayer to_oracle(const nn::DenseLayerParams& p) {
  oracle::DenseLayer layer;
  for (Eigen::Index r = 0; r < p.weights.rows(); ++r) {
    layer.w.emplace_back();
    for (Eigen::Index c = 0; c < p.weights.cols(); ++c) layer.w.back().push_back(p.weights(r, c));
    layer.b.push_back(p.biases[r]);
  }
  return layer;
}

std::vector<double> as_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("mlp: zero network maps everything to zero") {
  const int sizes[] = {3, 5, 2};
  const nn::MlpParams p = nn::MlpParams::zeros(sizes);
  const Vector out = nn::mlp_forward(p, Vector(Vector::Constant(3, 7.0)), nn::Activation::kReLU);
  CHECK(out.isZero(0.0));
}

TEST_CASE("mlp: ReLU on identity weights clips negatives") {
  const int sizes[] = {2, 2, 2};
  nn::MlpParams p = nn::MlpParams::zeros(sizes);
  p.layers[0].weights.setIdentity();
  p.layers[1].weights.setIdentity();
  const Vector out = nn::mlp_forward(p, Vector{{-1.0, 2.0}}, nn::Activation::kReLU);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 2.0);
}

TEST_CASE("mlp: random three-layer net agrees with loop oracle") {
  Rng rng(1);
  const int sizes[] = {6, 9, 7, 3};
  nn::MlpParams p = nn::MlpParams::zeros(sizes);
  fill_normal(p.tensors(), rng, 0.7);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(6);
    for (auto& v : x) v = rng.normal();
    std::vector<double> h = as_std(x);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      h = oracle::dense(to_oracle(p.layers[l]), h);
      if (l + 1 < p.layers.size()) h = oracle::relu(h);
    }
    const Vector got = nn::mlp_forward(p, x, nn::Activation::kReLU);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - h[static_cast<std::size_t>(i)]) < 1e-12);
  }
}

TEST_CASE("mlp: batch forward equals per-column forward bit for bit") {
  Rng rng(2);
  const int sizes[] = {4, 8, 2};
  nn::MlpParams p = nn::MlpParams::zeros(sizes);
  fill_normal(p.tensors(), rng, 1.0);
  Matrix x(4, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const Matrix batch = nn::mlp_forward(p, x, nn::Activation::kSiLU, true);
  for (int c = 0; c < 5; ++c) {
    const Vector single = nn::mlp_forward(p, Vector(x.col(c)), nn::Activation::kSiLU, true);
    CHECK((batch.col(c) - single).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("mlp: input size mismatch is a configuration error") {
  const int sizes[] = {3, 2};
  const nn::MlpParams p = nn::MlpParams::zeros(sizes);
  CHECK_THROWS_AS(nn::mlp_forward(p, Vector(Vector::Zero(4)), nn::Activation::kReLU), ConfigError);
}

TEST_CASE("lstm: zero parameters and state give zero output") {
  const nn::LstmParams p = nn::LstmParams::zeros(3, 4);
  const auto r = nn::lstm_step(p, Vector::Constant(3, 2.0), nn::RecurrentState::zeros(4));
  CHECK(r.output.isZero(0.0));
  CHECK(r.state.cell.isZero(0.0));
}

TEST_CASE("lstm: open gates pass tanh of the candidate through") {
  nn::LstmParams p = nn::LstmParams::zeros(1, 1);
  // Rows: input, forget, cell, output gates.
  p.biases << 50.0, -50.0, 0.0, 50.0;
  p.weights(2, 0) = 1.0;
  const double x = 0.3;
  const auto r = nn::lstm_step(p, Vector::Constant(1, x), nn::RecurrentState::zeros(1));
  CHECK(r.output[0] == doctest::Approx(std::tanh(std::tanh(x))).epsilon(1e-12));
}

TEST_CASE("lstm: random step agrees with scalar gate oracle") {
  Rng rng(3);
  nn::LstmParams p = nn::LstmParams::zeros(5, 6);
  fill_normal(p.tensors(), rng, 0.8);
  nn::RecurrentState s = nn::RecurrentState::zeros(6);
  for (auto& v : s.hidden) v = rng.normal();
  for (auto& v : s.cell) v = rng.normal();
  Vector x(5);
  for (auto& v : x) v = rng.normal();

  std::vector<std::vector<double>> w;
  for (Eigen::Index r = 0; r < p.weights.rows(); ++r) {
    w.emplace_back(p.weights.cols());
    for (Eigen::Index c = 0; c < p.weights.cols(); ++c) w.back()[static_cast<std::size_t>(c)] = p.weights(r, c);
  }
  const oracle::LstmStep want =
      oracle::lstm(w, as_std(p.biases), as_std(x), {as_std(s.hidden), as_std(s.cell)});
  const auto got = nn::lstm_step(p, x, s);
  for (int j = 0; j < 6; ++j) {
    CHECK(std::abs(got.output[j] - want.h[static_cast<std::size_t>(j)]) < 1e-12);
    CHECK(std::abs(got.state.cell[j] - want.c[static_cast<std::size_t>(j)]) < 1e-12);
  }
}

TEST_CASE("lstm: backward through a short sequence matches finite differences") {
  Rng rng(4);
  nn::LstmParams p = nn::LstmParams::zeros(3, 4);
  fill_normal(p.tensors(), rng, 0.6);
  std::vector<Matrix> xs;
  for (int t = 0; t < 4; ++t) xs.push_back(Matrix::Random(3, 2));
  const Matrix target = Matrix::Random(4, 2);
  auto loss = [&] {
    nn::BatchRecurrentState s = nn::BatchRecurrentState::zeros(4, 2);
    Matrix h;
    for (const auto& x : xs) h = nn::lstm_step_batch(p, x, s);
    return 0.5 * (h - target).squaredNorm();
  };
  nn::LstmParams grads = nn::LstmParams::zeros(3, 4);
  std::vector<nn::LstmStepTape> tapes(xs.size());
  nn::BatchRecurrentState s = nn::BatchRecurrentState::zeros(4, 2);
  Matrix h;
  for (std::size_t t = 0; t < xs.size(); ++t) h = nn::lstm_step_batch(p, xs[t], s, &tapes[t]);
  Matrix gh = h - target;
  Matrix gc = Matrix::Zero(4, 2);
  for (std::size_t t = xs.size(); t-- > 0;) {
    const nn::LstmStepGrad g = nn::lstm_step_backward(p, tapes[t], gh, gc, grads);
    gh = g.hidden_prev;
    gc = g.cell_prev;
  }
  CHECK(nn::finite_diff_check(loss, p.tensors(), std::as_const(grads).tensors()) < 1e-4);
}

TEST_CASE("gaussian: log density closed forms") {
  const Vector zero = Vector::Zero(1);
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  CHECK(nn::gaussian_log_prob(zero, zero, zero) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  CHECK(nn::gaussian_log_prob(zero, zero, Vector::Ones(1)) ==
        doctest::Approx(-0.5 - half_log_2pi).epsilon(1e-14));
  Rng rng(5);
  const Vector mean{{0.3, -1.2}};
  const Vector log_std{{0.1, -0.4}};
  const double at_mean = nn::gaussian_log_prob(mean, log_std, mean);
  for (int i = 0; i < 100; ++i) {
    const Vector a{{rng.normal(), rng.normal()}};
    CHECK(nn::gaussian_log_prob(mean, log_std, a) <= at_mean);
  }
}

TEST_CASE("gaussian: sampling") {
  Rng a(6);
  Rng b(6);
  const Vector mean{{0.5, -0.5}};
  const Vector log_std{{0.0, 0.2}};
  const auto s1 = nn::sample_action(mean, log_std, a);
  const auto s2 = nn::sample_action(mean, log_std, b);
  CHECK(s1.action == s2.action);
  CHECK(s1.log_prob == s2.log_prob);
  CHECK(s1.log_prob == doctest::Approx(nn::gaussian_log_prob(mean, log_std, s1.action)).epsilon(1e-13));

  const auto tight = nn::sample_action(mean, Vector::Constant(2, -20.0), a);
  CHECK((tight.action - mean).cwiseAbs().maxCoeff() < 1e-8);

  Rng r(7);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = nn::sample_action(Vector::Zero(1), Vector::Zero(1), r).action[0];
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(std::sqrt(sq / n - (sum / n) * (sum / n)) - 1.0) < 0.02);
}

TEST_CASE("gaussian: log-prob gradient check") {
  Vector mean{{0.2, -0.7, 1.1}};
  Vector log_std{{0.3, -0.2, 0.05}};
  const Vector action{{0.5, 0.1, 0.4}};
  auto loss = [&] { return nn::gaussian_log_prob(mean, log_std, action); };
  const Vector inv_var = (-2.0 * log_std.array()).exp();
  const Vector diff = action - mean;
  Vector g_mean = (diff.array() * inv_var.array()).matrix();
  Vector g_log_std = (diff.array().square() * inv_var.array() - 1.0).matrix();
  nn::TensorList params{{mean.data(), 3}, {log_std.data(), 3}};
  nn::ConstTensorList analytic{{g_mean.data(), 3}, {g_log_std.data(), 3}};
  CHECK(nn::finite_diff_check(loss, params, analytic) < 1e-4);
}

TEST_CASE("adam: zero gradient leaves parameters and counts the step") {
  Vector p{{1.0, -2.0}};
  const Vector g = Vector::Zero(2);
  nn::TensorList params{{p.data(), 2}};
  nn::ConstTensorList grads{{g.data(), 2}};
  nn::AdamState s = nn::make_adam_state(nn::as_const(params), 1e-3);
  for (int i = 0; i < 5; ++i) nn::adam_update(params, grads, s);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -2.0);
  CHECK(s.step == 5);
}

TEST_CASE("adam: first step with unit gradient moves by the learning rate") {
  Vector p{{0.0}};
  const Vector g{{1.0}};
  nn::TensorList params{{p.data(), 1}};
  nn::AdamState s = nn::make_adam_state(nn::as_const(params), 1e-3);
  nn::adam_update(params, {{g.data(), 1}}, s);
  // m_hat = 1, v_hat = 1, step = lr / (1 + eps).
  CHECK(p[0] == doctest::Approx(-1e-3 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam: two steps decrease a quadratic; non-finite gradient throws") {
  Vector p{{3.0}};
  nn::TensorList params{{p.data(), 1}};
  nn::AdamState s = nn::make_adam_state(nn::as_const(params), 0.1);
  double previous = 0.5 * p[0] * p[0];
  for (int i = 0; i < 2; ++i) {
    const Vector g{{p[0]}};
    nn::adam_update(params, {{g.data(), 1}}, s);
    const double now = 0.5 * p[0] * p[0];
    CHECK(now < previous);
    previous = now;
  }
  const Vector bad{{NAN}};
  const double before = p[0];
  CHECK_THROWS_AS(nn::adam_update(params, {{bad.data(), 1}}, s), TrainingError);
  CHECK(p[0] == before);
}

TEST_CASE("clip_grad_norm: post-clip norm bounded, returns pre-clip norm") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Vector a(5);
    Vector b(3);
    const double scale = std::exp(rng.uniform(-5.0, 5.0));
    for (auto& v : a) v = scale * rng.normal();
    for (auto& v : b) v = scale * rng.normal();
    nn::TensorList t{{a.data(), 5}, {b.data(), 3}};
    const double before = std::sqrt(a.squaredNorm() + b.squaredNorm());
    CHECK(nn::clip_grad_norm(t, 1.0) == doctest::Approx(before).epsilon(1e-12));
    CHECK(nn::global_norm(nn::as_const(t)) <= 1.0 + 1e-9);
  }
}

TEST_CASE("finite_diff_check: quadratic and a random MLP") {
  Vector p{{3.0}};
  const Vector g{{3.0}};
  auto quad = [&] { return 0.5 * p[0] * p[0]; };
  CHECK(nn::finite_diff_check(quad, {{p.data(), 1}}, {{g.data(), 1}}) < 1e-8);

  Rng rng(9);
  const int sizes[] = {4, 6, 2};
  nn::MlpParams mlp = nn::MlpParams::zeros(sizes);
  fill_normal(mlp.tensors(), rng, 0.8);
  const Matrix x = Matrix::Random(4, 7);
  const Matrix y = Matrix::Random(2, 7);
  auto mse = [&] {
    return 0.5 * (nn::mlp_forward(mlp, x, nn::Activation::kReLU) - y).squaredNorm() / 7.0;
  };
  nn::MlpTape tape;
  const Matrix out = nn::mlp_forward_taped(mlp, x, nn::Activation::kReLU, tape);
  nn::MlpParams grads = nn::MlpParams::zeros(sizes);
  nn::mlp_backward(mlp, tape, nn::Activation::kReLU, (out - y) / 7.0, grads);
  CHECK(nn::finite_diff_check(mse, mlp.tensors(), std::as_const(grads).tensors()) < 1e-4);
}

TEST_CASE("orthogonal_init: columns orthonormal up to gain") {
  Rng rng(10);
  Matrix w(8, 5);
  nn::orthogonal_init(w, 2.0, rng);
  const Matrix gram = w.transpose() * w;
  CHECK((gram - 4.0 * Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("flatten and unflatten round trip") {
  Vector a{{1.0, 2.0}};
  Vector b{{3.0}};
  nn::TensorList t{{a.data(), 2}, {b.data(), 1}};
  const Vector flat = nn::flatten(nn::as_const(t));
  CHECK(flat.size() == 3);
  nn::unflatten(Vector{{4.0, 5.0, 6.0}}, t);
  CHECK(a[1] == 5.0);
  CHECK(b[0] == 6.0);
}
