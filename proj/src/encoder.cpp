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

#include "cclmarl/encoder.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cclmarl/errors.hpp"
#include "cclmarl/rng.hpp"

namespace ccl {

RandomEncoder::RandomEncoder(std::uint64_t seed, int obs_dim, int embedding_dim, int width)
    : seed_(seed), obs_dim_(obs_dim) {
  if (obs_dim < 1) throw ConfigError("encoder: obs_dim must be >= 1");
  if (embedding_dim < 1 || width < 1) throw ConfigError("encoder: sizes must be positive");
  const std::vector<int> sizes{obs_dim, width, width, width, embedding_dim};
  params_ = nn::MlpParams::zeros(sizes);
  Rng rng(seed);
  for (std::size_t i = 0; i < params_.layers.size(); ++i) {
    const bool last = i + 1 == params_.layers.size();
    nn::orthogonal_init(params_.layers[i].weights, last ? 1.0 : std::sqrt(2.0), rng);
  }
}

Embedding RandomEncoder::encode(const nn::Vector& observation) const {
  if (observation.size() != obs_dim_) {
    throw ConfigError("encode: observation has length " + std::to_string(observation.size()) +
                      ", encoder expects " + std::to_string(obs_dim_));
  }
  return nn::mlp_forward(params_, observation, nn::Activation::kSiLU, /*layer_norm=*/true);
}

RandomEncoder init_encoder(std::uint64_t seed, int obs_dim) { return RandomEncoder(seed, obs_dim); }

nn::Vector joint_embedding(std::span<const Embedding> embeddings) {
  Eigen::Index total = 0;
  for (const auto& e : embeddings) total += e.size();
  nn::Vector joint(total);
  Eigen::Index at = 0;
  for (const auto& e : embeddings) {
    joint.segment(at, e.size()) = e;
    at += e.size();
  }
  return joint;
}

Embedding embedding_block(const nn::Vector& joint, int agent, int embedding_dim) {
  if (agent < 0 || (agent + 1) * embedding_dim > joint.size()) {
    throw ConfigError("embedding_block: agent index out of range");
  }
  return joint.segment(static_cast<Eigen::Index>(agent) * embedding_dim, embedding_dim);
}

}  // namespace ccl
