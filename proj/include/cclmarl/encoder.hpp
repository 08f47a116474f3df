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

#ifndef CCLMARL_ENCODER_HPP_
#define CCLMARL_ENCODER_HPP_

#include <cstdint>
#include <span>

#include "cclmarl/neural.hpp"

namespace ccl {

inline constexpr int kEmbeddingDim = 4;
inline constexpr int kEncoderWidth = 64;

using Embedding = nn::Vector;

// Fixed random projection of a local observation: three width-64 layers with
// layer norm and SiLU, then a linear map to the embedding. Weights are drawn
// once from the seed and never trained.
class RandomEncoder {
 public:
  RandomEncoder(std::uint64_t seed, int obs_dim, int embedding_dim = kEmbeddingDim,
                int width = kEncoderWidth);

  Embedding encode(const nn::Vector& observation) const;

  const nn::MlpParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  int observation_dim() const { return obs_dim_; }
  int embedding_dim() const { return static_cast<int>(params_.output_dim()); }

 private:
  std::uint64_t seed_;
  int obs_dim_;
  nn::MlpParams params_;
};

// Convenience wrapper mirroring the encoder construction contract.
RandomEncoder init_encoder(std::uint64_t seed, int obs_dim);

// Concatenates per-agent embeddings in agent-index order.
nn::Vector joint_embedding(std::span<const Embedding> embeddings);

// Block `agent` of a joint embedding built from `embedding_dim`-sized parts.
Embedding embedding_block(const nn::Vector& joint, int agent, int embedding_dim = kEmbeddingDim);

}  // namespace ccl

#endif  // CCLMARL_ENCODER_HPP_
