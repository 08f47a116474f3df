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

#ifndef CCLMARL_TRAINER_HPP_
#define CCLMARL_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cclmarl/config.hpp"
#include "cclmarl/encoder.hpp"
#include "cclmarl/env.hpp"
#include "cclmarl/intrinsic.hpp"
#include "cclmarl/ppo.hpp"
#include "cclmarl/rng.hpp"

namespace ccl {

struct PolicyBundle {
  RoleModel team;
  std::optional<RoleModel> adversary;
};

PolicyBundle make_policies(const MultiAgentEnv& env, const PpoHyper& hyper, Rng& rng);

// Anything that picks actions for an episode: trained policies or scripts.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void begin_episode(const MultiAgentEnv& env, const EnvObservations& obs) = 0;
  virtual void act(const MultiAgentEnv& env, const EnvObservations& obs,
                   std::vector<nn::Vector>& team, std::vector<nn::Vector>& adversary) = 0;
};

// Drives both roles from a bundle. With a sampler actions are drawn from the
// Gaussian; without one the mean is used.
class PolicyController : public Controller {
 public:
  PolicyController(const PolicyBundle& policies, Rng* sampler);
  void begin_episode(const MultiAgentEnv& env, const EnvObservations& obs) override;
  void act(const MultiAgentEnv& env, const EnvObservations& obs, std::vector<nn::Vector>& team,
           std::vector<nn::Vector>& adversary) override;

 private:
  const PolicyBundle& policies_;
  Rng* sampler_;
  nn::BatchRecurrentState team_state_;
  nn::BatchRecurrentState adversary_state_;
};

struct RolloutBuffer {
  RoleBatch team;
  std::optional<RoleBatch> adversary;
  std::int64_t env_steps = 0;
  // Mean per-step intrinsic part of each team agent's reward.
  std::vector<double> intrinsic_means;
  // Mean over episodes of the summed environment team reward.
  double team_reward = 0.0;
};

// Receives one JSON object per (step, agent) of the first collected episode.
using DiagnosticsSink = std::function<void(const nlohmann::json&)>;

RolloutBuffer collect_rollout(const PolicyBundle& policies, MultiAgentEnv& env,
                              IntrinsicEngine* engine, const IntrinsicConfig& intrinsic,
                              const PpoHyper& hyper, Rng& env_rng, Rng& sample_rng,
                              const DiagnosticsSink& diagnostics = {});

struct EvalResult {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::vector<double> returns;
};

// Episode return is the environment team reward summed over the episode,
// which for the sparse tasks is the terminal team reward.
EvalResult evaluate(Controller& controller, const MultiAgentEnv& prototype, int episodes,
                    std::uint64_t seed);
EvalResult evaluate(const PolicyBundle& policies, const MultiAgentEnv& prototype, int episodes,
                    std::uint64_t seed);

// One row per step and team agent: t, agent, x, y, V, team reward, combined
// reward under the run's intrinsic config.
void write_episode_trace(std::ostream& out, Controller& controller, MultiAgentEnv& env,
                         IntrinsicEngine* engine, const IntrinsicConfig& intrinsic, Rng& env_rng);

struct IterationRecord {
  int iteration = 0;
  std::int64_t env_steps = 0;
  EvalResult eval;
  double train_team_reward = 0.0;
  std::vector<double> intrinsic_means;
  UpdateMetrics team;
  std::optional<UpdateMetrics> adversary;
};

std::vector<std::string> metrics_header(int team_size, bool has_adversary);
std::string metrics_row(const IterationRecord& record);

// Owns every piece of mutable training state for one run.
class Trainer {
 public:
  explicit Trainer(RunConfig config);

  IterationRecord run_iteration(const DiagnosticsSink& diagnostics = {});

  const RunConfig& config() const { return config_; }
  const PolicyBundle& policies() const { return policies_; }
  const MultiAgentEnv& env() const { return *env_; }
  int iteration() const { return iteration_; }
  std::int64_t env_steps() const { return env_steps_; }
  const std::vector<RandomEncoder>& encoders() const { return encoders_; }
  std::vector<std::uint64_t> encoder_seeds() const;

  nlohmann::json checkpoint() const;
  void restore(const nlohmann::json& checkpoint);

 private:
  RunConfig config_;
  IntrinsicConfig intrinsic_;
  std::unique_ptr<MultiAgentEnv> env_;
  std::vector<RandomEncoder> encoders_;
  std::unique_ptr<IntrinsicEngine> engine_;
  PolicyBundle policies_;
  Rng env_rng_;
  Rng sample_rng_;
  Rng update_rng_;
  int iteration_ = 0;
  std::int64_t env_steps_ = 0;
};

nlohmann::json policies_to_json(const PolicyBundle& policies);
void policies_from_json(const nlohmann::json& j, PolicyBundle& policies);

inline constexpr const char* kCheckpointFormat = "cclmarl-checkpoint";
inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir, int iteration);
std::optional<std::filesystem::path> latest_checkpoint(const std::filesystem::path& run_dir);
nlohmann::json read_json(const std::filesystem::path& path);

struct TrainOptions {
  bool resume = false;
  std::ostream* log = nullptr;
};

// Runs the configured number of iterations, writing manifest.json,
// metrics.csv, diagnostics.jsonl and checkpoints/ under the run directory.
std::filesystem::path train(const RunConfig& config, const TrainOptions& options = {});

// Rebuilds a trainer from a run directory at a given checkpoint iteration
// (latest when negative).
Trainer load_trainer(const std::filesystem::path& run_dir, int iteration = -1);

}  // namespace ccl

#endif  // CCLMARL_TRAINER_HPP_
