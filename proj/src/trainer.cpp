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

#include "cclmarl/trainer.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cclmarl/errors.hpp"

namespace ccl {

namespace fs = std::filesystem;
using nlohmann::json;

PolicyBundle make_policies(const MultiAgentEnv& env, const PpoHyper& hyper, Rng& rng) {
  const int n = env.team_size();
  const int obs = env.team_observation_dim();
  PolicyBundle bundle{make_role_model(n, obs, n * obs + n, env.action_dim(), hyper, rng), {}};
  if (env.adversary_count() > 0) {
    const int m = env.adversary_count();
    const int adv_obs = env.adversary_observation_dim();
    bundle.adversary = make_role_model(m, adv_obs, m * adv_obs + m, env.action_dim(), hyper, rng);
  }
  return bundle;
}

namespace {

nn::BatchRecurrentState fresh_state(const RoleModel& model) {
  return nn::BatchRecurrentState::zeros(model.actor.hidden_dim(), model.agents);
}

std::vector<nn::Vector> role_actions(const RoleModel& model, const std::vector<nn::Vector>& obs,
                                     nn::BatchRecurrentState& state, Rng* sampler) {
  const nn::Matrix means = actor_step(model.actor, actor_inputs(obs), state);
  std::vector<nn::Vector> out;
  out.reserve(obs.size());
  for (Eigen::Index i = 0; i < means.cols(); ++i) {
    if (sampler != nullptr) {
      out.push_back(nn::sample_action(means.col(i), model.actor.log_std, *sampler).action);
    } else {
      out.emplace_back(means.col(i));
    }
  }
  return out;
}

}  // namespace

PolicyController::PolicyController(const PolicyBundle& policies, Rng* sampler)
    : policies_(policies), sampler_(sampler) {}

void PolicyController::begin_episode(const MultiAgentEnv&, const EnvObservations&) {
  team_state_ = fresh_state(policies_.team);
  if (policies_.adversary) adversary_state_ = fresh_state(*policies_.adversary);
}

void PolicyController::act(const MultiAgentEnv&, const EnvObservations& obs,
                           std::vector<nn::Vector>& team, std::vector<nn::Vector>& adversary) {
  team = role_actions(policies_.team, obs.team, team_state_, sampler_);
  adversary.clear();
  if (policies_.adversary && !obs.adversary.empty()) {
    adversary = role_actions(*policies_.adversary, obs.adversary, adversary_state_, sampler_);
  }
}

namespace {

RoleBatch empty_batch(int agents, int episode_length, int episodes) {
  RoleBatch b;
  b.agents = agents;
  b.episode_length = episode_length;
  const auto e = static_cast<std::size_t>(episodes);
  b.actor_inputs.reserve(e);
  b.critic_inputs.reserve(e);
  b.actions.reserve(e);
  return b;
}

void open_episode(RoleBatch& b) {
  const auto t = static_cast<std::size_t>(b.episode_length);
  b.actor_inputs.emplace_back().reserve(t);
  b.critic_inputs.emplace_back().reserve(t);
  b.actions.emplace_back().reserve(t);
  b.log_probs.emplace_back(b.episode_length, b.agents);
  b.values.emplace_back(b.episode_length, b.agents);
  b.rewards.emplace_back(b.episode_length, b.agents);
  b.dones.emplace_back(t, false);
}

// Samples actions for one role and records the pre-step half of the
// transition at step t.
std::vector<nn::Vector> record_policy_step(const RoleModel& model, RoleBatch& batch,
                                           const std::vector<nn::Vector>& obs,
                                           nn::BatchRecurrentState& state, Rng& rng, int t) {
  nn::Matrix ain = actor_inputs(obs);
  nn::Matrix cin = centralized_critic_inputs(obs);
  const nn::Matrix means = actor_step(model.actor, ain, state);
  const nn::Matrix values = critic_forward(model.critic, cin);
  nn::Matrix actions(means.rows(), means.cols());
  std::vector<nn::Vector> out;
  out.reserve(obs.size());
  for (Eigen::Index i = 0; i < means.cols(); ++i) {
    nn::SampledAction s = nn::sample_action(means.col(i), model.actor.log_std, rng);
    actions.col(i) = s.action;
    batch.log_probs.back()(t, i) = s.log_prob;
    batch.values.back()(t, i) = values(0, i);
    out.push_back(std::move(s.action));
  }
  batch.actor_inputs.back().push_back(std::move(ain));
  batch.critic_inputs.back().push_back(std::move(cin));
  batch.actions.back().push_back(std::move(actions));
  return out;
}

double saliency_for(const MultiAgentEnv& env, const IntrinsicConfig& intrinsic, int agent) {
  return intrinsic.saliency_mode == SaliencyMode::kConstantOne ? 1.0 : env.saliency(agent);
}

json diagnostics_record(int t, int agent, double saliency, double reward,
                        const IntrinsicTerms& terms) {
  const auto a = static_cast<std::size_t>(agent);
  json j{{"t", t},
         {"agent", agent},
         {"saliency", saliency},
         {"reward", reward},
         {"ccl", terms.ccl[a]},
         {"oem", terms.oem[a]}};
  if (a < terms.ccl_detail.diagnostics.size()) {
    const CclAgentDiagnostics& d = terms.ccl_detail.diagnostics[a];
    j["raw_mean"] = d.raw_mean;
    json per_k = json::array();
    for (const CclKDiagnostics& k : d.per_k) {
      per_k.push_back({{"k", k.k},
                       {"eps_act", k.eps_act},
                       {"eps_cfact", k.eps_cfact},
                       {"eps_shared", k.eps_shared},
                       {"n_act", k.n_act},
                       {"n_cfact", k.n_cfact},
                       {"raw", k.raw}});
    }
    j["per_k"] = std::move(per_k);
  }
  return j;
}

}  // namespace

RolloutBuffer collect_rollout(const PolicyBundle& policies, MultiAgentEnv& env,
                              IntrinsicEngine* engine, const IntrinsicConfig& intrinsic,
                              const PpoHyper& hyper, Rng& env_rng, Rng& sample_rng,
                              const DiagnosticsSink& diagnostics) {
  const int horizon = env.episode_length();
  const int episodes = std::max(1, hyper.rollout_steps / horizon);
  const int n = env.team_size();
  const bool adversarial = policies.adversary.has_value() && env.adversary_count() > 0;

  RolloutBuffer buffer;
  buffer.team = empty_batch(n, horizon, episodes);
  if (adversarial) buffer.adversary = empty_batch(env.adversary_count(), horizon, episodes);
  buffer.intrinsic_means.assign(static_cast<std::size_t>(n), 0.0);

  IntrinsicTerms none;
  none.ccl.assign(static_cast<std::size_t>(n), 0.0);
  none.oem.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<nn::Vector> no_actions;

  for (int e = 0; e < episodes; ++e) {
    EnvObservations obs = env.reset(env_rng);
    if (engine != nullptr) engine->begin_episode(obs.team);
    open_episode(buffer.team);
    if (adversarial) open_episode(*buffer.adversary);
    nn::BatchRecurrentState team_state = fresh_state(policies.team);
    nn::BatchRecurrentState adv_state;
    if (adversarial) adv_state = fresh_state(*policies.adversary);
    double episode_team = 0.0;

    for (int t = 0; t < horizon; ++t) {
      const std::vector<nn::Vector> team_actions =
          record_policy_step(policies.team, buffer.team, obs.team, team_state, sample_rng, t);
      const std::vector<nn::Vector> adv_actions =
          adversarial ? record_policy_step(*policies.adversary, *buffer.adversary, obs.adversary,
                                           adv_state, sample_rng, t)
                      : no_actions;
      EnvStep step = env.step(team_actions, adv_actions);
      const bool last = t + 1 == horizon;
      if (step.done != last) throw TrainingError("environment horizon mismatch in " + env.name());

      const IntrinsicTerms terms = engine != nullptr ? engine->step(step.observations.team) : none;
      for (int i = 0; i < n; ++i) {
        const auto is = static_cast<std::size_t>(i);
        const double v = saliency_for(env, intrinsic, i);
        const double r = combine_rewards(step.team_reward, v, terms.ccl[is], terms.oem[is], intrinsic);
        if (!std::isfinite(r)) throw TrainingError("non-finite reward from " + env.name());
        buffer.team.rewards.back()(t, i) = r;
        buffer.intrinsic_means[is] += r - step.team_reward;
        if (e == 0 && diagnostics) diagnostics(diagnostics_record(t + 1, i, v, r, terms));
      }
      buffer.team.dones.back()[static_cast<std::size_t>(t)] = step.done;
      if (adversarial) {
        buffer.adversary->rewards.back().row(t).setConstant(step.adversary_reward);
        buffer.adversary->dones.back()[static_cast<std::size_t>(t)] = step.done;
      }
      episode_team += step.team_reward;
      obs = std::move(step.observations);
    }
    buffer.team_reward += episode_team;
  }
  const double steps = static_cast<double>(episodes) * horizon;
  buffer.env_steps = static_cast<std::int64_t>(steps);
  buffer.team_reward /= episodes;
  for (double& m : buffer.intrinsic_means) m /= steps;
  return buffer;
}

EvalResult evaluate(Controller& controller, const MultiAgentEnv& prototype, int episodes,
                    std::uint64_t seed) {
  std::unique_ptr<MultiAgentEnv> env = prototype.clone_fresh();
  Rng rng(seed);
  EvalResult result;
  std::vector<nn::Vector> team;
  std::vector<nn::Vector> adversary;
  for (int e = 0; e < episodes; ++e) {
    EnvObservations obs = env->reset(rng);
    controller.begin_episode(*env, obs);
    double total = 0.0;
    for (int t = 0; t < env->episode_length(); ++t) {
      controller.act(*env, obs, team, adversary);
      EnvStep step = env->step(team, adversary);
      total += step.team_reward;
      obs = std::move(step.observations);
      if (step.done) break;
    }
    result.returns.push_back(total);
  }
  if (episodes > 0) {
    double sum = 0.0;
    for (double r : result.returns) sum += r;
    result.mean = sum / episodes;
    double sq = 0.0;
    for (double r : result.returns) sq += (r - result.mean) * (r - result.mean);
    result.std = std::sqrt(sq / episodes);
  }
  return result;
}

EvalResult evaluate(const PolicyBundle& policies, const MultiAgentEnv& prototype, int episodes,
                    std::uint64_t seed) {
  PolicyController controller(policies, nullptr);
  return evaluate(controller, prototype, episodes, seed);
}

void write_episode_trace(std::ostream& out, Controller& controller, MultiAgentEnv& env,
                         IntrinsicEngine* engine, const IntrinsicConfig& intrinsic, Rng& env_rng) {
  out << "t,agent,x,y,V,team_reward,reward\n";
  EnvObservations obs = env.reset(env_rng);
  controller.begin_episode(env, obs);
  if (engine != nullptr) engine->begin_episode(obs.team);
  const auto n = static_cast<std::size_t>(env.team_size());
  std::vector<nn::Vector> team;
  std::vector<nn::Vector> adversary;
  char line[256];
  for (int t = 0; t < env.episode_length(); ++t) {
    controller.act(env, obs, team, adversary);
    EnvStep step = env.step(team, adversary);
    std::vector<double> ccl(n, 0.0);
    std::vector<double> oem(n, 0.0);
    if (engine != nullptr) {
      IntrinsicTerms terms = engine->step(step.observations.team);
      ccl = terms.ccl;
      oem = terms.oem;
    }
    const std::vector<Vec2> positions = env.team_positions();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = saliency_for(env, intrinsic, static_cast<int>(i));
      const double r = combine_rewards(step.team_reward, v, ccl[i], oem[i], intrinsic);
      std::snprintf(line, sizeof line, "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", t + 1, i,
                    positions[i].x(), positions[i].y(), v, step.team_reward, r);
      out << line;
    }
    obs = std::move(step.observations);
    if (step.done) break;
  }
}

std::vector<std::string> metrics_header(int team_size, bool has_adversary) {
  std::vector<std::string> cols{"iteration", "env_steps", "eval_mean", "eval_std",
                                "train_team_reward"};
  for (int i = 0; i < team_size; ++i) cols.push_back("intrinsic_agent_" + std::to_string(i));
  for (const char* c : {"policy_loss", "value_loss", "entropy", "clip_fraction", "approx_kl",
                        "actor_grad_norm", "critic_grad_norm"}) {
    cols.emplace_back(c);
  }
  if (has_adversary) {
    for (const char* c : {"adv_policy_loss", "adv_value_loss", "adv_entropy"}) cols.emplace_back(c);
  }
  return cols;
}

std::string metrics_row(const IterationRecord& r) {
  std::string row = std::to_string(r.iteration) + "," + std::to_string(r.env_steps);
  char buf[64];
  auto add = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    row += buf;
  };
  add(r.eval.mean);
  add(r.eval.std);
  add(r.train_team_reward);
  for (double v : r.intrinsic_means) add(v);
  for (double v : {r.team.policy_loss, r.team.value_loss, r.team.entropy, r.team.clip_fraction,
                   r.team.approx_kl, r.team.actor_grad_norm, r.team.critic_grad_norm}) {
    add(v);
  }
  if (r.adversary) {
    add(r.adversary->policy_loss);
    add(r.adversary->value_loss);
    add(r.adversary->entropy);
  }
  return row;
}

Trainer::Trainer(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  intrinsic_ = config_.intrinsic.to_config(config_.env.kind);
  env_ = make_env(config_);
  const std::uint64_t seed = config_.train.seed;
  const int n = env_->team_size();
  const int count = config_.encoder.shared ? 1 : n;
  encoders_.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    encoders_.emplace_back(derive_seed(seed, "encoder", static_cast<std::uint64_t>(i)),
                           env_->team_observation_dim());
  }
  if (intrinsic_.mode != IntrinsicMode::kNone) {
    std::vector<const RandomEncoder*> per_agent;
    for (int i = 0; i < n; ++i) {
      per_agent.push_back(&encoders_[config_.encoder.shared ? 0 : static_cast<std::size_t>(i)]);
    }
    engine_ = std::make_unique<IntrinsicEngine>(intrinsic_, std::move(per_agent),
                                                env_->team_observation_dim());
  }
  Rng init(derive_seed(seed, "policy_init"));
  policies_ = make_policies(*env_, config_.ppo, init);
  env_rng_ = Rng(derive_seed(seed, "env"));
  sample_rng_ = Rng(derive_seed(seed, "sample"));
  update_rng_ = Rng(derive_seed(seed, "update"));
}

std::vector<std::uint64_t> Trainer::encoder_seeds() const {
  std::vector<std::uint64_t> out;
  for (const auto& e : encoders_) out.push_back(e.seed());
  return out;
}

IterationRecord Trainer::run_iteration(const DiagnosticsSink& diagnostics) {
  IterationRecord record;
  record.iteration = iteration_ + 1;
  DiagnosticsSink sink;
  if (diagnostics) {
    sink = [&](const json& j) {
      json tagged = j;
      tagged["iteration"] = record.iteration;
      diagnostics(tagged);
    };
  }
  RolloutBuffer buffer = collect_rollout(policies_, *env_, engine_.get(), intrinsic_, config_.ppo,
                                         env_rng_, sample_rng_, sink);
  const PpoHyper& ppo = config_.ppo;
  compute_advantages(buffer.team, ppo.gamma, ppo.gae_lambda, ppo.normalize_advantages);
  record.team = ppo_update(policies_.team, buffer.team, ppo, update_rng_);
  if (buffer.adversary) {
    compute_advantages(*buffer.adversary, ppo.gamma, ppo.gae_lambda, ppo.normalize_advantages);
    record.adversary = ppo_update(*policies_.adversary, *buffer.adversary, ppo, update_rng_);
  }
  iteration_ = record.iteration;
  env_steps_ += buffer.env_steps;
  record.env_steps = env_steps_;
  record.train_team_reward = buffer.team_reward;
  record.intrinsic_means = std::move(buffer.intrinsic_means);
  record.eval = evaluate(policies_, *env_, config_.train.eval_episodes,
                         derive_seed(config_.train.seed, "eval",
                                     static_cast<std::uint64_t>(iteration_)));
  return record;
}

namespace {

json flat_json(const nn::ConstTensorList& tensors) {
  const nn::Vector flat = nn::flatten(tensors);
  return json(std::vector<double>(flat.data(), flat.data() + flat.size()));
}

void flat_restore(const json& j, const nn::TensorList& tensors, const char* what) {
  const auto values = j.get<std::vector<double>>();
  std::size_t expected = 0;
  for (const auto& t : tensors) expected += t.size();
  if (values.size() != expected) {
    throw TrainingError(std::string("checkpoint: size mismatch in ") + what);
  }
  nn::unflatten(Eigen::Map<const nn::Vector>(values.data(), static_cast<Eigen::Index>(values.size())),
                tensors);
}

nn::TensorList moment_tensors(std::vector<nn::Vector>& moments) {
  nn::TensorList out;
  for (auto& m : moments) out.emplace_back(m.data(), static_cast<std::size_t>(m.size()));
  return out;
}

nn::ConstTensorList moment_tensors(const std::vector<nn::Vector>& moments) {
  nn::ConstTensorList out;
  for (const auto& m : moments) out.emplace_back(m.data(), static_cast<std::size_t>(m.size()));
  return out;
}

json adam_json(const nn::AdamState& s) {
  return {{"step", s.step},
          {"learning_rate", s.learning_rate},
          {"first_moment", flat_json(moment_tensors(s.first_moment))},
          {"second_moment", flat_json(moment_tensors(s.second_moment))}};
}

void adam_restore(const json& j, nn::AdamState& s) {
  s.step = j.at("step").get<std::int64_t>();
  s.learning_rate = j.at("learning_rate").get<double>();
  flat_restore(j.at("first_moment"), moment_tensors(s.first_moment), "adam first moment");
  flat_restore(j.at("second_moment"), moment_tensors(s.second_moment), "adam second moment");
}

json role_json(const RoleModel& m) {
  return {{"agents", m.agents},
          {"obs_dim", m.obs_dim},
          {"actor", flat_json(m.actor.tensors())},
          {"critic", flat_json(m.critic.tensors())},
          {"actor_opt", adam_json(m.actor_opt)},
          {"critic_opt", adam_json(m.critic_opt)}};
}

void role_restore(const json& j, RoleModel& m) {
  if (j.at("agents").get<int>() != m.agents || j.at("obs_dim").get<int>() != m.obs_dim) {
    throw TrainingError("checkpoint: role shape mismatch");
  }
  flat_restore(j.at("actor"), m.actor.tensors(), "actor");
  flat_restore(j.at("critic"), m.critic.tensors(), "critic");
  adam_restore(j.at("actor_opt"), m.actor_opt);
  adam_restore(j.at("critic_opt"), m.critic_opt);
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// Hash of the settings a checkpoint depends on; the iteration budget and
// output location may change between a run and its resumption.
std::uint64_t resume_hash(RunConfig config) {
  config.train.iterations = 0;
  config.train.output_dir.clear();
  return config_hash(config);
}

}  // namespace

json policies_to_json(const PolicyBundle& p) {
  json j{{"team", role_json(p.team)}, {"adversary", nullptr}};
  if (p.adversary) j["adversary"] = role_json(*p.adversary);
  return j;
}

void policies_from_json(const json& j, PolicyBundle& p) {
  role_restore(j.at("team"), p.team);
  if (p.adversary.has_value() != !j.at("adversary").is_null()) {
    throw TrainingError("checkpoint: adversary presence mismatch");
  }
  if (p.adversary) role_restore(j.at("adversary"), *p.adversary);
}

json Trainer::checkpoint() const {
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"config_hash", hex64(config_hash(config_))},
          {"resume_hash", hex64(resume_hash(config_))},
          {"iteration", iteration_},
          {"env_steps", env_steps_},
          {"rng",
           {{"env", env_rng_.serialize()},
            {"sample", sample_rng_.serialize()},
            {"update", update_rng_.serialize()}}},
          {"policies", policies_to_json(policies_)}};
}

void Trainer::restore(const json& j) {
  if (j.value("format", "") != kCheckpointFormat) throw TrainingError("not a checkpoint file");
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw TrainingError("unsupported checkpoint version");
  }
  if (j.at("resume_hash").get<std::string>() != hex64(resume_hash(config_))) {
    throw TrainingError("checkpoint was written under a different configuration");
  }
  policies_from_json(j.at("policies"), policies_);
  env_rng_.deserialize(j.at("rng").at("env").get<std::string>());
  sample_rng_.deserialize(j.at("rng").at("sample").get<std::string>());
  update_rng_.deserialize(j.at("rng").at("update").get<std::string>());
  iteration_ = j.at("iteration").get<int>();
  env_steps_ = j.at("env_steps").get<std::int64_t>();
}

fs::path checkpoint_path(const fs::path& run_dir, int iteration) {
  char name[32];
  std::snprintf(name, sizeof name, "iter_%06d.json", iteration);
  return run_dir / "checkpoints" / name;
}

std::optional<fs::path> latest_checkpoint(const fs::path& run_dir) {
  const fs::path dir = run_dir / "checkpoints";
  if (!fs::is_directory(dir)) return std::nullopt;
  std::optional<fs::path> best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("iter_", 0) != 0 || entry.path().extension() != ".json") continue;
    if (!best || name > best->filename().string()) best = entry.path();
  }
  return best;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw TrainingError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw TrainingError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

namespace {

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw TrainingError("cannot write " + tmp.string());
    out << text;
    if (!out) throw TrainingError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

json manifest_json(const Trainer& trainer) {
  const RunConfig& c = trainer.config();
  const std::uint64_t seed = c.train.seed;
  json encoders = json::array();
  const auto seeds = trainer.encoder_seeds();
  for (std::size_t i = 0; i < trainer.encoders().size(); ++i) {
    const RandomEncoder& e = trainer.encoders()[i];
    encoders.push_back({{"index", i},
                        {"seed", seeds[i]},
                        {"observation_dim", e.observation_dim()},
                        {"embedding_dim", e.embedding_dim()},
                        {"width", kEncoderWidth}});
  }
  json config;
  to_json(config, c);
  const MultiAgentEnv& env = trainer.env();
  return {{"code_version", kCodeVersion},
          {"config", config},
          {"config_hash", hex64(config_hash(c))},
          {"seeds",
           {{"master", seed},
            {"env", derive_seed(seed, "env")},
            {"sample", derive_seed(seed, "sample")},
            {"update", derive_seed(seed, "update")},
            {"policy_init", derive_seed(seed, "policy_init")},
            {"eval", "derive_seed(master, \"eval\", iteration)"}}},
          {"encoders", encoders},
          {"environment",
           {{"name", env.name()},
            {"team_size", env.team_size()},
            {"adversary_count", env.adversary_count()},
            {"team_observation_dim", env.team_observation_dim()},
            {"episode_length", env.episode_length()},
            {"episodes_per_rollout", std::max(1, c.ppo.rollout_steps / env.episode_length())}}},
          {"metrics_columns", metrics_header(env.team_size(), env.adversary_count() > 0)}};
}

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  return out;
}

// Drops rows recorded after `iteration` (by their leading iteration field
// for CSV, or the "iteration" key for JSON lines).
void truncate_after(const fs::path& path, int iteration, bool csv) {
  if (!fs::exists(path)) return;
  std::ifstream in(path);
  std::string line;
  std::string kept;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    bool keep = true;
    if (csv && first) {
      keep = true;
    } else if (csv) {
      keep = std::stoi(line.substr(0, line.find(','))) <= iteration;
    } else {
      keep = json::parse(line).at("iteration").get<int>() <= iteration;
    }
    first = false;
    if (keep) kept += line + "\n";
  }
  in.close();
  write_text_atomic(path, kept);
}

}  // namespace

fs::path train(const RunConfig& config, const TrainOptions& options) {
  const fs::path run_dir = resolve_output_dir(config.train.output_dir);
  Trainer trainer(config);
  const fs::path metrics_path = run_dir / "metrics.csv";
  const fs::path diag_path = run_dir / "diagnostics.jsonl";
  if (options.resume) {
    const auto latest = latest_checkpoint(run_dir);
    if (!latest) throw TrainingError("no checkpoint to resume in " + run_dir.string());
    trainer.restore(read_json(*latest));
    truncate_after(metrics_path, trainer.iteration(), true);
    truncate_after(diag_path, trainer.iteration(), false);
  } else {
    fs::create_directories(run_dir);
    fs::remove_all(run_dir / "checkpoints");
    fs::remove(metrics_path);
    fs::remove(diag_path);
  }
  fs::create_directories(run_dir / "checkpoints");
  json manifest = manifest_json(trainer);
  if (options.resume) manifest["resumed_from_iteration"] = trainer.iteration();
  write_text_atomic(run_dir / "manifest.json", manifest.dump(2) + "\n");

  const bool fresh_metrics = !fs::exists(metrics_path);
  std::ofstream metrics(metrics_path, std::ios::app);
  std::ofstream diag(diag_path, std::ios::app);
  if (!metrics || !diag) throw TrainingError("cannot open outputs in " + run_dir.string());
  if (fresh_metrics) {
    metrics << join(metrics_header(trainer.env().team_size(),
                                   trainer.env().adversary_count() > 0))
            << "\n";
  }
  DiagnosticsSink sink;
  if (config.train.diagnostics) sink = [&](const json& j) { diag << j.dump() << "\n"; };

  const int total = config.train.iterations;
  while (trainer.iteration() < total) {
    const IterationRecord record = trainer.run_iteration(sink);
    metrics << metrics_row(record) << "\n";
    metrics.flush();
    diag.flush();
    if (record.iteration % config.train.checkpoint_every == 0 || record.iteration == total) {
      write_text_atomic(checkpoint_path(run_dir, record.iteration), trainer.checkpoint().dump());
    }
    if (options.log != nullptr) {
      char line[160];
      std::snprintf(line, sizeof line, "iter %d  steps %lld  eval %.4f +- %.4f  train %.4f\n",
                    record.iteration, static_cast<long long>(record.env_steps), record.eval.mean,
                    record.eval.std, record.train_team_reward);
      *options.log << line << std::flush;
    }
  }
  return run_dir;
}

Trainer load_trainer(const fs::path& run_dir, int iteration) {
  const json manifest = read_json(run_dir / "manifest.json");
  RunConfig config = parse_config_json(manifest.at("config"), {});
  Trainer trainer(config);
  fs::path path;
  if (iteration < 0) {
    const auto latest = latest_checkpoint(run_dir);
    if (!latest) throw TrainingError("no checkpoint in " + run_dir.string());
    path = *latest;
  } else {
    path = checkpoint_path(run_dir, iteration);
    if (!fs::exists(path)) {
      throw TrainingError("missing checkpoint for iteration " + std::to_string(iteration));
    }
  }
  trainer.restore(read_json(path));
  return trainer;
}

}  // namespace ccl
