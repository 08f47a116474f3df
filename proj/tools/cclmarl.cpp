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

// Command-line entry point: train, eval, heatmap, sweep, verify.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cclmarl/config.hpp"
#include "cclmarl/errors.hpp"
#include "cclmarl/heatmap.hpp"
#include "cclmarl/sweep.hpp"
#include "cclmarl/trainer.hpp"
#include "verify_suite.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

nlohmann::json file_layer(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw ccl::ConfigError("cannot read config file " + path);
  std::stringstream text;
  text << in.rdbuf();
  if (text.str().find_first_not_of(" \t\r\n") == std::string::npos) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ccl::ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::stringstream is(item);
    T value{};
    if (!(is >> value)) throw ccl::ConfigError("bad list entry '" + item + "'");
    out.push_back(value);
  }
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ccl::TrainingError("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual conditional likelihood rewards for multi-agent PPO"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  bool resume = false;
  bool quiet = false;
  auto* train = app.add_subcommand("train", "Train a run");
  train->add_option("-c,--config", config_path, "JSON config file");
  train->add_option("-s,--set", overrides, "Override, key=value (repeatable)");
  train->add_flag("--resume", resume, "Continue from the latest checkpoint in the run directory");
  train->add_flag("-q,--quiet", quiet, "No per-iteration log");

  std::string run_dir;
  int iteration = -1;
  int episodes = 20;
  std::uint64_t eval_seed = 0;
  std::string trace_path;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint deterministically");
  eval->add_option("-r,--run", run_dir, "Run directory")->required();
  eval->add_option("-i,--iteration", iteration, "Checkpoint iteration (default latest)");
  eval->add_option("-n,--episodes", episodes, "Evaluation episodes");
  eval->add_option("--seed", eval_seed, "Evaluation seed");
  eval->add_option("--trace", trace_path, "Write one episode trace CSV here");

  std::string iterations_text;
  int rollouts = 20;
  int grid = 50;
  std::string out_prefix;
  auto* heatmap = app.add_subcommand("heatmap", "Occupancy heat map from checkpoints");
  heatmap->add_option("-r,--run", run_dir, "Run directory")->required();
  heatmap->add_option("-i,--iterations", iterations_text, "Comma-separated iterations")->required();
  heatmap->add_option("--rollouts", rollouts, "Rollouts per iteration");
  heatmap->add_option("--grid", grid, "Cells per side");
  heatmap->add_option("-o,--out", out_prefix, "Output path prefix (default <run>/heatmap)");

  std::string sweep_key;
  std::string sweep_values;
  std::string sweep_seeds = "0";
  std::string sweep_out = "runs/sweep";
  auto* sweep = app.add_subcommand("sweep", "Train one run per grid value and seed");
  sweep->add_option("-c,--config", config_path, "JSON config file");
  sweep->add_option("-s,--set", overrides, "Override, key=value (repeatable)");
  sweep->add_option("-k,--key", sweep_key, "Config key to vary")->required();
  sweep->add_option("-v,--values", sweep_values, "Comma-separated values")->required();
  sweep->add_option("--seeds", sweep_seeds, "Comma-separated master seeds");
  sweep->add_option("-o,--out", sweep_out, "Sweep output directory");
  sweep->add_flag("-q,--quiet", quiet, "No per-run log");

  auto* verify = app.add_subcommand("verify", "Run the oracle and invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) {
      const ccl::RunConfig config = ccl::parse_config_json(file_layer(config_path), overrides);
      ccl::TrainOptions options;
      options.resume = resume;
      options.log = quiet ? nullptr : &std::cout;
      const auto dir = ccl::train(config, options);
      std::cout << "run directory: " << dir.string() << "\n";
    } else if (eval->parsed()) {
      const auto dir = ccl::resolve_output_dir(run_dir);
      ccl::Trainer trainer = ccl::load_trainer(dir, iteration);
      const ccl::EvalResult r =
          ccl::evaluate(trainer.policies(), trainer.env(), episodes, eval_seed);
      std::printf("iteration %d  eval mean %.6f  std %.6f  over %d episodes\n", trainer.iteration(),
                  r.mean, r.std, episodes);
      if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw ccl::TrainingError("cannot write " + trace_path);
        ccl::PolicyController controller(trainer.policies(), nullptr);
        auto env = trainer.env().clone_fresh();
        ccl::Rng rng(eval_seed);
        const ccl::IntrinsicConfig intrinsic =
            trainer.config().intrinsic.to_config(trainer.config().env.kind);
        std::vector<ccl::RandomEncoder> encoders;
        std::vector<const ccl::RandomEncoder*> per_agent;
        for (std::size_t i = 0; i < trainer.encoders().size(); ++i) encoders.push_back(trainer.encoders()[i]);
        for (int i = 0; i < env->team_size(); ++i) {
          per_agent.push_back(&encoders[encoders.size() == 1 ? 0 : static_cast<std::size_t>(i)]);
        }
        std::unique_ptr<ccl::IntrinsicEngine> engine;
        if (intrinsic.mode != ccl::IntrinsicMode::kNone) {
          engine = std::make_unique<ccl::IntrinsicEngine>(intrinsic, per_agent,
                                                          env->team_observation_dim());
        }
        ccl::write_episode_trace(out, controller, *env, engine.get(), intrinsic, rng);
      }
    } else if (heatmap->parsed()) {
      const auto dir = ccl::resolve_output_dir(run_dir);
      const std::vector<int> iterations = parse_list<int>(iterations_text);
      const ccl::HeatmapGrid h = ccl::heatmap_from_run(dir, iterations, rollouts, grid);
      const std::string prefix = out_prefix.empty() ? (dir / "heatmap").string() : out_prefix;
      std::ofstream csv(prefix + ".csv");
      if (!csv) throw ccl::TrainingError("cannot write " + prefix + ".csv");
      ccl::write_heatmap_csv(csv, h);
      write_file(prefix + ".svg", ccl::render_heatmap_svg(h));
      std::printf("wrote %s.csv and %s.svg (mass %.6f)\n", prefix.c_str(), prefix.c_str(),
                  h.total());
    } else if (sweep->parsed()) {
      ccl::SweepSpec spec{sweep_key, split(sweep_values), parse_list<std::uint64_t>(sweep_seeds)};
      const std::string out_dir = ccl::resolve_output_dir(sweep_out).string();
      auto runner = [&](const ccl::RunConfig& c) {
        return ccl::train(c, {});
      };
      const auto rows = ccl::run_sweep(file_layer(config_path), overrides, spec, out_dir, runner,
                                       quiet ? nullptr : &std::cout);
      std::filesystem::create_directories(out_dir);
      std::ofstream summary(std::filesystem::path(out_dir) / "summary.csv");
      ccl::write_sweep_summary(summary, sweep_key, rows);
      for (const auto& r : rows) {
        if (r.is_best) std::cout << "best: " << sweep_key << "=" << r.value << " seed " << r.seed << "\n";
      }
    } else if (verify->parsed()) {
      bool all = true;
      for (const auto& check : ccl::verify::fast_checks()) {
        const auto r = check.run();
        std::cout << ccl::verify::format_line(check.id, r) << std::endl;
        all = all && r.passed;
      }
      return all ? kExitOk : kExitRuntime;
    }
  } catch (const ccl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
