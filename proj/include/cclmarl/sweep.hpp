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

#ifndef CCLMARL_SWEEP_HPP_
#define CCLMARL_SWEEP_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cclmarl/config.hpp"

namespace ccl {

struct SweepSpec {
  std::string key;                  // any override key, e.g. "alpha"
  std::vector<std::string> values;  // override values as written on the command line
  std::vector<std::uint64_t> seeds;
};

struct SweepRow {
  std::string value;
  std::uint64_t seed = 0;
  std::string run_dir;
  bool ok = false;
  std::string error;
  double final_eval_mean = 0.0;
  double final_eval_std = 0.0;
  bool is_best = false;
};

// Trains one run and returns its directory; swappable for tests.
using SweepRunner = std::function<std::filesystem::path(const RunConfig&)>;

// One run per (value, seed) under output_dir/<key>=<value>/seed_<seed>. A
// failing run is recorded and the sweep moves on. The row with the highest
// final eval mean is flagged.
std::vector<SweepRow> run_sweep(const nlohmann::json& file_layer,
                                const std::vector<std::string>& overrides, const SweepSpec& spec,
                                const std::string& output_dir, const SweepRunner& runner,
                                std::ostream* log = nullptr);

// Last eval mean/std recorded in a run's metrics.csv.
std::pair<double, double> final_eval(const std::filesystem::path& run_dir);

void write_sweep_summary(std::ostream& out, const std::string& key,
                         const std::vector<SweepRow>& rows);

}  // namespace ccl

#endif  // CCLMARL_SWEEP_HPP_
