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

#include "cclmarl/sweep.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cclmarl/errors.hpp"

namespace ccl {

namespace fs = std::filesystem;

namespace {

std::string path_safe(const std::string& text) {
  std::string out;
  for (char c : text) {
    const bool plain = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                       c == '_' || c == '=';
    out += plain ? c : '_';
  }
  return out;
}

}  // namespace

std::pair<double, double> final_eval(const fs::path& run_dir) {
  std::ifstream in(run_dir / "metrics.csv");
  if (!in) throw TrainingError("no metrics.csv in " + run_dir.string());
  std::string line;
  std::string last;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  if (last.empty()) throw TrainingError("empty metrics.csv in " + run_dir.string());
  std::stringstream ss(last);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (fields.size() < 4) throw TrainingError("short metrics row in " + run_dir.string());
  return {std::stod(fields[2]), std::stod(fields[3])};
}

std::vector<SweepRow> run_sweep(const nlohmann::json& file_layer,
                                const std::vector<std::string>& overrides, const SweepSpec& spec,
                                const std::string& output_dir, const SweepRunner& runner,
                                std::ostream* log) {
  if (spec.key.empty() || spec.values.empty()) throw ConfigError("sweep: empty grid");
  if (spec.seeds.empty()) throw ConfigError("sweep: no seeds");
  std::vector<SweepRow> rows;
  for (const std::string& value : spec.values) {
    for (std::uint64_t seed : spec.seeds) {
      SweepRow row;
      row.value = value;
      row.seed = seed;
      const std::string dir = output_dir + "/" + path_safe(spec.key + "=" + value) + "/seed_" +
                              std::to_string(seed);
      row.run_dir = dir;
      std::vector<std::string> all = overrides;
      all.push_back(spec.key + "=" + value);
      all.push_back("train.seed=" + std::to_string(seed));
      all.push_back("train.output_dir=\"" + dir + "\"");
      try {
        const RunConfig config = parse_config_json(file_layer, all);
        const fs::path run = runner(config);
        std::tie(row.final_eval_mean, row.final_eval_std) = final_eval(run);
        row.ok = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      if (log != nullptr) {
        *log << spec.key << "=" << value << " seed " << seed << ": "
             << (row.ok ? "final eval " + std::to_string(row.final_eval_mean)
                        : "failed: " + row.error)
             << "\n";
      }
      rows.push_back(std::move(row));
    }
  }
  SweepRow* best = nullptr;
  for (SweepRow& r : rows) {
    if (r.ok && (best == nullptr || r.final_eval_mean > best->final_eval_mean)) best = &r;
  }
  if (best != nullptr) best->is_best = true;
  return rows;
}

void write_sweep_summary(std::ostream& out, const std::string& key,
                         const std::vector<SweepRow>& rows) {
  out << "key,value,seed,status,final_eval_mean,final_eval_std,is_best,run_dir,error\n";
  char buf[64];
  for (const SweepRow& r : rows) {
    std::string error = r.error;
    for (char& c : error) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << key << "," << r.value << "," << r.seed << "," << (r.ok ? "ok" : "failed") << ",";
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.final_eval_mean, r.final_eval_std);
    out << buf << "," << (r.is_best ? 1 : 0) << "," << r.run_dir << "," << error << "\n";
  }
}

}  // namespace ccl
