// Copyright 2026 The Symile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symile/serialize.hpp"
#include "symile/synthdata.hpp"
#include "symile/traineval.hpp"

namespace symile::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

/// Training hyperparameters plus the dataset they run on.
struct RunConfig {
  TrainConfig train;
  std::string dataset = "synth5d";  // "xor1d" | "synth5d"
  double p_hat = 1.0;
  IMode i_mode = IMode::shared;
  int dims = 5;
  std::string out_dir = "run";

  void validate() const;
  /// Every field, including out_dir.
  [[nodiscard]] nlohmann::json to_json() const;
  /// Hash of the canonical JSON without out_dir.
  [[nodiscard]] std::uint64_t hash() const;
};

/// Missing keys keep `base` values; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::string& path);

struct SweepSpec {
  std::vector<double> grid;
  std::vector<Objective> objectives = {Objective::symile, Objective::pairwise_clip};
  std::vector<std::uint64_t> seeds = {0};
  /// Shared settings for every cell; p_hat, objective and seed are set per cell.
  RunConfig base;

  void validate() const;
};

/// 0.0, 0.1, ..., 1.0
std::vector<double> default_grid();
SweepSpec sweep_from_json(const nlohmann::json& j);
SweepSpec load_sweep(const std::string& path);

/// Full dataset for `cfg` (train + val + test rows), generated from its seed.
Dataset make_dataset(const RunConfig& cfg);

/// Splits `data` and masks train and val when cfg.train.missing_p > 0.
DatasetSplits prepare_splits(const RunConfig& cfg, const Dataset& data);

/// Modality scored by evaluation: b.
inline constexpr std::size_t kTargetModality = 1;

struct EvalRow {
  double p_hat = 0.0;
  Objective objective = Objective::symile;
  NegativeStrategy strategy = NegativeStrategy::on_permute;
  std::uint64_t seed = 0;
  BootstrapReport report;
  std::size_t n_test = 0;
  std::string checkpoint_path;
};

ScorerKind scorer_for(Objective o);

/// classify_target on b followed by bootstrap_accuracy.
EvalRow evaluate_checkpoint(const RunConfig& cfg, const Checkpoint& ckpt, const Dataset& test, std::size_t resamples);

/// First line of every CSV and data file written by the tool.
std::string provenance_line(std::uint64_t hash, std::uint64_t seed, const nlohmann::json& extra = nlohmann::json::object());

inline constexpr const char* kResultsHeader = "p_hat,objective,strategy,seed,mean_acc,se,n_test,checkpoint_path";
std::string results_row(const EvalRow& r);

inline constexpr const char* kOracleHeader = "p_hat,quantity,group_spec,value_nats";

struct OracleRow {
  double p_hat;
  std::string quantity;
  std::string group_spec;
  double value_nats;
};

/// MI(a;b), MI(b;c), MI(a;c), CMI(a;b|c), CMI(b;c|a), CMI(a;c|b) and TC(a;b;c)
/// per p_hat, for each requested dimensionality.
std::vector<OracleRow> oracle_rows(const std::vector<double>& grid, const std::vector<int>& dims_list, IMode mode);

/// Reads the run configuration stored alongside a checkpoint.
RunConfig checkpoint_run_config(const std::string& path);

/// Trains `cfg` and writes checkpoint.json, losses.csv and config.json under `dir`.
TrainResult run_training(const RunConfig& cfg, const DatasetSplits& splits, const std::filesystem::path& dir);

/// Parses "0,0.5,1" or "start:step:stop".
std::vector<double> parse_double_list(const std::string& text, const std::string& flag);
std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag);

/// Value of SYMILE_SEED, if set and valid.
std::optional<std::uint64_t> env_seed();

}  // namespace symile::cli
