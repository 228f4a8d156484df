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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "symile/info_oracle.hpp"
#include "symile/model.hpp"
#include "symile/numcore.hpp"
#include "symile/synthdata.hpp"

namespace symile {

/// Training hyperparameters. Defaults are the 5D synthetic setup: 100 epochs,
/// batch 1000, lr 0.1, weight decay 0.01, t initialized to -0.3, D_out 16.
struct TrainConfig {
  Objective objective = Objective::symile;
  NegativeStrategy strategy = NegativeStrategy::on_permute;
  int epochs = 100;
  std::size_t batch_size = 1000;
  double lr = 0.1;
  double weight_decay = 0.01;
  double t_init = -0.3;
  std::size_t d_out = 16;
  bool normalize = true;
  std::uint64_t seed = 0;
  SplitSpec split;
  double missing_p = 0.0;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct Checkpoint {
  ModelParams params;
  OptimizerState optimizer;
  int epoch = 0;
  double val_loss = 0.0;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  /// Encoder inputs carry a trailing missing-modality indicator column.
  bool missing_indicator = false;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct EpochRecord {
  int epoch;
  double train_loss;
  double val_loss;
};

struct TrainResult {
  Checkpoint best;               // lowest validation loss
  std::vector<EpochRecord> history;
};

/// Deterministic epoch loop: seeded shuffle, in-order minibatches (a trailing
/// batch of fewer than 2 samples is dropped), AdamW updates, end-of-epoch
/// validation loss, best checkpoint kept. Throws NumericalError on a
/// non-finite loss.
TrainResult train(const TrainConfig& cfg, const Dataset& train_data, const Dataset& val_data,
                  std::uint64_t config_hash = 0);

/// Loss of `data` under `params`, averaged over batches of `batch_size` with
/// permutations drawn from `seed`.
double evaluate_loss(const ModelParams& params, const Dataset& data, const TrainConfig& cfg, bool missing_indicator,
                     std::uint64_t seed);

enum class ScorerKind { symile, clip };

/// Query inputs, one row per modality (the target's slot is ignored).
using QueryInputs = std::vector<std::vector<double>>;

/// MIP of the encoded queries with each encoded candidate (no temperature).
std::vector<double> symile_candidate_scores(const ModelParams& params, std::size_t target, const QueryInputs& queries,
                                            const Matrix& candidates);

/// Sum over query modalities of r_query . r_candidate.
std::vector<double> clip_candidate_scores(const ModelParams& params, std::size_t target, const QueryInputs& queries,
                                          const Matrix& candidates);

struct RetrievalResult {
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> truth;
  Matrix scores;  // queries x candidates

  [[nodiscard]] double accuracy() const;
  [[nodiscard]] std::vector<std::uint8_t> correct() const;
};

/// First index of the maximum.
std::size_t argmax_lowest(std::span<const double> scores);

/// Zero-shot prediction of modality `target` from the others: ranks every
/// possible bit vector of the target's dimension.
RetrievalResult classify_target(const ModelParams& params, ScorerKind kind, const Dataset& test, std::size_t target,
                                bool missing_indicator = false);

/// classify_target for b on the 5-dimensional synthetic data (32 candidates).
RetrievalResult classify_b_5d(const ModelParams& params, ScorerKind kind, const Dataset& test,
                              bool missing_indicator = false);

struct BootstrapReport {
  double mean = 0.0;
  double se = 0.0;  // standard deviation of the resample accuracies
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
};

BootstrapReport bootstrap_accuracy(const RetrievalResult& results, std::size_t resamples, std::uint64_t seed);

/// posterior[k] proportional to exp(scores[k]) * prior[k].
std::vector<double> calibrated_conditional(std::span<const double> scores, std::span<const double> prior);

struct Ranking {
  std::vector<std::size_t> order;     // best first
  std::vector<std::size_t> excluded;  // candidates with zero prior
};

/// Candidates ordered by score + log prior (descending, ties by index).
Ranking rank_with_prior(std::span<const double> scores, std::span<const double> prior);

struct ProbeConfig {
  int epochs = 200;
  double lr = 0.01;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
};

struct ProbeReport {
  double accuracy = 0.0;
  std::size_t num_classes = 0;
  std::size_t n_test = 0;
};

/// Multinomial logistic regression (one affine layer + softmax, AdamW
/// without decay) trained on `train_x` and scored on `test_x`.
ProbeReport train_linear_probe(const Matrix& train_x, const std::vector<std::size_t>& train_y, const Matrix& test_x,
                               const std::vector<std::size_t>& test_y, const ProbeConfig& cfg = {});

/// Probe on the element-wise product of the encoded feature modalities,
/// predicting the integer code of the target modality.
ProbeReport sufficient_statistic_probe(const ModelParams& params, const Dataset& train_data, const Dataset& test_data,
                                       std::size_t target, const std::vector<std::size_t>& feature_modalities,
                                       bool missing_indicator = false, const ProbeConfig& cfg = {});

struct ScorerRecovery {
  TabularScorer learned;
  std::vector<double> offsets;  // learned - log ratio, positive-mass states only
  double offset_stdev = 0.0;
  double initial_loss = 0.0;    // mean loss over the first tenth of steps
  double final_loss = 0.0;      // mean loss over the last tenth
  bool converged = false;
};

struct RecoveryConfig {
  std::size_t batch_size = 8;
  std::size_t steps = 3000;
  std::size_t episodes_per_step = 32;
  double lr = 0.05;
  std::uint64_t seed = 0;
};

/// Fits a free score per joint state by stochastic gradient ascent on the
/// contrastive bound, rotating the anchor over all groups each step, and
/// compares the result with the log density ratio. The returned scores are
/// the average of the iterates over the second half of the run.
ScorerRecovery recover_optimal_scorer(const JointTable& t, const std::vector<VarGroup>& groups,
                                      const RecoveryConfig& cfg, const std::vector<double>* init = nullptr);

struct BoundRow {
  std::size_t batch_size;
  double bound;
  double se;
  double tc;
};

/// bound_value with the optimal scorer at each batch size, next to the exact TC.
std::vector<BoundRow> bound_tightness_report(const JointTable& t, const std::vector<VarGroup>& groups,
                                             const std::vector<std::size_t>& batch_sizes, std::size_t mc_samples,
                                             std::uint64_t seed, std::size_t anchor = 0);

struct GradCheckCase {
  std::string description;
  GradCheckReport report;
};

/// Random small configurations (N <= 8, D_out <= 6) of every objective and
/// strategy, with and without normalization; analytic gradients compared
/// against central differences at eps = 1e-5.
std::vector<GradCheckCase> gradient_check_suite(std::size_t num_configs, std::uint64_t seed,
                                                double tolerance = 1e-4);

}  // namespace symile
