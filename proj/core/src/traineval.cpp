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

#include "symile/traineval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "symile/error.hpp"
#include "symile/rng.hpp"

namespace symile {
namespace {

std::vector<Matrix> inputs_of(const Dataset& d, bool indicator) {
  std::vector<Matrix> in;
  for (std::size_t m = 0; m < d.num_modalities(); ++m) in.push_back(encoder_input(d, m, indicator));
  return in;
}

std::vector<Matrix> gather_batch(const std::vector<Matrix>& inputs, std::span<const std::size_t> rows) {
  std::vector<Matrix> out;
  out.reserve(inputs.size());
  for (const auto& x : inputs) out.push_back(x.gather_rows(rows));
  return out;
}

AnchorPermutations perms_for(const TrainConfig& cfg, std::size_t m, std::size_t n, Rng& rng) {
  if (cfg.objective == Objective::symile && cfg.strategy == NegativeStrategy::on_permute) {
    return draw_permutations(m, n, rng);
  }
  return {};
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(std::span<const double> v) {
  Moments out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

std::vector<double> encode_row(const AffineEncoder& e, std::span<const double> x) { return e.forward(x); }

std::vector<double> score_reps(ScorerKind kind, const std::vector<std::span<const double>>& query_reps,
                               std::size_t target, const Matrix& cand_reps) {
  std::vector<double> scores(cand_reps.rows());
  std::vector<std::span<const double>> args(query_reps.begin(), query_reps.end());
  for (std::size_t k = 0; k < cand_reps.rows(); ++k) {
    if (kind == ScorerKind::symile) {
      args[target] = cand_reps.row(k);
      scores[k] = mip(std::span<const std::span<const double>>(args));
    } else {
      double s = 0.0;
      for (std::size_t m = 0; m < query_reps.size(); ++m) {
        if (m != target) s += dot(query_reps[m], cand_reps.row(k));
      }
      scores[k] = s;
    }
  }
  return scores;
}

std::vector<double> candidate_scores(ScorerKind kind, const ModelParams& params, std::size_t target,
                                     const QueryInputs& queries, const Matrix& candidates) {
  const std::size_t m = params.encoders.size();
  if (queries.size() != m) throw InvalidArgument("candidate scores: one query slot per modality expected");
  if (target >= m) throw InvalidArgument("candidate scores: target out of range");
  if (candidates.rows() < 2) throw InvalidArgument("candidate scores: need at least two candidates");
  if (candidates.cols() != params.encoders[target].in_dim()) {
    throw InvalidArgument("candidate scores: candidate dimension does not match the target encoder");
  }
  std::vector<std::vector<double>> reps(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (k != target) reps[k] = encode_row(params.encoders[k], queries[k]);
  }
  const Matrix cand = encode(params.encoders[target], candidates).out;
  reps[target].assign(cand.cols(), 0.0);
  std::vector<std::span<const double>> spans(reps.begin(), reps.end());
  return score_reps(kind, spans, target, cand);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("TrainConfig: epochs must be >= 1");
  if (batch_size < 2) throw InvalidArgument("TrainConfig: batch_size must be >= 2 for contrastive losses");
  if (lr < 0.0 || !std::isfinite(lr)) throw InvalidArgument("TrainConfig: lr must be finite and >= 0");
  if (weight_decay < 0.0 || !std::isfinite(weight_decay)) throw InvalidArgument("TrainConfig: weight_decay must be >= 0");
  if (!std::isfinite(t_init)) throw InvalidArgument("TrainConfig: t_init must be finite");
  if (d_out < 1) throw InvalidArgument("TrainConfig: D_out must be >= 1");
  if (split.train < 1 || split.val < 1 || split.test < 1) throw InvalidArgument("TrainConfig: split sizes must be >= 1");
  if (!(missing_p >= 0.0 && missing_p < 1.0)) throw InvalidArgument("TrainConfig: missing_p must lie in [0, 1)");
  if (objective == Objective::pairwise_clip && strategy == NegativeStrategy::on_squared) {
    throw InvalidArgument("TrainConfig: the on2 strategy applies to the symile objective only");
  }
}

double evaluate_loss(const ModelParams& params, const Dataset& data, const TrainConfig& cfg, bool missing_indicator,
                     std::uint64_t seed) {
  const auto inputs = inputs_of(data, missing_indicator);
  const std::size_t n = data.size();
  Rng rng = Rng(seed).substream("eval-loss");
  std::vector<std::size_t> rows;
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t start = 0; start < n; start += cfg.batch_size) {
    const std::size_t end = std::min(n, start + cfg.batch_size);
    if (end - start < 2) continue;
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), start);
    const auto batch = gather_batch(inputs, rows);
    const auto perms = perms_for(cfg, inputs.size(), rows.size(), rng);
    const auto bl = model_loss(params, batch, cfg.objective, cfg.strategy, perms);
    total += bl.loss * static_cast<double>(rows.size());
    counted += rows.size();
  }
  if (counted == 0) throw InvalidArgument("evaluate_loss: need at least two samples");
  return total / static_cast<double>(counted);
}

TrainResult train(const TrainConfig& cfg, const Dataset& train_data, const Dataset& val_data,
                  std::uint64_t config_hash) {
  cfg.validate();
  train_data.validate();
  val_data.validate();
  if (train_data.num_modalities() != val_data.num_modalities()) {
    throw InvalidArgument("train: train and validation data have different modalities");
  }
  if (cfg.objective == Objective::symile && cfg.strategy == NegativeStrategy::on_squared &&
      train_data.num_modalities() != 3) {
    throw InvalidArgument("train: the on2 strategy needs exactly three modalities");
  }
  const bool indicator = cfg.missing_p > 0.0 || train_data.has_masks() || val_data.has_masks();
  const auto inputs = inputs_of(train_data, indicator);
  std::vector<std::size_t> in_dims;
  for (std::size_t m = 0; m < inputs.size(); ++m) {
    in_dims.push_back(inputs[m].cols());
    if (val_data.modalities[m].cols() != train_data.modalities[m].cols()) {
      throw InvalidArgument("train: train and validation dimensions differ");
    }
  }

  ModelParams params = init_model(in_dims, cfg.d_out, cfg.normalize, cfg.t_init, cfg.seed);
  OptimizerState opt(AdamWConfig{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay}, params.num_params());
  const auto decay_mask = params.decay_mask();

  const Rng root(cfg.seed);
  const Rng shuffle_root = root.substream("shuffle");
  Rng negatives = root.substream("negatives");

  TrainResult result;
  result.best.val_loss = std::numeric_limits<double>::infinity();
  const std::size_t n = train_data.size();
  std::vector<double> flat;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle = shuffle_root.substream(static_cast<std::uint64_t>(epoch));
    const auto order = shuffle.permutation(n);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      if (end - start < 2) continue;
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      const auto batch = gather_batch(inputs, rows);
      const auto perms = perms_for(cfg, inputs.size(), rows.size(), negatives);
      const auto lg = model_loss_grad(params, batch, cfg.objective, cfg.strategy, perms);
      if (!std::isfinite(lg.loss)) {
        std::ostringstream os;
        os << "train: non-finite loss at epoch " << epoch << ", batch " << batches
           << " (log temperature " << params.log_temperature << ")";
        throw NumericalError(os.str());
      }
      flat = params.flatten();
      const auto grads = lg.grad.flatten();
      adamw_step(opt, flat, grads, decay_mask);
      params.assign(flat);
      loss_sum += lg.loss;
      ++batches;
    }
    if (batches == 0) throw InvalidArgument("train: no minibatch with at least two samples");

    const double val = evaluate_loss(params, val_data, cfg, indicator, cfg.seed);
    if (!std::isfinite(val)) {
      throw NumericalError("train: non-finite validation loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back(EpochRecord{epoch, loss_sum / static_cast<double>(batches), val});
    if (val < result.best.val_loss) {
      result.best = Checkpoint{params, opt, epoch, val, config_hash, cfg.seed, indicator};
    }
  }
  return result;
}

std::vector<double> symile_candidate_scores(const ModelParams& params, std::size_t target, const QueryInputs& queries,
                                            const Matrix& candidates) {
  return candidate_scores(ScorerKind::symile, params, target, queries, candidates);
}

std::vector<double> clip_candidate_scores(const ModelParams& params, std::size_t target, const QueryInputs& queries,
                                          const Matrix& candidates) {
  return candidate_scores(ScorerKind::clip, params, target, queries, candidates);
}

double RetrievalResult::accuracy() const {
  if (predicted.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::vector<std::uint8_t> RetrievalResult::correct() const {
  std::vector<std::uint8_t> c(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) c[i] = predicted[i] == truth[i] ? 1 : 0;
  return c;
}

std::size_t argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw InvalidArgument("argmax_lowest: empty score vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

RetrievalResult classify_target(const ModelParams& params, ScorerKind kind, const Dataset& test, std::size_t target,
                                bool missing_indicator) {
  test.validate();
  const std::size_t m = test.num_modalities();
  if (m != params.encoders.size()) throw InvalidArgument("classify_target: modality count does not match the model");
  if (target >= m) throw InvalidArgument("classify_target: target out of range");
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!test.complete(i)) throw InvalidArgument("classify_target: test data must be fully observed");
  }
  const std::size_t dims = test.modalities[target].cols();
  Matrix candidates = all_binary_vectors(dims);
  if (missing_indicator) {
    Matrix with(candidates.rows(), dims + 1);
    for (std::size_t k = 0; k < candidates.rows(); ++k) {
      std::copy(candidates.row(k).begin(), candidates.row(k).end(), with.row(k).begin());
    }
    candidates = std::move(with);
  }
  const Matrix cand_reps = encode(params.encoders[target], candidates).out;
  std::vector<Matrix> reps(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (k != target) reps[k] = encode(params.encoders[k], encoder_input(test, k, missing_indicator)).out;
  }

  RetrievalResult out;
  out.scores = Matrix(test.size(), cand_reps.rows());
  std::vector<std::span<const double>> query(m);
  const std::vector<double> placeholder(cand_reps.cols(), 0.0);
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (std::size_t k = 0; k < m; ++k) query[k] = k == target ? std::span<const double>(placeholder) : reps[k].row(i);
    const auto s = score_reps(kind, query, target, cand_reps);
    std::copy(s.begin(), s.end(), out.scores.row(i).begin());
    out.predicted.push_back(argmax_lowest(s));
    out.truth.push_back(binary_code(test.modalities[target].row(i)));
  }
  return out;
}

RetrievalResult classify_b_5d(const ModelParams& params, ScorerKind kind, const Dataset& test,
                              bool missing_indicator) {
  if (test.num_modalities() != 3 || test.modalities[1].cols() != 5) {
    throw InvalidArgument("classify_b_5d: expects three modalities with 5-dimensional b");
  }
  return classify_target(params, kind, test, 1, missing_indicator);
}

BootstrapReport bootstrap_accuracy(const RetrievalResult& results, std::size_t resamples, std::uint64_t seed) {
  if (resamples < 1) throw InvalidArgument("bootstrap_accuracy: need at least one resample");
  const auto correct = results.correct();
  if (correct.empty()) throw InvalidArgument("bootstrap_accuracy: empty results");
  Rng rng = Rng(seed).substream("bootstrap");
  const std::size_t n = correct.size();
  std::vector<double> acc(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += correct[rng.below(n)];
    acc[b] = static_cast<double>(hits) / static_cast<double>(n);
  }
  const auto mo = moments(acc);
  return BootstrapReport{mo.mean, mo.sd, resamples, seed};
}

std::vector<double> calibrated_conditional(std::span<const double> scores, std::span<const double> prior) {
  if (scores.size() != prior.size() || scores.empty()) {
    throw InvalidArgument("calibrated_conditional: scores and prior must be nonempty and equally long");
  }
  double total = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0)) throw InvalidArgument("calibrated_conditional: prior entries must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("calibrated_conditional: prior must sum to 1");
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!std::isfinite(scores[k])) throw InvalidArgument("calibrated_conditional: scores must be finite");
    if (prior[k] > 0.0) m = std::max(m, scores[k]);
  }
  std::vector<double> post(scores.size());
  double z = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    post[k] = prior[k] > 0.0 ? std::exp(scores[k] - m) * prior[k] : 0.0;
    z += post[k];
  }
  if (!(z > 0.0)) throw NumericalError("calibrated_conditional: zero normalizer");
  for (double& p : post) p /= z;
  return post;
}

Ranking rank_with_prior(std::span<const double> scores, std::span<const double> prior) {
  if (scores.size() != prior.size() || scores.empty()) {
    throw InvalidArgument("rank_with_prior: scores and prior must be nonempty and equally long");
  }
  Ranking r;
  std::vector<double> key(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (prior[k] < 0.0) throw InvalidArgument("rank_with_prior: negative prior");
    if (prior[k] == 0.0) {
      r.excluded.push_back(k);
      continue;
    }
    key[k] = scores[k] + std::log(prior[k]);
    r.order.push_back(k);
  }
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return r;
}

ProbeReport train_linear_probe(const Matrix& train_x, const std::vector<std::size_t>& train_y, const Matrix& test_x,
                               const std::vector<std::size_t>& test_y, const ProbeConfig& cfg) {
  if (train_x.rows() != train_y.size() || test_x.rows() != test_y.size() || train_x.cols() != test_x.cols()) {
    throw InvalidArgument("train_linear_probe: feature/label shapes disagree");
  }
  if (train_y.empty() || test_y.empty()) throw InvalidArgument("train_linear_probe: empty split");
  std::size_t k = 0;
  for (auto y : train_y) k = std::max(k, y + 1);
  for (auto y : test_y) k = std::max(k, y + 1);
  ProbeReport report{0.0, k, test_y.size()};

  const bool constant = std::all_of(train_y.begin(), train_y.end(), [&](std::size_t y) { return y == train_y[0]; });
  if (constant) {
    const auto hits = std::count(test_y.begin(), test_y.end(), train_y[0]);
    report.accuracy = static_cast<double>(hits) / static_cast<double>(test_y.size());
    return report;
  }

  const std::size_t f = train_x.cols();
  // weights (k x f) then biases (k)
  std::vector<double> params(k * f + k, 0.0);
  std::vector<double> grads(params.size());
  OptimizerState opt(AdamWConfig{cfg.lr, 0.9, 0.999, 1e-8, 0.0}, params.size());
  const Rng root = Rng(cfg.seed).substream("probe");
  std::vector<double> logits(k);

  auto forward = [&](std::span<const double> x, std::vector<double>& out) {
    for (std::size_t c = 0; c < k; ++c) {
      double s = params[k * f + c];
      const double* w = params.data() + c * f;
      for (std::size_t j = 0; j < f; ++j) s += w[j] * x[j];
      out[c] = s;
    }
  };

  const std::size_t n = train_x.rows();
  const std::size_t bs = std::max<std::size_t>(1, cfg.batch_size);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle = root.substream(static_cast<std::uint64_t>(epoch));
    const auto order = shuffle.permutation(n);
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t end = std::min(n, start + bs);
      std::fill(grads.begin(), grads.end(), 0.0);
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t r = start; r < end; ++r) {
        const auto x = train_x.row(order[r]);
        forward(x, logits);
        const auto ce = softmax_cross_entropy(logits, train_y[order[r]]);
        for (std::size_t c = 0; c < k; ++c) {
          const double g = ce.grad[c] * inv;
          double* gw = grads.data() + c * f;
          for (std::size_t j = 0; j < f; ++j) gw[j] += g * x[j];
          grads[k * f + c] += g;
        }
      }
      adamw_step(opt, params, grads);
    }
  }

  std::size_t hits = 0;
  for (std::size_t r = 0; r < test_x.rows(); ++r) {
    forward(test_x.row(r), logits);
    hits += argmax_lowest(logits) == test_y[r] ? 1 : 0;
  }
  report.accuracy = static_cast<double>(hits) / static_cast<double>(test_y.size());
  return report;
}

ProbeReport sufficient_statistic_probe(const ModelParams& params, const Dataset& train_data, const Dataset& test_data,
                                       std::size_t target, const std::vector<std::size_t>& feature_modalities,
                                       bool missing_indicator, const ProbeConfig& cfg) {
  if (feature_modalities.empty()) throw InvalidArgument("sufficient_statistic_probe: no feature modalities");
  auto features = [&](const Dataset& d) {
    Matrix prod;
    for (std::size_t i = 0; i < feature_modalities.size(); ++i) {
      const std::size_t m = feature_modalities[i];
      if (m >= d.num_modalities() || m == target) {
        throw InvalidArgument("sufficient_statistic_probe: invalid feature modality");
      }
      Matrix r = encode(params.encoders[m], encoder_input(d, m, missing_indicator)).out;
      prod = i == 0 ? std::move(r) : hadamard(prod, r);
    }
    return prod;
  };
  auto labels = [&](const Dataset& d) {
    if (target >= d.num_modalities()) throw InvalidArgument("sufficient_statistic_probe: target out of range");
    std::vector<std::size_t> y(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) y[i] = binary_code(d.modalities[target].row(i));
    return y;
  };
  return train_linear_probe(features(train_data), labels(train_data), features(test_data), labels(test_data), cfg);
}

ScorerRecovery recover_optimal_scorer(const JointTable& t, const std::vector<VarGroup>& groups,
                                      const RecoveryConfig& cfg, const std::vector<double>* init) {
  if (cfg.batch_size < 2) throw InvalidArgument("recover_optimal_scorer: batch size must be >= 2");
  if (cfg.steps < 1 || cfg.episodes_per_step < 1) throw InvalidArgument("recover_optimal_scorer: steps must be >= 1");
  const ContrastiveSampler sampler(t, groups);
  const TabularScorer target = optimal_scorer(t, groups);
  const std::size_t n_states = sampler.layout().num_states();

  ScorerRecovery out;
  out.learned = TabularScorer{sampler.layout(), groups, std::vector<double>(n_states, 0.0)};
  if (init != nullptr) {
    if (init->size() != n_states) throw InvalidArgument("recover_optimal_scorer: initial scores have the wrong size");
    out.learned.scores = *init;
  }
  auto& g = out.learned.scores;

  OptimizerState opt(AdamWConfig{cfg.lr, 0.9, 0.999, 1e-8, 0.0}, n_states);
  Rng rng = Rng(cfg.seed).substream("recover");
  std::vector<double> grad(n_states);
  std::vector<std::size_t> states;
  std::vector<double> w(cfg.batch_size);
  std::vector<double> step_loss(cfg.steps);
  const double weight = 1.0 / static_cast<double>(groups.size() * cfg.episodes_per_step);
  // Iterates from the second half of the run are averaged.
  const std::size_t avg_from = cfg.steps / 2;
  std::vector<double> avg(n_states, 0.0);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t a = 0; a < groups.size(); ++a) {
      for (std::size_t e = 0; e < cfg.episodes_per_step; ++e) {
        sampler.draw(a, cfg.batch_size, rng, states);
        double mx = -std::numeric_limits<double>::infinity();
        for (auto s : states) mx = std::max(mx, g[s]);
        double z = 0.0;
        for (std::size_t j = 0; j < states.size(); ++j) {
          w[j] = std::exp(g[states[j]] - mx);
          z += w[j];
        }
        loss += (std::log(z) - (g[states[0]] - mx)) * weight;
        for (std::size_t j = 0; j < states.size(); ++j) {
          grad[states[j]] += (w[j] / z - (j == 0 ? 1.0 : 0.0)) * weight;
        }
      }
    }
    step_loss[step] = loss;
    adamw_step(opt, g, grad);
    if (step >= avg_from) {
      const double k = static_cast<double>(step - avg_from + 1);
      for (std::size_t s = 0; s < n_states; ++s) {
        avg[s] = std::isfinite(g[s]) ? avg[s] + (g[s] - avg[s]) / k : g[s];
      }
    }
  }
  g = avg;

  const std::size_t window = std::max<std::size_t>(1, cfg.steps / 10);
  const auto first = moments(std::span<const double>(step_loss.data(), window));
  const auto last = moments(std::span<const double>(step_loss.data() + cfg.steps - window, window));
  out.initial_loss = first.mean;
  out.final_loss = last.mean;
  const double se = std::sqrt((first.sd * first.sd + last.sd * last.sd) / static_cast<double>(window));
  out.converged = std::isfinite(out.final_loss) && out.final_loss <= out.initial_loss + 3.0 * se;

  const auto p = sampler.table().probs();
  for (std::size_t s = 0; s < n_states; ++s) {
    if (p[s] > 0.0) out.offsets.push_back(g[s] - target.scores[s]);
  }
  out.offset_stdev = moments(out.offsets).sd;
  return out;
}

std::vector<BoundRow> bound_tightness_report(const JointTable& t, const std::vector<VarGroup>& groups,
                                             const std::vector<std::size_t>& batch_sizes, std::size_t mc_samples,
                                             std::uint64_t seed, std::size_t anchor) {
  if (batch_sizes.empty()) throw InvalidArgument("bound_tightness_report: no batch sizes");
  const TabularScorer g = optimal_scorer(t, groups);
  const double tc = total_correlation(t, groups);
  std::vector<BoundRow> rows;
  const Rng root = Rng(seed).substream("tightness");
  for (auto n : batch_sizes) {
    Rng per_n = root.substream(static_cast<std::uint64_t>(n));
    const auto est = bound_value(t, g, n, mc_samples, per_n.next_u64(), anchor);
    rows.push_back(BoundRow{n, est.estimate, est.std_error, tc});
  }
  return rows;
}

std::vector<GradCheckCase> gradient_check_suite(std::size_t num_configs, std::uint64_t seed, double tolerance) {
  struct Kind {
    const char* name;
    Objective objective;
    NegativeStrategy strategy;
    std::size_t modalities;
  };
  static constexpr Kind kKinds[] = {
      {"clip_pair", Objective::pairwise_clip, NegativeStrategy::on_permute, 2},
      {"pairwise_clip", Objective::pairwise_clip, NegativeStrategy::on_permute, 3},
      {"symile/on", Objective::symile, NegativeStrategy::on_permute, 2},
      {"symile/on", Objective::symile, NegativeStrategy::on_permute, 3},
      {"symile/on2", Objective::symile, NegativeStrategy::on_squared, 3},
  };
  constexpr std::size_t kNumKinds = sizeof(kKinds) / sizeof(kKinds[0]);
  constexpr double kEps = 1e-5;

  std::vector<GradCheckCase> cases;
  const Rng root = Rng(seed).substream("gradcheck");
  for (std::size_t c = 0; c < num_configs; ++c) {
    const Kind& kind = kKinds[c % kNumKinds];
    const bool normalize = (c / kNumKinds) % 2 == 0;
    Rng rng = root.substream(c);
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(7));
    const std::size_t d_out = 2 + static_cast<std::size_t>(rng.below(5));

    std::vector<std::size_t> in_dims;
    std::vector<Matrix> inputs;
    for (std::size_t m = 0; m < kind.modalities; ++m) {
      const std::size_t d_in = 1 + static_cast<std::size_t>(rng.below(4));
      in_dims.push_back(d_in);
      Matrix x(n, d_in);
      for (double& v : x.flat()) v = 2.0 * rng.uniform() - 1.0;
      inputs.push_back(std::move(x));
    }
    ModelParams params = init_model(in_dims, d_out, normalize, 2.0 * rng.uniform() - 1.0, rng.next_u64());
    for (auto& e : params.encoders) {
      for (double& b : e.bias) b = rng.uniform() - 0.5;
    }
    const AnchorPermutations perms = draw_permutations(kind.modalities, n, rng);

    const auto analytic = model_loss_grad(params, inputs, kind.objective, kind.strategy, perms).grad.flatten();
    ModelParams probe = params;
    const ScalarFn f = [&](std::span<const double> flat) {
      probe.assign(flat);
      return model_loss(probe, inputs, kind.objective, kind.strategy, perms).loss;
    };
    const auto numeric = finite_diff_grad(f, params.flatten(), kEps);

    std::ostringstream desc;
    desc << kind.name << " M=" << kind.modalities << " N=" << n << " D=" << d_out
         << " normalize=" << (normalize ? 1 : 0);
    cases.push_back(GradCheckCase{desc.str(), compare_gradients(analytic, numeric, params.blocks(), tolerance)});
  }
  return cases;
}

}  // namespace symile
