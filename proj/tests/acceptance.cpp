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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "symile/info_oracle.hpp"
#include "symile/objectives.hpp"
#include "symile/rng.hpp"

namespace {

using namespace symile;
using namespace symile::cli;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<VarGroup> abc(int dims) {
  return {modality_vars('a', dims), modality_vars('b', dims), modality_vars('c', dims)};
}

// Trained accuracies are shared between criteria.
class Runs {
 public:
  double accuracy(const std::string& dataset, Objective o, double p_hat, double missing_p) {
    const std::string key = dataset + "/" + std::string(to_string(o)) + "/" + fmt("%.3f", p_hat) + "/" +
                            fmt("%.3f", missing_p);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    RunConfig cfg;
    cfg.dataset = dataset;
    cfg.p_hat = p_hat;
    cfg.train.objective = o;
    cfg.train.missing_p = missing_p;
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const DatasetSplits s = prepare_splits(cfg, make_dataset(cfg));
    const TrainResult r = train(cfg.train, s.train, s.val, cfg.hash());
    const EvalRow row = evaluate_checkpoint(cfg, r.best, s.test.complete_rows(), 10);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("  run %-40s acc %.4f  best epoch %d  (%.0f s)\n", key.c_str(), row.report.mean, r.best.epoch, secs);
    std::fflush(stdout);
    cache_[key] = row.report.mean;
    return row.report.mean;
  }

 private:
  std::map<std::string, double> cache_;
};

Verdict xor_criterion(Runs& runs) {
  const double sym = runs.accuracy("xor1d", Objective::symile, 1.0, 0.0);
  const double clip = runs.accuracy("xor1d", Objective::pairwise_clip, 1.0, 0.0);
  return {sym >= 0.99 && clip >= 0.45 && clip <= 0.55,
          "symile " + fmt("%.4f", sym) + " (>= 0.99), clip " + fmt("%.4f", clip) + " (in [0.45, 0.55])"};
}

Verdict endpoints_criterion(Runs& runs) {
  const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> sym;
  for (double p : grid) sym.push_back(runs.accuracy("synth5d", Objective::symile, p, 0.0));
  const double clip0 = runs.accuracy("synth5d", Objective::pairwise_clip, 0.0, 0.0);
  const double clip1 = runs.accuracy("synth5d", Objective::pairwise_clip, 1.0, 0.0);
  bool monotone = true;
  for (std::size_t k = 1; k < sym.size(); ++k) monotone = monotone && sym[k] >= sym[k - 1] - 0.03;
  const bool ok = std::abs(sym[0] - 0.032) <= 0.015 && std::abs(clip0 - 0.032) <= 0.015 && sym.back() >= 0.995 &&
                  clip1 <= 0.06 && monotone;
  std::string d = "symile";
  for (double a : sym) d += " " + fmt("%.4f", a);
  d += "; clip p=0 " + fmt("%.4f", clip0) + ", p=1 " + fmt("%.4f", clip1);
  d += monotone ? "; nondecreasing" : "; NOT nondecreasing";
  return {ok, d};
}

Verdict oracle_criterion() {
  double worst_pair = 0.0;
  double worst_identity = 0.0;
  bool increasing = true;
  double cmi_end = 0.0;
  double prev = -1.0;
  for (int k = 0; k <= 10; ++k) {
    const double p = k / 10.0;
    for (IMode mode : {IMode::shared, IMode::per_coordinate}) {
      for (int dims : {1, 5}) {
        const JointTable t = build_synth_table(p, dims, mode);
        const auto g = abc(dims);
        const double iab = mutual_information(t, g[0], g[1]);
        const double ibc = mutual_information(t, g[1], g[2]);
        const double iac = mutual_information(t, g[0], g[2]);
        worst_pair = std::max({worst_pair, std::abs(iab), std::abs(ibc)});
        const double tc = total_correlation(t, g);
        const double hi = conditional_mi(t, g[0], g[1], g[2]) + conditional_mi(t, g[1], g[2], g[0]) +
                          conditional_mi(t, g[0], g[2], g[1]);
        VarGroup ab = g[0];
        ab.insert(ab.end(), g[1].begin(), g[1].end());
        VarGroup bc = g[1];
        bc.insert(bc.end(), g[2].begin(), g[2].end());
        VarGroup ac = g[0];
        ac.insert(ac.end(), g[2].begin(), g[2].end());
        const double first = iab + mutual_information(t, g[2], ab) + ibc + mutual_information(t, g[0], bc) + iac +
                             mutual_information(t, g[1], ac);
        worst_identity = std::max({worst_identity, std::abs(3.0 * tc - first),
                                   std::abs(3.0 * tc - (2.0 * (iab + ibc + iac) + hi))});
        if (dims == 1 && mode == IMode::shared) {
          const double cmi = conditional_mi(t, g[0], g[1], g[2]);
          increasing = increasing && cmi > prev;
          prev = cmi;
          cmi_end = cmi;
        }
      }
    }
  }
  const double tc_xor = total_correlation(build_xor1d_table(), abc(1));
  const bool ok = worst_pair <= 1e-12 && increasing && std::abs(cmi_end - std::numbers::ln2) <= 1e-12 &&
                  tc_xor == std::numbers::ln2 && worst_identity <= 1e-10;
  return {ok, "max |I(a;b)|,|I(b;c)| " + fmt("%.1e", worst_pair) + ", CMI(p=1) " + fmt("%.17g", cmi_end) +
                  (increasing ? " strictly increasing" : " NOT increasing") + ", TC(xor) " + fmt("%.17g", tc_xor) +
                  ", identity residual " + fmt("%.1e", worst_identity)};
}

Verdict recovery_criterion() {
  const ScorerRecovery r = recover_optimal_scorer(build_xor1d_table(), abc(1), RecoveryConfig{});
  return {r.converged && r.offsets.size() == 4 && r.offset_stdev < 0.05,
          "stdev(g - log ratio) " + fmt("%.4f", r.offset_stdev) + " over " + std::to_string(r.offsets.size()) +
              " states"};
}

Verdict bound_criterion() {
  const auto rows = bound_tightness_report(build_xor1d_table(), abc(1), {1, 2, 8, 32, 128}, 100000, 2026);
  bool ok = rows.size() == 5 && rows[0].bound == 0.0;
  std::string d;
  for (const auto& r : rows) {
    ok = ok && r.bound <= r.tc + 3.0 * r.se;
    d += "N=" + std::to_string(r.batch_size) + " " + fmt("%.4f", r.bound) + " ";
  }
  const double gap = rows[4].bound - rows[1].bound;
  const double se = std::hypot(rows[4].se, rows[1].se);
  ok = ok && gap > 3.0 * se;
  return {ok, d + "(TC " + fmt("%.4f", rows[0].tc) + ", gap " + fmt("%.4f", gap) + " vs 3SE " + fmt("%.4f", 3 * se) +
                  ")"};
}

Verdict gradcheck_criterion() {
  const auto cases = gradient_check_suite(24, 2026);
  double worst = 0.0;
  bool ok = cases.size() >= 20;
  for (const auto& c : cases) {
    ok = ok && c.report.pass && c.report.max_rel_error < 1e-4;
    worst = std::max(worst, c.report.max_rel_error);
  }
  return {ok, std::to_string(cases.size()) + " configurations, max relative error " + fmt("%.2e", worst)};
}

Verdict calibration_criterion() {
  const std::vector<double> scores = {std::log(0.9375), std::log(1.25)};
  const std::vector<double> prior = {0.8, 0.2};
  const auto post = calibrated_conditional(scores, prior);
  const Ranking r = rank_with_prior(scores, prior);
  const bool ok = std::abs(post[0] - 0.75) <= 1e-9 && std::abs(post[1] - 0.25) <= 1e-9 && argmax_lowest(scores) == 1 &&
                  r.order.front() == 0;
  return {ok, "posterior (" + fmt("%.12f", post[0]) + ", " + fmt("%.12f", post[1]) + "), raw top " +
                  (argmax_lowest(scores) == 1 ? "b" : "a") + ", calibrated top " + (r.order.front() == 0 ? "a" : "b")};
}

Verdict missing_criterion(Runs& runs) {
  const double complete = runs.accuracy("synth5d", Objective::symile, 1.0, 0.0);
  const double sym = runs.accuracy("synth5d", Objective::symile, 1.0, 0.5);
  const double clip = runs.accuracy("synth5d", Objective::pairwise_clip, 1.0, 0.5);
  return {sym - clip >= 0.10 && sym < complete,
          "missing symile " + fmt("%.4f", sym) + ", missing clip " + fmt("%.4f", clip) + ", complete symile " +
              fmt("%.4f", complete)};
}

Verdict reduction_criterion() {
  Rng rng(2026);
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 16; ++n) {
    for (std::size_t d : {1u, 4u, 16u}) {
      const ModelParams p = init_model({3, 3}, d, true, -0.3, rng.next_u64());
      std::vector<Matrix> inputs;
      for (int m = 0; m < 2; ++m) {
        Matrix x(n, 3);
        for (double& v : x.flat()) v = rng.uniform() - 0.5;
        inputs.push_back(x);
      }
      const auto reps = encode_all(p, inputs);
      const SymileLoss s = symile_loss(reps, p.scale(), NegativeStrategy::on_permute, identity_permutations(2, n));
      const LossGrad c = clip_pair_loss_grad(reps[0], reps[1], p.scale());
      if (s.per_anchor[0] != c.per_term[0] || s.per_anchor[1] != c.per_term[1]) {
        return {false, "mismatch at N=" + std::to_string(n) + " D=" + std::to_string(d)};
      }
      ++checked;
    }
  }
  return {true, std::to_string(checked) + " cases bitwise equal (N = 1..16)"};
}

Verdict determinism_criterion(const fs::path& work) {
  SweepSpec spec;
  spec.grid = {0.0, 0.5, 1.0};
  spec.base.train.epochs = 3;
  spec.base.train.batch_size = 200;
  spec.base.train.split = SplitSpec{1000, 200, 500};
  std::ostringstream log;
  std::vector<std::string> acc;
  std::vector<std::string> info;
  for (const char* name : {"run1", "run2"}) {
    fs::remove_all(work / name);
    SweepOptions opts;
    opts.out_dir = work / name;
    if (cmd_reproduce_fig3(spec, opts, log) != kOk) return {false, "sweep failed: " + log.str()};
    for (auto [file, out] : {std::pair{"accuracy.csv", &acc}, std::pair{"information.csv", &info}}) {
      std::ifstream is(work / name / file, std::ios::binary);
      std::stringstream ss;
      ss << is.rdbuf();
      const std::string text = ss.str();
      out->push_back(text.substr(text.find('\n') + 1));
    }
  }
  const bool ok = acc[0] == acc[1] && info[0] == info[1] && !acc[0].empty();
  return {ok, std::string("accuracy.csv ") + (acc[0] == acc[1] ? "identical" : "DIFFERS") + ", information.csv " +
                  (info[0] == info[1] ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string work = (fs::temp_directory_path() / "symile_acceptance").string();
  std::vector<int> only;
  app.add_option("--work-dir", work, "Scratch directory for sweep outputs")->capture_default_str();
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  Runs runs;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"xor: symile succeeds, clip at chance", [&] { return xor_criterion(runs); }},
      {"5d sweep endpoints and monotonicity", [&] { return endpoints_criterion(runs); }},
      {"exact information quantities", [] { return oracle_criterion(); }},
      {"optimal scorer recovery", [] { return recovery_criterion(); }},
      {"contrastive bound with the optimal scorer", [] { return bound_criterion(); }},
      {"analytic gradients vs finite differences", [] { return gradcheck_criterion(); }},
      {"calibrated posterior and ranking flip", [] { return calibration_criterion(); }},
      {"missing modalities", [&] { return missing_criterion(runs); }},
      {"two-modality reduction to clip", [] { return reduction_criterion(); }},
      {"sweep determinism", [&] { return determinism_criterion(work); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s: %s  [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
