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

#include "cli.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "symile/error.hpp"
#include "symile/info_oracle.hpp"
#include "symile/rng.hpp"

namespace symile::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write '" + path + "'");
  os << text;
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw InvalidArgument("cannot write '" + tmp.string() + "'");
    os << text;
  }
  fs::rename(tmp, path);
}

std::string relative_to(const fs::path& target, const fs::path& base_file) {
  const fs::path base = fs::absolute(base_file).parent_path();
  return fs::relative(fs::absolute(target), base).generic_string();
}

void apply_env_seed(std::uint64_t& seed, std::ostream& err) {
  if (const auto s = env_seed()) {
    err << "SYMILE_SEED=" << *s << " overrides seed " << seed << "\n";
    seed = *s;
  }
}

std::vector<int> to_ints(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string dataset;
  std::size_t n = 16000;
  double p_hat = 1.0;
  std::string i_mode = "shared";
  int dims = 5;
  std::uint64_t seed = 0;
  double missing_p = 0.0;
  std::string out;
  CLI::Option* p_hat_opt = nullptr;
  CLI::Option* i_mode_opt = nullptr;
  CLI::Option* dims_opt = nullptr;
};

int cmd_gen(GenArgs& a, std::ostream& out, std::ostream& err) {
  if (a.dataset == "xor1d") {
    for (const auto* o : {a.p_hat_opt, a.i_mode_opt, a.dims_opt}) {
      if (o->count() > 0) throw InvalidArgument(o->get_name() + " applies to --dataset synth5d only");
    }
  }
  if (a.n < 1) throw InvalidArgument("--n must be >= 1");
  apply_env_seed(a.seed, err);
  Dataset d = a.dataset == "xor1d" ? gen_xor1d(a.n, a.seed)
                                   : gen_synth5d(a.n, a.p_hat, a.seed, parse_imode(a.i_mode), a.dims);
  if (a.missing_p > 0.0) d = apply_missingness(d, a.missing_p, Rng(a.seed).substream("missingness").key());
  json params = {{"dataset", a.dataset}, {"n", a.n}, {"seed", a.seed}, {"missing_p", a.missing_p}};
  if (a.dataset == "synth5d") {
    params["p_hat"] = a.p_hat;
    params["i_mode"] = a.i_mode;
    params["dims"] = a.dims;
  }
  save_dataset(a.out, d, provenance(config_hash(params), a.seed));
  out << "wrote " << a.out << ": " << a.dataset << " n=" << d.size() << " modalities=" << d.num_modalities()
      << " seed=" << a.seed << "\n";
  return kOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string data;
  std::string out_dir;
  std::string objective;
  std::string strategy;
  std::string dataset;
  int epochs = 0;
  double p_hat = -1.0;
  double missing_p = -1.0;
  CLI::Option* seed_opt = nullptr;
  std::uint64_t seed = 0;
};

RunConfig resolve_run_config(const TrainArgs& a, std::ostream& err) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  if (!a.objective.empty()) cfg.train.objective = parse_objective(a.objective);
  if (!a.strategy.empty()) cfg.train.strategy = parse_strategy(a.strategy);
  if (!a.dataset.empty()) cfg.dataset = a.dataset;
  if (a.epochs > 0) cfg.train.epochs = a.epochs;
  if (a.p_hat >= 0.0) cfg.p_hat = a.p_hat;
  if (a.missing_p >= 0.0) cfg.train.missing_p = a.missing_p;
  if (a.seed_opt->count() > 0) cfg.train.seed = a.seed;
  apply_env_seed(cfg.train.seed, err);
  cfg.validate();
  return cfg;
}

Dataset load_or_make(const RunConfig& cfg, const std::string& data_path) {
  if (data_path.empty()) return make_dataset(cfg);
  Dataset d = load_dataset(data_path);
  if (d.size() != cfg.train.split.total()) {
    throw InvalidArgument("--data has " + std::to_string(d.size()) + " rows but the split needs " +
                          std::to_string(cfg.train.split.total()));
  }
  return d;
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_run_config(a, err);
  const DatasetSplits splits = prepare_splits(cfg, load_or_make(cfg, a.data));
  const TrainResult res = run_training(cfg, splits, cfg.out_dir);
  out << "trained " << to_string(cfg.train.objective) << "/" << to_string(cfg.train.strategy) << " config "
      << hash_hex(cfg.hash()) << ": best epoch " << res.best.epoch << " val_loss " << format_double(res.best.val_loss)
      << " -> " << (fs::path(cfg.out_dir) / "checkpoint.json").generic_string() << "\n";
  return kOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::size_t bootstrap = 10;
  std::string out;
};

Dataset test_split(const RunConfig& cfg, const std::string& data_path) {
  if (!data_path.empty()) return load_dataset(data_path).complete_rows();
  return split(make_dataset(cfg), cfg.train.split).test;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream&) {
  const RunConfig cfg = checkpoint_run_config(a.checkpoint);
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  EvalRow row = evaluate_checkpoint(cfg, ckpt, test_split(cfg, a.data), a.bootstrap);
  row.checkpoint_path = a.out.empty() || a.out == "-" ? fs::path(a.checkpoint).generic_string()
                                                      : relative_to(a.checkpoint, a.out);
  std::string text = provenance_line(ckpt.config_hash, cfg.train.seed, {{"resamples", a.bootstrap}});
  text += std::string(kResultsHeader) + "\n" + results_row(row) + "\n";
  emit(a.out, text, out);
  return kOk;
}

// ---- probe -----------------------------------------------------------------

struct ProbeArgs {
  std::string checkpoint;
  std::string target = "b";
  std::string features;
  int epochs = 200;
  std::string out;
};

std::size_t modality_index(const Dataset& d, const std::string& name) {
  for (std::size_t m = 0; m < d.names.size(); ++m) {
    if (d.names[m] == name) return m;
  }
  throw InvalidArgument("unknown modality '" + name + "'");
}

int cmd_probe(const ProbeArgs& a, std::ostream& out, std::ostream&) {
  const RunConfig cfg = checkpoint_run_config(a.checkpoint);
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const DatasetSplits s = split(make_dataset(cfg), cfg.train.split);
  const std::size_t target = modality_index(s.train, a.target);
  std::vector<std::size_t> features;
  std::string feature_names;
  if (a.features.empty()) {
    for (std::size_t m = 0; m < s.train.num_modalities(); ++m) {
      if (m != target) features.push_back(m);
    }
  } else {
    std::stringstream ss(a.features);
    std::string name;
    while (std::getline(ss, name, ',')) features.push_back(modality_index(s.train, name));
  }
  for (auto m : features) feature_names += (feature_names.empty() ? "" : ";") + s.train.names[m];
  ProbeConfig pc;
  pc.epochs = a.epochs;
  pc.seed = cfg.train.seed;
  const ProbeReport r =
      sufficient_statistic_probe(ckpt.params, s.train, s.test, target, features, ckpt.missing_indicator, pc);
  std::string text = provenance_line(ckpt.config_hash, cfg.train.seed);
  text += "target,features,accuracy,num_classes,n_test\n";
  text += a.target + "," + feature_names + "," + format_double(r.accuracy) + "," + std::to_string(r.num_classes) +
          "," + std::to_string(r.n_test) + "\n";
  emit(a.out, text, out);
  return kOk;
}

// ---- oracle ----------------------------------------------------------------

struct OracleArgs {
  std::string grid = "0:0.1:1";
  std::string dims = "1,5";
  std::string i_mode = "shared";
  std::string units = "nats";
  std::string out;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream&) {
  const auto grid = parse_double_list(a.grid, "--grid");
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("--grid: values must lie in [0, 1]");
  }
  const auto dims = to_ints(parse_size_list(a.dims, "--dims"));
  const IMode mode = parse_imode(a.i_mode);
  const bool bits = a.units == "bits";
  const json params = {{"grid", grid}, {"dims", dims}, {"i_mode", a.i_mode}, {"units", a.units}};
  std::string text = provenance_line(config_hash(params), 0);
  text += bits ? "p_hat,quantity,group_spec,value_bits\n" : std::string(kOracleHeader) + "\n";
  for (const auto& r : oracle_rows(grid, dims, mode)) {
    text += format_double(r.p_hat) + "," + r.quantity + "," + r.group_spec + "," +
            format_double(bits ? nats_to_bits(r.value_nats) : r.value_nats) + "\n";
  }
  emit(a.out, text, out);
  return kOk;
}

// ---- diagnose --------------------------------------------------------------

struct DiagnoseArgs {
  std::string check;
  std::string table = "xor";
  double p_hat = 1.0;
  std::string n_list = "1,2,8,32,128";
  std::size_t mc = 100000;
  std::size_t configs = 25;
  std::size_t steps = 3000;
  std::uint64_t seed = 0;
  std::string out;
};

struct DiagRow {
  std::string item;
  std::string metric;
  std::string value;
};

int cmd_diagnose(DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
  apply_env_seed(a.seed, err);
  const std::vector<VarGroup> groups = {{"a"}, {"b"}, {"c"}};
  const JointTable table = a.table == "xor" ? build_xor1d_table() : build_synth_table(a.p_hat, 1);
  std::vector<DiagRow> rows;
  bool pass = true;
  auto num = [](double v) { return format_double(v); };

  if (a.check == "bound") {
    const auto sizes = parse_size_list(a.n_list, "--n-list");
    for (auto n : sizes) {
      if (n < 1) throw InvalidArgument("--n-list: batch sizes must be >= 1");
    }
    for (const auto& r : bound_tightness_report(table, groups, sizes, a.mc, a.seed)) {
      const bool ok = r.bound <= r.tc + 3.0 * r.se;
      pass = pass && ok;
      const std::string item = "N=" + std::to_string(r.batch_size);
      rows.push_back({item, "bound", num(r.bound)});
      rows.push_back({item, "se", num(r.se)});
      rows.push_back({item, "tc", num(r.tc)});
      rows.push_back({item, "pass", ok ? "1" : "0"});
    }
  } else if (a.check == "scorer") {
    RecoveryConfig rc;
    rc.steps = a.steps;
    rc.seed = a.seed;
    const auto r = recover_optimal_scorer(table, groups, rc);
    pass = r.converged && r.offset_stdev < 0.05;
    rows.push_back({"scorer", "offset_stdev", num(r.offset_stdev)});
    rows.push_back({"scorer", "initial_loss", num(r.initial_loss)});
    rows.push_back({"scorer", "final_loss", num(r.final_loss)});
    rows.push_back({"scorer", "converged", r.converged ? "1" : "0"});
  } else if (a.check == "gradcheck") {
    for (const auto& c : gradient_check_suite(a.configs, a.seed)) {
      pass = pass && c.report.pass;
      rows.push_back({c.description, "max_rel_error", num(c.report.max_rel_error)});
    }
  } else {
    const std::vector<double> scores = {std::log(0.9375), std::log(1.25)};
    const std::vector<double> prior = {0.8, 0.2};
    const auto post = calibrated_conditional(scores, prior);
    const auto ranked = rank_with_prior(scores, prior);
    const char* names[] = {"a", "b"};
    for (std::size_t k = 0; k < 2; ++k) {
      rows.push_back({names[k], "score", num(scores[k])});
      rows.push_back({names[k], "prior", num(prior[k])});
      rows.push_back({names[k], "posterior", num(post[k])});
    }
    rows.push_back({"ranking", "raw_top", names[argmax_lowest(scores)]});
    rows.push_back({"ranking", "posterior_top", names[ranked.order.front()]});
    pass = std::abs(post[0] - 0.75) <= 1e-9 && std::abs(post[1] - 0.25) <= 1e-9 && argmax_lowest(scores) == 1 &&
           ranked.order.front() == 0;
  }
  rows.push_back({"all", "pass", pass ? "1" : "0"});

  const json params = {{"check", a.check}, {"table", a.table}, {"p_hat", a.p_hat}, {"n_list", a.n_list},
                       {"mc", a.mc},       {"configs", a.configs}, {"steps", a.steps}};
  std::string text = provenance_line(config_hash(params), a.seed);
  text += "check,item,metric,value\n";
  for (const auto& r : rows) text += a.check + "," + r.item + "," + r.metric + "," + r.value + "\n";
  emit(a.out, text, out);
  if (!pass) err << "diagnose " << a.check << ": FAIL\n";
  return pass ? kOk : kNumerical;
}

// ---- reproduce-fig3 --------------------------------------------------------

struct Fig3Args {
  std::string sweep;
  std::string grid;
  std::string objectives;
  std::string seeds;
  std::string split;
  int epochs = 0;
  std::string info_dims = "1,5";
  SweepOptions opts;
};

int run_fig3(Fig3Args& a, std::ostream& out, std::ostream& err) {
  SweepSpec spec = a.sweep.empty() ? SweepSpec{} : load_sweep(a.sweep);
  if (a.sweep.empty()) spec.grid = default_grid();
  if (!a.grid.empty()) spec.grid = parse_double_list(a.grid, "--grid");
  if (!a.objectives.empty()) {
    spec.objectives.clear();
    std::stringstream ss(a.objectives);
    std::string o;
    while (std::getline(ss, o, ',')) spec.objectives.push_back(parse_objective(o));
  }
  if (!a.seeds.empty()) {
    const auto s = parse_size_list(a.seeds, "--seeds");
    spec.seeds.assign(s.begin(), s.end());
  }
  if (const auto s = env_seed()) {
    err << "SYMILE_SEED=" << *s << " overrides the seed list\n";
    spec.seeds = {*s};
  }
  if (!a.split.empty()) {
    const auto s = parse_size_list(a.split, "--split");
    if (s.size() != 3) throw InvalidArgument("--split: expected train,val,test");
    spec.base.train.split = SplitSpec{s[0], s[1], s[2]};
  }
  if (a.epochs > 0) spec.base.train.epochs = a.epochs;
  spec.validate();
  a.opts.info_dims = to_ints(parse_size_list(a.info_dims, "--info-dims"));
  const int code = cmd_reproduce_fig3(spec, a.opts, err);
  out << "wrote " << (a.opts.out_dir / "accuracy.csv").generic_string() << " and "
      << (a.opts.out_dir / "information.csv").generic_string() << "\n";
  return code;
}

std::string cell_name(std::uint64_t base_hash, double p, Objective o, std::uint64_t seed) {
  return hash_hex(base_hash) + "-p" + format_double(p) + "-" + std::string(to_string(o)) + "-s" + std::to_string(seed);
}

json row_to_json(const EvalRow& r) {
  return {{"p_hat", r.p_hat},           {"objective", to_string(r.objective)},
          {"strategy", to_string(r.strategy)}, {"seed", r.seed},
          {"mean_acc", r.report.mean},  {"se", r.report.se},
          {"resamples", r.report.resamples}, {"bootstrap_seed", r.report.seed},
          {"n_test", r.n_test}};
}

EvalRow row_from_json(const json& j) {
  EvalRow r;
  r.p_hat = j.at("p_hat").get<double>();
  r.objective = parse_objective(j.at("objective").get<std::string>());
  r.strategy = parse_strategy(j.at("strategy").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.report.mean = j.at("mean_acc").get<double>();
  r.report.se = j.at("se").get<double>();
  r.report.resamples = j.at("resamples").get<std::size_t>();
  r.report.seed = j.at("bootstrap_seed").get<std::uint64_t>();
  r.n_test = j.at("n_test").get<std::size_t>();
  return r;
}

}  // namespace

int cmd_reproduce_fig3(const SweepSpec& spec, const SweepOptions& opts, std::ostream& log) {
  spec.validate();
  if (opts.jobs < 1) throw InvalidArgument("--jobs must be >= 1");
  if (opts.out_dir.empty()) throw InvalidArgument("--out-dir is required");
  const std::uint64_t base_hash = spec.base.hash();

  struct Cell {
    RunConfig cfg;
    std::string name;
    std::optional<EvalRow> row;
    std::string error;
    bool numerical = false;
  };
  std::vector<Cell> cells;
  for (double p : spec.grid) {
    for (Objective o : spec.objectives) {
      for (std::uint64_t seed : spec.seeds) {
        Cell c;
        c.cfg = spec.base;
        c.cfg.dataset = "synth5d";
        c.cfg.p_hat = p;
        c.cfg.train.objective = o;
        c.cfg.train.seed = seed;
        c.name = cell_name(base_hash, p, o, seed);
        c.cfg.out_dir = (opts.out_dir / "cells" / c.name).string();
        c.cfg.validate();
        cells.push_back(std::move(c));
      }
    }
  }
  fs::create_directories(opts.out_dir / "cells");

  std::mutex log_mu;
  auto say = [&](const std::string& msg) {
    const std::lock_guard<std::mutex> lock(log_mu);
    log << msg << "\n";
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      Cell& c = cells[k];
      const fs::path dir = c.cfg.out_dir;
      const fs::path result = dir / "result.json";
      try {
        if (fs::exists(result)) {
          std::ifstream is(result, std::ios::binary);
          c.row = row_from_json(json::parse(is));
          say("cell " + c.name + ": cached");
        } else {
          const DatasetSplits s = prepare_splits(c.cfg, make_dataset(c.cfg));
          const TrainResult tr = run_training(c.cfg, s, dir);
          EvalRow row = evaluate_checkpoint(c.cfg, tr.best, s.test.complete_rows(), opts.bootstrap);
          write_atomically(result, row_to_json(row).dump(1) + "\n");
          c.row = row;
          say("cell " + c.name + ": mean_acc " + format_double(row.report.mean));
        }
        c.row->checkpoint_path = (fs::path("cells") / c.name / "checkpoint.json").generic_string();
      } catch (const NumericalError& e) {
        c.error = e.what();
        c.numerical = true;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(opts.jobs, cells.size());
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::string> objectives;
  for (auto o : spec.objectives) objectives.emplace_back(to_string(o));
  const json extra = {{"grid", spec.grid}, {"objectives", objectives}, {"seeds", spec.seeds},
                      {"resamples", opts.bootstrap}};
  std::string acc = provenance_line(base_hash, spec.seeds.front(), extra);
  acc += std::string(kResultsHeader) + "\n";
  int failed = 0;
  bool numerical = false;
  for (const auto& c : cells) {
    if (c.row) {
      acc += results_row(*c.row) + "\n";
    } else {
      ++failed;
      numerical = numerical || c.numerical;
      log << "cell " << c.name << " failed: " << c.error << "\n";
    }
  }
  write_atomically(opts.out_dir / "accuracy.csv", acc);

  std::string info = provenance_line(base_hash, spec.seeds.front(), {{"grid", spec.grid}, {"dims", opts.info_dims}});
  info += std::string(kOracleHeader) + "\n";
  for (const auto& r : oracle_rows(spec.grid, opts.info_dims, spec.base.i_mode)) {
    info += format_double(r.p_hat) + "," + r.quantity + "," + r.group_spec + "," + format_double(r.value_nats) + "\n";
  }
  write_atomically(opts.out_dir / "information.csv", info);

  if (failed > 0) {
    log << failed << " of " << cells.size() << " cells failed\n";
    return numerical ? kNumerical : kUsage;
  }
  return kOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symile: contrastive learning beyond pairwise interactions"};
  app.name(args.empty() ? "symile" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic dataset file");
  g->add_option("--dataset", gen.dataset, "xor1d | synth5d")->required()->check(CLI::IsMember({"xor1d", "synth5d"}));
  g->add_option("--n", gen.n, "Number of samples")->capture_default_str();
  gen.p_hat_opt = g->add_option("--p-hat", gen.p_hat, "Probability that c carries a XOR b")
                      ->check(CLI::Range(0.0, 1.0))
                      ->capture_default_str();
  gen.i_mode_opt = g->add_option("--i-mode", gen.i_mode, "shared | per_coordinate")
                       ->check(CLI::IsMember({"shared", "per_coordinate"}))
                       ->capture_default_str();
  gen.dims_opt = g->add_option("--dims", gen.dims, "Bits per modality")->check(CLI::Range(1, 5))->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--missing-p", gen.missing_p, "Per-cell missingness probability")
      ->check(CLI::Range(0.0, 0.999999999))
      ->capture_default_str();
  g->add_option("--out", gen.out, "Output file")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a model and write a checkpoint");
  t->add_option("--config", tr.config, "Run configuration JSON")->check(CLI::ExistingFile);
  t->add_option("--data", tr.data, "Dataset file (train + val + test rows)")->check(CLI::ExistingFile);
  t->add_option("--out-dir", tr.out_dir, "Output directory");
  t->add_option("--objective", tr.objective, "symile | clip");
  t->add_option("--strategy", tr.strategy, "on | on2");
  t->add_option("--dataset", tr.dataset, "xor1d | synth5d");
  t->add_option("--epochs", tr.epochs)->check(CLI::PositiveNumber);
  t->add_option("--p-hat", tr.p_hat)->check(CLI::Range(0.0, 1.0));
  t->add_option("--missing-p", tr.missing_p)->check(CLI::Range(0.0, 0.999999999));
  tr.seed_opt = t->add_option("--seed", tr.seed);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Zero-shot accuracy of a checkpoint with bootstrap SE");
  e->add_option("--checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
  e->add_option("--data", ev.data, "Test dataset file (default: regenerate the test split)")->check(CLI::ExistingFile);
  e->add_option("--bootstrap", ev.bootstrap, "Bootstrap resamples")->check(CLI::PositiveNumber)->capture_default_str();
  e->add_option("--out", ev.out, "Results CSV (default: stdout)");

  ProbeArgs pr;
  auto* p = app.add_subcommand("probe", "Linear probe on products of learned representations");
  p->add_option("--checkpoint", pr.checkpoint)->required()->check(CLI::ExistingFile);
  p->add_option("--target", pr.target, "Modality to predict")->capture_default_str();
  p->add_option("--features", pr.features, "Comma-separated feature modalities (default: all others)");
  p->add_option("--epochs", pr.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  p->add_option("--out", pr.out, "Output CSV (default: stdout)");

  OracleArgs orc;
  auto* o = app.add_subcommand("oracle", "Exact information quantities of the synthetic tables");
  o->add_option("--grid", orc.grid, "p_hat values: list or start:step:stop")->capture_default_str();
  o->add_option("--dims", orc.dims, "Bits per modality, comma-separated")->capture_default_str();
  o->add_option("--i-mode", orc.i_mode)->check(CLI::IsMember({"shared", "per_coordinate"}))->capture_default_str();
  o->add_option("--units", orc.units)->check(CLI::IsMember({"nats", "bits"}))->capture_default_str();
  o->add_option("--out", orc.out, "Output CSV (default: stdout)");

  DiagnoseArgs dg;
  auto* d = app.add_subcommand("diagnose", "Numerical diagnostics");
  d->add_option("--check", dg.check)->required()->check(CLI::IsMember({"bound", "scorer", "gradcheck", "calibration"}));
  d->add_option("--table", dg.table, "xor | synth")->check(CLI::IsMember({"xor", "synth"}))->capture_default_str();
  d->add_option("--p-hat", dg.p_hat, "p_hat of the synth table")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  d->add_option("--n-list", dg.n_list, "Batch sizes for --check bound")->capture_default_str();
  d->add_option("--mc", dg.mc, "Monte-Carlo batches")->check(CLI::PositiveNumber)->capture_default_str();
  d->add_option("--configs", dg.configs, "Configurations for --check gradcheck")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  d->add_option("--steps", dg.steps, "Optimizer steps for --check scorer")->check(CLI::PositiveNumber)->capture_default_str();
  d->add_option("--seed", dg.seed)->capture_default_str();
  d->add_option("--out", dg.out, "Output CSV (default: stdout)");

  Fig3Args f3;
  std::string f3_out;
  auto* f = app.add_subcommand("reproduce-fig3", "Accuracy and information sweep over p_hat");
  f->add_option("--sweep", f3.sweep, "Sweep JSON {grid, objectives, seeds, overrides}")->check(CLI::ExistingFile);
  f->add_option("--grid", f3.grid, "p_hat values: list or start:step:stop");
  f->add_option("--objectives", f3.objectives, "Comma-separated: symile,clip");
  f->add_option("--seeds", f3.seeds, "Comma-separated seeds");
  f->add_option("--split", f3.split, "train,val,test sizes");
  f->add_option("--epochs", f3.epochs)->check(CLI::PositiveNumber);
  f->add_option("--info-dims", f3.info_dims, "Dimensionalities for information.csv")->capture_default_str();
  f->add_option("--jobs", f3.opts.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  f->add_option("--bootstrap", f3.opts.bootstrap)->check(CLI::PositiveNumber)->capture_default_str();
  f->add_option("--out-dir", f3_out)->required();

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out, err);
    if (t->parsed()) return cmd_train(tr, out, err);
    if (e->parsed()) return cmd_eval(ev, out, err);
    if (p->parsed()) return cmd_probe(pr, out, err);
    if (o->parsed()) return cmd_oracle(orc, out, err);
    if (d->parsed()) return cmd_diagnose(dg, out, err);
    f3.opts.out_dir = f3_out;
    return run_fig3(f3, out, err);
  } catch (const NumericalError& ex) {
    err << "numerical failure: " << ex.what() << "\n";
    return kNumerical;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  }
}

}  // namespace symile::cli
