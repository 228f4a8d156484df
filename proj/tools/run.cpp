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

#include "run.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "symile/error.hpp"
#include "symile/info_oracle.hpp"
#include "symile/rng.hpp"

namespace symile::cli {
namespace {

using nlohmann::json;

const std::set<std::string>& run_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k = train_config_keys();
    k.insert({"dataset", "p_hat", "i_mode", "dims", "out_dir"});
    return k;
  }();
  return keys;
}

json read_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot read '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write '" + path.string() + "'");
  os << text;
}

double parse_double(const std::string& cell, const std::string& flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || !std::isfinite(v)) {
    throw InvalidArgument(flag + ": '" + cell + "' is not a number");
  }
  return v;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  train.validate();
  if (dataset != "xor1d" && dataset != "synth5d") throw InvalidArgument("dataset must be xor1d or synth5d");
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw InvalidArgument("p_hat must lie in [0, 1]");
  if (dims < 1 || dims > 5) throw InvalidArgument("dims must lie in [1, 5]");
  if (out_dir.empty()) throw InvalidArgument("out_dir must not be empty");
}

json RunConfig::to_json() const {
  json j = symile::to_json(train);
  j["dataset"] = dataset;
  j["p_hat"] = p_hat;
  j["i_mode"] = to_string(i_mode);
  j["dims"] = dims;
  j["out_dir"] = out_dir;
  return j;
}

std::uint64_t RunConfig::hash() const {
  json j = to_json();
  j.erase("out_dir");
  return config_hash(j);
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  reject_unknown_keys(j, run_keys(), "run config");
  c.train = train_config_from_json(j, c.train);
  try {
    if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
    if (j.contains("p_hat")) c.p_hat = j.at("p_hat").get<double>();
    if (j.contains("i_mode")) c.i_mode = parse_imode(j.at("i_mode").get<std::string>());
    if (j.contains("dims")) c.dims = j.at("dims").get<int>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("run config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) { return run_config_from_json(read_json_file(path)); }

void SweepSpec::validate() const {
  if (grid.empty()) throw InvalidArgument("sweep: p_hat grid is empty");
  if (objectives.empty()) throw InvalidArgument("sweep: objective list is empty");
  if (seeds.empty()) throw InvalidArgument("sweep: seed list is empty");
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("sweep: grid values must lie in [0, 1]");
  }
  base.validate();
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 10; ++k) g.push_back(k / 10.0);
  return g;
}

SweepSpec sweep_from_json(const json& j) {
  reject_unknown_keys(j, {"grid", "objectives", "seeds", "overrides"}, "sweep");
  SweepSpec s;
  s.grid = default_grid();
  try {
    if (j.contains("grid")) s.grid = j.at("grid").get<std::vector<double>>();
    if (j.contains("objectives")) {
      s.objectives.clear();
      for (const auto& o : j.at("objectives")) s.objectives.push_back(parse_objective(o.get<std::string>()));
    }
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("sweep: ") + e.what());
  }
  if (j.contains("overrides")) {
    const json& o = j.at("overrides");
    if (o.is_object()) {
      for (const char* k : {"p_hat", "objective", "seed", "dataset"}) {
        if (o.contains(k)) throw InvalidArgument(std::string("sweep: '") + k + "' cannot be overridden per cell");
      }
    }
    s.base = run_config_from_json(o, s.base);
  }
  s.validate();
  return s;
}

SweepSpec load_sweep(const std::string& path) { return sweep_from_json(read_json_file(path)); }

Dataset make_dataset(const RunConfig& cfg) {
  const std::size_t n = cfg.train.split.total();
  if (cfg.dataset == "xor1d") return gen_xor1d(n, cfg.train.seed);
  return gen_synth5d(n, cfg.p_hat, cfg.train.seed, cfg.i_mode, cfg.dims);
}

DatasetSplits prepare_splits(const RunConfig& cfg, const Dataset& data) {
  DatasetSplits s = split(data, cfg.train.split);
  if (cfg.train.missing_p > 0.0) {
    const Rng r = Rng(cfg.train.seed).substream("missingness");
    s.train = apply_missingness(s.train, cfg.train.missing_p, r.substream("train").key());
    s.val = apply_missingness(s.val, cfg.train.missing_p, r.substream("val").key());
  }
  return s;
}

ScorerKind scorer_for(Objective o) { return o == Objective::symile ? ScorerKind::symile : ScorerKind::clip; }

EvalRow evaluate_checkpoint(const RunConfig& cfg, const Checkpoint& ckpt, const Dataset& test, std::size_t resamples) {
  const auto res =
      classify_target(ckpt.params, scorer_for(cfg.train.objective), test, kTargetModality, ckpt.missing_indicator);
  EvalRow row;
  row.p_hat = cfg.dataset == "xor1d" ? 1.0 : cfg.p_hat;
  row.objective = cfg.train.objective;
  row.strategy = cfg.train.strategy;
  row.seed = cfg.train.seed;
  row.report = bootstrap_accuracy(res, resamples, Rng(cfg.train.seed).substream("eval").key());
  row.n_test = res.truth.size();
  return row;
}

std::string provenance_line(std::uint64_t hash, std::uint64_t seed, const json& extra) {
  return provenance(hash, seed, extra).dump() + "\n";
}

std::string results_row(const EvalRow& r) {
  std::string s = format_double(r.p_hat);
  s += ',';
  s += to_string(r.objective);
  s += ',';
  s += to_string(r.strategy);
  s += ',' + std::to_string(r.seed);
  s += ',' + format_double(r.report.mean);
  s += ',' + format_double(r.report.se);
  s += ',' + std::to_string(r.n_test);
  s += ',' + r.checkpoint_path;
  return s;
}

std::vector<OracleRow> oracle_rows(const std::vector<double>& grid, const std::vector<int>& dims_list, IMode mode) {
  std::vector<OracleRow> rows;
  for (double p : grid) {
    for (int dims : dims_list) {
      const JointTable t = build_synth_table(p, dims, mode);
      const VarGroup a = modality_vars('a', dims);
      const VarGroup b = modality_vars('b', dims);
      const VarGroup c = modality_vars('c', dims);
      const std::string tag = " [dims=" + std::to_string(dims) + "]";
      rows.push_back({p, "MI", "a;b" + tag, mutual_information(t, a, b)});
      rows.push_back({p, "MI", "b;c" + tag, mutual_information(t, b, c)});
      rows.push_back({p, "MI", "a;c" + tag, mutual_information(t, a, c)});
      rows.push_back({p, "CMI", "a;b|c" + tag, conditional_mi(t, a, b, c)});
      rows.push_back({p, "CMI", "b;c|a" + tag, conditional_mi(t, b, c, a)});
      rows.push_back({p, "CMI", "a;c|b" + tag, conditional_mi(t, a, c, b)});
      rows.push_back({p, "TC", "a;b;c" + tag, total_correlation(t, {a, b, c})});
    }
  }
  return rows;
}

RunConfig checkpoint_run_config(const std::string& path) {
  const json j = read_json_file(path);
  if (!j.contains("provenance") || !j.at("provenance").contains("run_config")) {
    throw InvalidArgument("checkpoint '" + path + "' carries no run configuration");
  }
  return run_config_from_json(j.at("provenance").at("run_config"));
}

TrainResult run_training(const RunConfig& cfg, const DatasetSplits& splits, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::uint64_t hash = cfg.hash();
  TrainResult res = train(cfg.train, splits.train, splits.val, hash);

  std::string losses = provenance_line(hash, cfg.train.seed);
  losses += "epoch,train_loss,val_loss\n";
  for (const auto& e : res.history) {
    losses += std::to_string(e.epoch) + ',' + format_double(e.train_loss) + ',' + format_double(e.val_loss) + '\n';
  }
  write_text(dir / "losses.csv", losses);
  json cfg_file = cfg.to_json();
  cfg_file.erase("out_dir");
  write_text(dir / "config.json", cfg_file.dump(2) + "\n");
  save_checkpoint((dir / "checkpoint.json").string(), res.best, json{{"run_config", cfg_file}});
  return res;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ':')) parts.push_back(cell);
    if (parts.size() != 3) throw InvalidArgument(flag + ": expected start:step:stop");
    const double start = parse_double(parts[0], flag);
    const double step = parse_double(parts[1], flag);
    const double stop = parse_double(parts[2], flag);
    if (!(step > 0.0) || stop < start) throw InvalidArgument(flag + ": empty or unbounded range");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
  for (const auto& cell : split_commas(text)) out.push_back(parse_double(cell, flag));
  if (out.empty()) throw InvalidArgument(flag + ": empty list");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> out;
  for (const auto& cell : split_commas(text)) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size() || cell.front() == '-') {
      throw InvalidArgument(flag + ": '" + cell + "' is not a non-negative integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw InvalidArgument(flag + ": empty list");
  return out;
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("SYMILE_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (errno != 0 || *end != '\0' || v[0] == '-') throw InvalidArgument("SYMILE_SEED must be a non-negative integer");
  return static_cast<std::uint64_t>(s);
}

}  // namespace symile::cli
