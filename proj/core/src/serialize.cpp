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

#include "symile/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "symile/error.hpp"
#include "symile/rng.hpp"

namespace symile {
namespace {

using nlohmann::json;

template <typename T>
T get_checked(const json& j, const char* key, std::string_view context) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string(context) + ": bad or missing field '" + key + "': " + e.what());
  }
}

std::vector<double> split_doubles(const std::string& line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    const std::string cell = line.substr(start, end - start);
    double v = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw InvalidArgument("dataset file: bad number '" + cell + "'");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is, std::size_t rows, std::size_t cols, const std::string& what) {
  Matrix m(rows, cols);
  std::string line;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw InvalidArgument("dataset file: truncated block " + what);
    const auto v = split_doubles(line);
    if (v.size() != cols) throw InvalidArgument("dataset file: wrong column count in block " + what);
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

void expect_line(std::istream& is, const std::string& expected) {
  std::string line;
  if (!std::getline(is, line) || line != expected) {
    throw InvalidArgument("dataset file: expected '" + expected + "', found '" + line + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t parse_hash_hex(std::string_view text) {
  std::uint64_t h = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), h, 16);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw InvalidArgument("bad hash '" + std::string(text) + "'");
  return h;
}

std::string canonical_json(const json& j) { return j.dump(); }

std::uint64_t config_hash(const json& j) { return fnv1a64(canonical_json(j)); }

json provenance(std::uint64_t hash, std::uint64_t seed, const json& extra) {
  json p = {{"tool", kToolName}, {"version", kToolVersion}, {"config_hash", hash_hex(hash)}, {"seed", seed}};
  for (const auto& [k, v] : extra.items()) p[k] = v;
  return p;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, std::string_view context) {
  if (!j.is_object()) throw InvalidArgument(std::string(context) + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (allowed.count(k) == 0) throw InvalidArgument(std::string(context) + ": unknown key '" + k + "'");
  }
}

const std::set<std::string>& train_config_keys() {
  static const std::set<std::string> keys = {"objective", "strategy", "epochs",    "batch_size", "lr",
                                             "weight_decay", "t_init", "d_out",   "normalize",  "seed",
                                             "split",     "missing_p"};
  return keys;
}

json to_json(const TrainConfig& c) {
  return json{{"objective", to_string(c.objective)},
              {"strategy", to_string(c.strategy)},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"lr", c.lr},
              {"weight_decay", c.weight_decay},
              {"t_init", c.t_init},
              {"d_out", c.d_out},
              {"normalize", c.normalize},
              {"seed", c.seed},
              {"split", {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}}},
              {"missing_p", c.missing_p}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  constexpr std::string_view ctx = "train config";
  if (!j.is_object()) throw InvalidArgument("train config: expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (train_config_keys().count(k) == 0) continue;
    if (k == "objective") c.objective = parse_objective(get_checked<std::string>(j, "objective", ctx));
    if (k == "strategy") c.strategy = parse_strategy(get_checked<std::string>(j, "strategy", ctx));
    if (k == "epochs") c.epochs = get_checked<int>(j, "epochs", ctx);
    if (k == "batch_size") c.batch_size = get_checked<std::size_t>(j, "batch_size", ctx);
    if (k == "lr") c.lr = get_checked<double>(j, "lr", ctx);
    if (k == "weight_decay") c.weight_decay = get_checked<double>(j, "weight_decay", ctx);
    if (k == "t_init") c.t_init = get_checked<double>(j, "t_init", ctx);
    if (k == "d_out") c.d_out = get_checked<std::size_t>(j, "d_out", ctx);
    if (k == "normalize") c.normalize = get_checked<bool>(j, "normalize", ctx);
    if (k == "seed") c.seed = get_checked<std::uint64_t>(j, "seed", ctx);
    if (k == "missing_p") c.missing_p = get_checked<double>(j, "missing_p", ctx);
    if (k == "split") {
      reject_unknown_keys(v, {"train", "val", "test"}, "train config split");
      c.split.train = get_checked<std::size_t>(v, "train", ctx);
      c.split.val = get_checked<std::size_t>(v, "val", ctx);
      c.split.test = get_checked<std::size_t>(v, "test", ctx);
    }
  }
  return c;
}

json to_json(const ModelParams& p) {
  json encoders = json::array();
  for (const auto& e : p.encoders) {
    encoders.push_back({{"rows", e.weight.rows()},
                        {"cols", e.weight.cols()},
                        {"normalize", e.normalize},
                        {"weight", std::vector<double>(e.weight.flat().begin(), e.weight.flat().end())},
                        {"bias", e.bias}});
  }
  return json{{"log_temperature", p.log_temperature}, {"encoders", encoders}};
}

ModelParams model_params_from_json(const json& j) {
  constexpr std::string_view ctx = "model";
  ModelParams p;
  p.log_temperature = get_checked<double>(j, "log_temperature", ctx);
  for (const auto& e : j.at("encoders")) {
    const auto rows = get_checked<std::size_t>(e, "rows", ctx);
    const auto cols = get_checked<std::size_t>(e, "cols", ctx);
    const auto w = get_checked<std::vector<double>>(e, "weight", ctx);
    const auto b = get_checked<std::vector<double>>(e, "bias", ctx);
    if (w.size() != rows * cols || b.size() != rows) throw InvalidArgument("model: encoder shape mismatch");
    AffineEncoder enc{Matrix(rows, cols), b, get_checked<bool>(e, "normalize", ctx)};
    std::copy(w.begin(), w.end(), enc.weight.flat().begin());
    p.encoders.push_back(std::move(enc));
  }
  return p;
}

json to_json(const OptimizerState& s) {
  return json{{"lr", s.config.lr},   {"beta1", s.config.beta1}, {"beta2", s.config.beta2},
              {"eps", s.config.eps}, {"weight_decay", s.config.weight_decay},
              {"step", s.step},      {"m", s.m}, {"v", s.v}};
}

OptimizerState optimizer_state_from_json(const json& j) {
  constexpr std::string_view ctx = "optimizer";
  OptimizerState s;
  s.config = AdamWConfig{get_checked<double>(j, "lr", ctx), get_checked<double>(j, "beta1", ctx),
                         get_checked<double>(j, "beta2", ctx), get_checked<double>(j, "eps", ctx),
                         get_checked<double>(j, "weight_decay", ctx)};
  s.step = get_checked<std::uint64_t>(j, "step", ctx);
  s.m = get_checked<std::vector<double>>(j, "m", ctx);
  s.v = get_checked<std::vector<double>>(j, "v", ctx);
  if (s.m.size() != s.v.size()) throw InvalidArgument("optimizer: moment sizes differ");
  return s;
}

json to_json(const Checkpoint& c) {
  return json{{"epoch", c.epoch},
              {"val_loss", c.val_loss},
              {"config_hash", hash_hex(c.config_hash)},
              {"seed", c.seed},
              {"missing_indicator", c.missing_indicator},
              {"model", to_json(c.params)},
              {"optimizer", to_json(c.optimizer)}};
}

Checkpoint checkpoint_from_json(const json& j) {
  constexpr std::string_view ctx = "checkpoint";
  Checkpoint c;
  c.epoch = get_checked<int>(j, "epoch", ctx);
  c.val_loss = get_checked<double>(j, "val_loss", ctx);
  c.config_hash = parse_hash_hex(get_checked<std::string>(j, "config_hash", ctx));
  c.seed = get_checked<std::uint64_t>(j, "seed", ctx);
  c.missing_indicator = get_checked<bool>(j, "missing_indicator", ctx);
  c.params = model_params_from_json(j.at("model"));
  c.optimizer = optimizer_state_from_json(j.at("optimizer"));
  if (c.optimizer.m.size() != c.params.num_params()) throw InvalidArgument("checkpoint: optimizer/model size mismatch");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& c, const json& extra) {
  json j = to_json(c);
  j["provenance"] = provenance(c.config_hash, c.seed, extra);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write checkpoint '" + path + "'");
  os << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot read checkpoint '" + path + "'");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  return checkpoint_from_json(j);
}

void write_dataset(std::ostream& os, const Dataset& d, const json& prov) {
  d.validate();
  json mods = json::array();
  for (std::size_t m = 0; m < d.num_modalities(); ++m) {
    mods.push_back({{"name", d.names[m]}, {"dims", d.modalities[m].cols()}});
  }
  const json header = {{"format", "symile-dataset"},
                       {"schema_version", kDatasetSchemaVersion},
                       {"tool", kToolName},
                       {"version", kToolVersion},
                       {"kind", d.info.kind},
                       {"n", d.size()},
                       {"modalities", mods},
                       {"latent_dims", d.latents.cols()},
                       {"has_masks", d.has_masks()},
                       {"seed", d.info.seed},
                       {"p_hat", d.info.p_hat},
                       {"i_mode", to_string(d.info.i_mode)},
                       {"missing_p", d.info.missing_p}};
  json full = header;
  if (!prov.empty()) full["provenance"] = prov;
  os << full.dump() << '\n';
  for (std::size_t m = 0; m < d.num_modalities(); ++m) {
    os << "#modality " << d.names[m] << '\n';
    write_matrix(os, d.modalities[m]);
  }
  if (!d.latents.empty()) {
    os << "#latents\n";
    write_matrix(os, d.latents);
  }
  if (d.has_masks()) {
    os << "#masks\n";
    const std::size_t mm = d.num_modalities();
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t m = 0; m < mm; ++m) {
        if (m) os << ',';
        os << static_cast<int>(d.masks[i * mm + m]);
      }
      os << '\n';
    }
  }
}

Dataset read_dataset(std::istream& is) {
  constexpr std::string_view ctx = "dataset header";
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("dataset file: empty");
  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("dataset file: bad JSON header: ") + e.what());
  }
  if (h.value("format", "") != "symile-dataset") throw InvalidArgument("dataset file: not a symile dataset");
  if (get_checked<int>(h, "schema_version", ctx) != kDatasetSchemaVersion) {
    throw InvalidArgument("dataset file: unsupported schema version");
  }
  Dataset d;
  d.info.kind = get_checked<std::string>(h, "kind", ctx);
  d.info.seed = get_checked<std::uint64_t>(h, "seed", ctx);
  d.info.p_hat = get_checked<double>(h, "p_hat", ctx);
  d.info.i_mode = parse_imode(get_checked<std::string>(h, "i_mode", ctx));
  d.info.missing_p = get_checked<double>(h, "missing_p", ctx);
  const auto n = get_checked<std::size_t>(h, "n", ctx);
  for (const auto& m : h.at("modalities")) {
    const auto name = get_checked<std::string>(m, "name", ctx);
    expect_line(is, "#modality " + name);
    d.names.push_back(name);
    d.modalities.push_back(read_matrix(is, n, get_checked<std::size_t>(m, "dims", ctx), name));
  }
  const auto latent_dims = get_checked<std::size_t>(h, "latent_dims", ctx);
  if (latent_dims > 0) {
    expect_line(is, "#latents");
    d.latents = read_matrix(is, n, latent_dims, "latents");
  }
  if (get_checked<bool>(h, "has_masks", ctx)) {
    expect_line(is, "#masks");
    const Matrix masks = read_matrix(is, n, d.num_modalities(), "masks");
    for (double v : masks.flat()) {
      if (v != 0.0 && v != 1.0) throw InvalidArgument("dataset file: masks must be 0/1");
      d.masks.push_back(v != 0.0 ? 1 : 0);
    }
  }
  d.validate();
  return d;
}

void save_dataset(const std::string& path, const Dataset& d, const json& prov) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write dataset '" + path + "'");
  write_dataset(os, d, prov);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot read dataset '" + path + "'");
  return read_dataset(is);
}

}  // namespace symile
