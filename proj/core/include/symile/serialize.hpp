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
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "symile/synthdata.hpp"
#include "symile/traineval.hpp"

namespace symile {

inline constexpr std::string_view kToolName = "symile";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kDatasetSchemaVersion = 1;

/// 17 significant digits, '.' decimal point, locale independent.
std::string format_double(double v);

std::string hash_hex(std::uint64_t h);
std::uint64_t parse_hash_hex(std::string_view text);

/// Sorted-key, minimal-whitespace serialization.
std::string canonical_json(const nlohmann::json& j);
/// 64-bit FNV-1a of canonical_json(j).
std::uint64_t config_hash(const nlohmann::json& j);

/// {"tool", "version", "config_hash", "seed"} plus any extra fields.
nlohmann::json provenance(std::uint64_t config_hash, std::uint64_t seed, const nlohmann::json& extra = nlohmann::json::object());

/// Throws InvalidArgument naming the first key of `j` outside `allowed`.
void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed, std::string_view context);

nlohmann::json to_json(const TrainConfig& cfg);
/// Missing keys keep their defaults and bad values are rejected. Keys outside
/// train_config_keys() are skipped; callers owning the full schema check them.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
/// Keys accepted by train_config_from_json.
const std::set<std::string>& train_config_keys();

nlohmann::json to_json(const ModelParams& p);
ModelParams model_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OptimizerState& s);
OptimizerState optimizer_state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const Checkpoint& c, const nlohmann::json& extra = nlohmann::json::object());
Checkpoint load_checkpoint(const std::string& path);

/// Dataset file: one line of JSON header (schema version, shapes, seed,
/// p_hat, i_mode, ...) followed by "#modality <name>", "#latents" and
/// "#masks" blocks of row-major CSV. A non-empty `prov` is stored in the
/// header under "provenance".
void write_dataset(std::ostream& os, const Dataset& d, const nlohmann::json& prov = nlohmann::json::object());
Dataset read_dataset(std::istream& is);
void save_dataset(const std::string& path, const Dataset& d, const nlohmann::json& prov = nlohmann::json::object());
Dataset load_dataset(const std::string& path);

}  // namespace symile
