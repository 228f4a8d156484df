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

#include "symile/info_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "symile/error.hpp"
#include "symile/numcore.hpp"
#include "symile/rng.hpp"

namespace symile {
namespace {

constexpr double kSumTolerance = 1e-12;

void require_disjoint(const std::vector<VarGroup>& groups, const char* what) {
  std::set<std::string> seen;
  for (const auto& g : groups) {
    for (const auto& v : g) {
      if (!seen.insert(v).second) {
        throw InvalidArgument(std::string(what) + ": variable '" + v + "' appears in more than one group");
      }
    }
  }
}

void require_nonempty(const VarGroup& g, const char* what) {
  if (g.empty()) throw InvalidArgument(std::string(what) + ": empty variable group");
}

VarGroup concat(const std::vector<VarGroup>& groups) {
  VarGroup all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  return all;
}

// Union of the groups in the table's own variable order.
VarGroup union_in_table_order(const JointTable& t, const std::vector<VarGroup>& groups) {
  std::set<std::string> wanted;
  for (const auto& g : groups) {
    for (const auto& v : g) {
      (void)t.layout().index_of(v);
      wanted.insert(v);
    }
  }
  VarGroup out;
  for (const auto& name : t.var_names()) {
    if (wanted.count(name) != 0) out.push_back(name);
  }
  return out;
}

std::vector<double> marginal_probs(const JointTable& t, const std::vector<std::size_t>& proj,
                                   std::size_t n_out) {
  std::vector<double> out(n_out, 0.0);
  const auto p = t.probs();
  for (std::size_t s = 0; s < p.size(); ++s) out[proj[s]] += p[s];
  return out;
}

std::size_t states_of(const JointTable& t, const VarGroup& vars) {
  std::size_t n = 1;
  for (const auto& v : vars) n *= static_cast<std::size_t>(t.layout().arities()[t.layout().index_of(v)]);
  return n;
}

std::vector<double> build_cdf(std::span<const double> p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t sample_cdf(const std::vector<double>& cdf, double u) {
  // scale by the total so rounding in the last entry cannot overflow the range
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  auto idx = static_cast<std::size_t>(it - cdf.begin());
  if (idx >= cdf.size()) {
    // u * total rounded up to the total: take the last state with mass
    idx = cdf.size() - 1;
    while (idx > 0 && cdf[idx] == cdf[idx - 1]) --idx;
  }
  return idx;
}

}  // namespace

std::string_view to_string(IMode mode) noexcept {
  return mode == IMode::shared ? "shared" : "per_coordinate";
}

IMode parse_imode(std::string_view text) {
  if (text == "shared") return IMode::shared;
  if (text == "per_coordinate" || text == "per-coordinate") return IMode::per_coordinate;
  throw InvalidArgument("unknown i_mode '" + std::string(text) + "' (expected shared|per_coordinate)");
}

VarLayout::VarLayout(std::vector<std::string> names, std::vector<int> arities)
    : names_(std::move(names)), arities_(std::move(arities)) {
  if (names_.size() != arities_.size()) throw InvalidArgument("VarLayout: names/arities length mismatch");
  std::set<std::string> seen;
  strides_.resize(names_.size());
  num_states_ = 1;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!seen.insert(names_[i]).second) throw InvalidArgument("VarLayout: duplicate variable '" + names_[i] + "'");
    if (arities_[i] < 1) throw InvalidArgument("VarLayout: arity must be positive");
    strides_[i] = num_states_;
    num_states_ *= static_cast<std::size_t>(arities_[i]);
    if (num_states_ > JointTable::kMaxStates) {
      throw CapacityError("VarLayout: more than 2^15 joint states");
    }
  }
}

std::size_t VarLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw InvalidArgument("unknown variable '" + std::string(name) + "'");
}

std::vector<int> VarLayout::decode(std::size_t state) const {
  std::vector<int> d(names_.size());
  for (std::size_t v = 0; v < names_.size(); ++v) d[v] = digit(state, v);
  return d;
}

std::size_t VarLayout::encode(std::span<const int> digits) const {
  if (digits.size() != names_.size()) throw InvalidArgument("VarLayout::encode: wrong digit count");
  std::size_t s = 0;
  for (std::size_t v = 0; v < digits.size(); ++v) {
    if (digits[v] < 0 || digits[v] >= arities_[v]) throw InvalidArgument("VarLayout::encode: digit out of range");
    s += static_cast<std::size_t>(digits[v]) * strides_[v];
  }
  return s;
}

JointTable::JointTable(VarLayout layout, std::vector<double> probs)
    : layout_(std::move(layout)), probs_(std::move(probs)) {
  if (probs_.size() != layout_.num_states()) {
    throw InvalidArgument("JointTable: probability vector does not match the layout");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("JointTable: negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "JointTable: probabilities sum to " << sum;
    throw InvalidArgument(os.str());
  }
}

double JointTable::prob_of(std::initializer_list<std::pair<std::string_view, int>> assignment) const {
  std::vector<std::pair<std::size_t, int>> fixed;
  for (const auto& [name, value] : assignment) fixed.emplace_back(layout_.index_of(name), value);
  double total = 0.0;
  for (std::size_t s = 0; s < probs_.size(); ++s) {
    bool match = true;
    for (const auto& [v, value] : fixed) {
      if (layout_.digit(s, v) != value) {
        match = false;
        break;
      }
    }
    if (match) total += probs_[s];
  }
  return total;
}

std::vector<std::size_t> JointTable::projection(const VarGroup& vars) const {
  std::vector<std::size_t> idx;
  std::vector<std::size_t> sub_stride;
  std::size_t stride = 1;
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (!seen.insert(v).second) throw InvalidArgument("projection: duplicate variable '" + v + "'");
    const std::size_t i = layout_.index_of(v);
    idx.push_back(i);
    sub_stride.push_back(stride);
    stride *= static_cast<std::size_t>(layout_.arities()[i]);
  }
  std::vector<std::size_t> out(probs_.size(), 0);
  for (std::size_t s = 0; s < probs_.size(); ++s) {
    std::size_t m = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      m += static_cast<std::size_t>(layout_.digit(s, idx[k])) * sub_stride[k];
    }
    out[s] = m;
  }
  return out;
}

JointTable JointTable::marginal(const VarGroup& vars) const {
  std::vector<int> ar;
  for (const auto& v : vars) ar.push_back(layout_.arities()[layout_.index_of(v)]);
  VarLayout sub(vars, ar);
  const auto proj = projection(vars);
  return JointTable(std::move(sub), marginal_probs(*this, proj, sub.num_states()));
}

JointTable build_xor1d_table() { return build_synth_table(1.0, 1, IMode::shared); }

VarGroup modality_vars(char modality, int dims) {
  if (dims == 1) return {std::string(1, modality)};
  VarGroup g;
  for (int j = 1; j <= dims; ++j) g.push_back(std::string(1, modality) + std::to_string(j));
  return g;
}

JointTable build_synth_table(double p_hat, int dims, IMode mode) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw InvalidArgument("build_synth_table: p_hat must lie in [0, 1]");
  if (dims < 1) throw InvalidArgument("build_synth_table: dims must be >= 1");
  if (dims * 3 > 15) throw CapacityError("build_synth_table: dims * 3 exceeds 15 enumerable variables");

  std::vector<std::string> names;
  for (char m : {'a', 'b', 'c'}) {
    auto g = modality_vars(m, dims);
    names.insert(names.end(), g.begin(), g.end());
  }
  VarLayout layout(names, std::vector<int>(names.size(), 2));
  std::vector<double> probs(layout.num_states(), 0.0);

  const auto d = static_cast<unsigned>(dims);
  const std::size_t n_vec = std::size_t{1} << d;
  const double w_ab = 1.0 / static_cast<double>(n_vec * n_vec);
  auto index = [&](std::size_t a, std::size_t b, std::size_t c) { return a | (b << d) | (c << (2 * d)); };

  if (mode == IMode::shared) {
    for (std::size_t a = 0; a < n_vec; ++a) {
      for (std::size_t b = 0; b < n_vec; ++b) {
        probs[index(a, b, a ^ b)] += p_hat * w_ab;
        probs[index(a, b, a)] += (1.0 - p_hat) * w_ab;
      }
    }
  } else {
    for (std::size_t a = 0; a < n_vec; ++a) {
      for (std::size_t b = 0; b < n_vec; ++b) {
        for (std::size_t i = 0; i < n_vec; ++i) {
          double w = w_ab;
          for (unsigned j = 0; j < d; ++j) w *= ((i >> j) & 1U) ? p_hat : (1.0 - p_hat);
          // c_j = a_j ^ b_j where i_j = 1, a_j otherwise
          const std::size_t c = a ^ (b & i);
          probs[index(a, b, c)] += w;
        }
      }
    }
  }
  return JointTable(std::move(layout), std::move(probs));
}

JointTable build_independent_table(const std::vector<std::string>& names, const std::vector<double>& p_one) {
  if (names.size() != p_one.size()) throw InvalidArgument("build_independent_table: length mismatch");
  VarLayout layout(names, std::vector<int>(names.size(), 2));
  std::vector<double> probs(layout.num_states());
  for (std::size_t s = 0; s < probs.size(); ++s) {
    double w = 1.0;
    for (std::size_t v = 0; v < names.size(); ++v) w *= layout.digit(s, v) ? p_one[v] : 1.0 - p_one[v];
    probs[s] = w;
  }
  return JointTable(std::move(layout), std::move(probs));
}

double entropy(const JointTable& t, const VarGroup& vars) {
  require_nonempty(vars, "entropy");
  const auto proj = t.projection(vars);
  double h = 0.0;
  for (double p : marginal_probs(t, proj, states_of(t, vars))) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double conditional_mi(const JointTable& t, const VarGroup& x, const VarGroup& y, const VarGroup& z) {
  require_nonempty(x, "conditional_mi");
  require_nonempty(y, "conditional_mi");
  require_disjoint({x, y, z}, "conditional_mi");

  const VarGroup xz = concat({x, z});
  const VarGroup yz = concat({y, z});
  const VarGroup xyz = concat({x, y, z});
  const auto p_xz = marginal_probs(t, t.projection(xz), states_of(t, xz));
  const auto p_yz = marginal_probs(t, t.projection(yz), states_of(t, yz));
  const auto p_z = marginal_probs(t, t.projection(z), states_of(t, z));

  const JointTable joint = t.marginal(xyz);
  const auto to_xz = joint.projection(xz);
  const auto to_yz = joint.projection(yz);
  const auto to_z = joint.projection(z);
  double acc = 0.0;
  const auto p = joint.probs();
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] <= 0.0) continue;
    acc += p[s] * std::log((p[s] * p_z[to_z[s]]) / (p_xz[to_xz[s]] * p_yz[to_yz[s]]));
  }
  return acc;
}

double mutual_information(const JointTable& t, const VarGroup& x, const VarGroup& y) {
  return conditional_mi(t, x, y, {});
}

double total_correlation(const JointTable& t, const std::vector<VarGroup>& groups) {
  if (groups.empty()) throw InvalidArgument("total_correlation: no groups");
  for (const auto& g : groups) require_nonempty(g, "total_correlation");
  require_disjoint(groups, "total_correlation");

  const JointTable joint = t.marginal(concat(groups));
  std::vector<std::vector<std::size_t>> proj;
  std::vector<std::vector<double>> marg;
  for (const auto& g : groups) {
    proj.push_back(joint.projection(g));
    marg.push_back(marginal_probs(joint, proj.back(), states_of(joint, g)));
  }
  double acc = 0.0;
  const auto p = joint.probs();
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] <= 0.0) continue;
    double prod = 1.0;
    for (std::size_t m = 0; m < groups.size(); ++m) prod *= marg[m][proj[m][s]];
    acc += p[s] * std::log(p[s] / prod);
  }
  return acc;
}

InfoReport evaluate(const JointTable& t, InfoKind kind, std::vector<VarGroup> groups) {
  double value = 0.0;
  switch (kind) {
    case InfoKind::entropy:
      if (groups.size() != 1) throw InvalidArgument("entropy takes one group");
      value = entropy(t, groups[0]);
      break;
    case InfoKind::mi:
      if (groups.size() != 2) throw InvalidArgument("mutual information takes two groups");
      value = mutual_information(t, groups[0], groups[1]);
      break;
    case InfoKind::cmi:
      if (groups.size() != 3) throw InvalidArgument("conditional mutual information takes three groups");
      value = conditional_mi(t, groups[0], groups[1], groups[2]);
      break;
    case InfoKind::tc:
      value = total_correlation(t, groups);
      break;
  }
  return InfoReport{kind, std::move(groups), value};
}

TabularScorer optimal_scorer(const JointTable& t, const std::vector<VarGroup>& groups) {
  if (groups.size() < 2) throw InvalidArgument("optimal_scorer: need at least two groups");
  for (const auto& g : groups) require_nonempty(g, "optimal_scorer");
  require_disjoint(groups, "optimal_scorer");

  const JointTable joint = t.marginal(union_in_table_order(t, groups));
  std::vector<std::vector<std::size_t>> proj;
  std::vector<std::vector<double>> marg;
  for (const auto& g : groups) {
    proj.push_back(joint.projection(g));
    marg.push_back(marginal_probs(joint, proj.back(), states_of(joint, g)));
  }
  TabularScorer out{joint.layout(), groups, std::vector<double>(joint.num_states())};
  const auto p = joint.probs();
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] <= 0.0) {
      out.scores[s] = TabularScorer::kExcluded;
      continue;
    }
    double prod = 1.0;
    for (std::size_t m = 0; m < groups.size(); ++m) prod *= marg[m][proj[m][s]];
    out.scores[s] = std::log(p[s] / prod);
  }
  return out;
}

ContrastiveSampler::ContrastiveSampler(const JointTable& t, const std::vector<VarGroup>& groups)
    : table_([&] {
        if (groups.size() < 2) throw InvalidArgument("ContrastiveSampler: need at least two groups");
        for (const auto& g : groups) require_nonempty(g, "ContrastiveSampler");
        require_disjoint(groups, "ContrastiveSampler");
        return t.marginal(union_in_table_order(t, groups));
      }()) {
  joint_cdf_ = build_cdf(table_.probs());
  const auto& layout = table_.layout();
  for (const auto& g : groups) {
    const auto proj = table_.projection(g);
    const std::size_t n_group = states_of(table_, g);
    const auto marg = marginal_probs(table_, proj, n_group);

    std::vector<std::size_t> vars;
    for (const auto& v : g) vars.push_back(layout.index_of(v));

    // partial index of every union state restricted to this group's variables
    std::vector<std::size_t> part(table_.num_states());
    std::vector<std::size_t> group_states(n_group, 0);
    for (std::size_t s = 0; s < table_.num_states(); ++s) {
      std::size_t pi = 0;
      for (auto v : vars) pi += static_cast<std::size_t>(layout.digit(s, v)) * layout.stride(v);
      part[s] = pi;
      group_states[proj[s]] = pi;
    }
    part_of_state_.push_back(std::move(part));
    group_states_.push_back(std::move(group_states));
    group_cdf_.push_back(build_cdf(marg));
  }
}

void ContrastiveSampler::draw(std::size_t anchor, std::size_t batch_size, Rng& rng,
                              std::vector<std::size_t>& states) const {
  if (anchor >= group_states_.size()) throw InvalidArgument("ContrastiveSampler: anchor out of range");
  states.assign(batch_size, 0);
  if (batch_size == 0) return;
  const std::size_t positive = sample_cdf(joint_cdf_, rng.uniform());
  states[0] = positive;
  const std::size_t anchor_part = part_of_state_[anchor][positive];
  for (std::size_t j = 1; j < batch_size; ++j) {
    std::size_t s = anchor_part;
    for (std::size_t m = 0; m < group_states_.size(); ++m) {
      if (m == anchor) continue;
      s += group_states_[m][sample_cdf(group_cdf_[m], rng.uniform())];
    }
    states[j] = s;
  }
}

BoundEstimate bound_value(const JointTable& t, const TabularScorer& g, std::size_t batch_size,
                          std::size_t mc_samples, std::uint64_t seed, std::size_t anchor) {
  if (batch_size < 1) throw InvalidArgument("bound_value: batch size must be >= 1");
  if (mc_samples < 1) throw InvalidArgument("bound_value: mc_samples must be >= 1");
  const ContrastiveSampler sampler(t, g.groups);
  if (!(sampler.layout() == g.layout) || g.scores.size() != g.layout.num_states()) {
    throw InvalidArgument("bound_value: scorer layout does not match the table");
  }

  const double log_n = std::log(static_cast<double>(batch_size));
  Rng rng = Rng(seed).substream("bound").substream(anchor);
  std::vector<std::size_t> states;
  std::vector<double> logits(batch_size);
  // Welford accumulation
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < mc_samples; ++k) {
    sampler.draw(anchor, batch_size, rng, states);
    for (std::size_t j = 0; j < batch_size; ++j) logits[j] = g.scores[states[j]];
    const double v = log_n + logits[0] - logsumexp(logits);
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const auto n = static_cast<double>(mc_samples);
  const double var = mc_samples > 1 ? m2 / (n - 1.0) : 0.0;
  return BoundEstimate{mean, std::sqrt(var / n)};
}

}  // namespace symile
