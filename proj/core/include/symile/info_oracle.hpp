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
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symile {

using VarGroup = std::vector<std::string>;

/// How the hidden switch i of the synthetic process is shared across
/// coordinates: one draw per sample, or one draw per coordinate.
enum class IMode { shared, per_coordinate };

std::string_view to_string(IMode mode) noexcept;
IMode parse_imode(std::string_view text);

/// Names and cardinalities of a set of discrete variables together with the
/// mixed-radix state encoding (little-endian: the first variable varies
/// fastest).
class VarLayout {
 public:
  VarLayout() = default;
  VarLayout(std::vector<std::string> names, std::vector<int> arities);

  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] const std::vector<int>& arities() const noexcept { return arities_; }
  [[nodiscard]] std::size_t num_vars() const noexcept { return names_.size(); }
  [[nodiscard]] std::size_t num_states() const noexcept { return num_states_; }
  [[nodiscard]] std::size_t stride(std::size_t var) const noexcept { return strides_[var]; }

  /// Position of a variable; throws InvalidArgument for unknown names.
  [[nodiscard]] std::size_t index_of(std::string_view name) const;
  [[nodiscard]] std::vector<int> decode(std::size_t state) const;
  [[nodiscard]] std::size_t encode(std::span<const int> digits) const;
  [[nodiscard]] int digit(std::size_t state, std::size_t var) const noexcept {
    return static_cast<int>((state / strides_[var]) % static_cast<std::size_t>(arities_[var]));
  }

  friend bool operator==(const VarLayout&, const VarLayout&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<int> arities_;
  std::vector<std::size_t> strides_;
  std::size_t num_states_ = 1;
};

/// Exact joint probability table over a handful of discrete variables.
class JointTable {
 public:
  static constexpr std::size_t kMaxStates = std::size_t{1} << 15;

  /// Validates: probs sized to the layout, entries >= 0, sum within 1e-12 of 1.
  JointTable(VarLayout layout, std::vector<double> probs);

  [[nodiscard]] const VarLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const std::vector<std::string>& var_names() const noexcept { return layout_.names(); }
  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
  [[nodiscard]] std::size_t num_states() const noexcept { return probs_.size(); }
  [[nodiscard]] double prob(std::size_t state) const { return probs_.at(state); }

  /// Probability of a partial assignment, e.g. {{"a", 0}, {"c", 1}}.
  [[nodiscard]] double prob_of(std::initializer_list<std::pair<std::string_view, int>> assignment) const;

  /// Marginal over `vars`, laid out in the order given.
  [[nodiscard]] JointTable marginal(const VarGroup& vars) const;

  /// Map from each state of this table to its index in the marginal over `vars`.
  [[nodiscard]] std::vector<std::size_t> projection(const VarGroup& vars) const;

 private:
  VarLayout layout_;
  std::vector<double> probs_;
};

/// a, b fair bits, c = a XOR b.
JointTable build_xor1d_table();

/// Exact joint of (a_1..a_d, b_1..b_d, c_1..c_d) with a_j, b_j fair bits,
/// i ~ Bernoulli(p_hat) and c_j = (a_j XOR b_j)^i * a_j^(1-i). Variables are
/// named "a","b","c" when dims == 1 and "a1".."ad" etc. otherwise.
JointTable build_synth_table(double p_hat, int dims, IMode mode = IMode::shared);

/// Product of independent Bernoulli(p_k) bits named by `names`.
JointTable build_independent_table(const std::vector<std::string>& names,
                                   const std::vector<double>& p_one);

/// Variable names of one modality of a synth table ("a" -> {"a"} or {"a1",..,"a5"}).
VarGroup modality_vars(char modality, int dims);

double entropy(const JointTable& t, const VarGroup& vars);
double mutual_information(const JointTable& t, const VarGroup& x, const VarGroup& y);
double conditional_mi(const JointTable& t, const VarGroup& x, const VarGroup& y, const VarGroup& z);
double total_correlation(const JointTable& t, const std::vector<VarGroup>& groups);

enum class InfoKind { entropy, mi, cmi, tc };

struct InfoReport {
  InfoKind kind;
  std::vector<VarGroup> groups;
  double value;  // nats
};

/// Evaluates one quantity; `groups` holds 1 (entropy), 2 (mi), 3 (cmi: x, y, z)
/// or M (tc) variable groups.
InfoReport evaluate(const JointTable& t, InfoKind kind, std::vector<VarGroup> groups);

/// Convenience: value in bits.
inline double nats_to_bits(double nats) noexcept { return nats / 0.69314718055994530942; }

/// A score for every state of a layout. States are encoded like JointTable;
/// the groups record which variables make up each modality.
struct TabularScorer {
  static constexpr double kExcluded = -std::numeric_limits<double>::infinity();

  VarLayout layout;
  std::vector<VarGroup> groups;
  std::vector<double> scores;
};

/// g*(s) = log p(s) / prod_m p(s_m), with -inf on zero-mass states.
TabularScorer optimal_scorer(const JointTable& t, const std::vector<VarGroup>& groups);

class Rng;

/// Draws contrastive batches from an exact table: one positive tuple from the
/// joint and negatives whose non-anchor groups come independently from their
/// marginals while the anchor group is shared with the positive.
class ContrastiveSampler {
 public:
  /// `groups` must be disjoint; the sampler works on the marginal over their
  /// union, laid out in the table's variable order.
  ContrastiveSampler(const JointTable& t, const std::vector<VarGroup>& groups);

  [[nodiscard]] const VarLayout& layout() const noexcept { return table_.layout(); }
  [[nodiscard]] const JointTable& table() const noexcept { return table_; }
  [[nodiscard]] std::size_t num_groups() const noexcept { return group_states_.size(); }

  /// Fills `states` with batch_size joint states; states[0] is the positive.
  void draw(std::size_t anchor, std::size_t batch_size, Rng& rng,
            std::vector<std::size_t>& states) const;

 private:
  JointTable table_;
  std::vector<double> joint_cdf_;
  // per group: partial state index (in the union layout) of every group state
  std::vector<std::vector<std::size_t>> group_states_;
  std::vector<std::vector<double>> group_cdf_;
  // per group: partial index of each union state
  std::vector<std::vector<std::size_t>> part_of_state_;
};

struct BoundEstimate {
  double estimate;   // nats
  double std_error;  // nats
};

/// Monte-Carlo value of log N + E[log softmax_i g] under the contrastive
/// batch distribution: one positive tuple drawn from the joint and N-1
/// tuples whose non-anchor groups are drawn independently from their
/// marginals, all sharing the positive's anchor value.
BoundEstimate bound_value(const JointTable& t, const TabularScorer& g, std::size_t batch_size,
                          std::size_t mc_samples, std::uint64_t seed, std::size_t anchor = 0);

}  // namespace symile
