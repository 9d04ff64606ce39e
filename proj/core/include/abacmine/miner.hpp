// Copyright 2026 The abacmine Authors.
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

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "abacmine/attributes.hpp"
#include "abacmine/log.hpp"
#include "abacmine/policy.hpp"
#include "abacmine/quality.hpp"
#include "abacmine/semantics.hpp"

namespace abacmine {

enum class RuleMetric : std::uint8_t { kQrul, kQrulFreq, kQrulIlp };
enum class NoiseMetric : std::uint8_t { kQrulFreq, kQfreq };

struct NoiseConfig {
  NoiseMetric metric = NoiseMetric::kQrulFreq;
  double tau = 0.0;
};

struct TaggedAttribute {
  Side side = Side::kUser;
  std::size_t attr = 0;
  friend auto operator<=>(const TaggedAttribute&, const TaggedAttribute&) = default;
};

struct MiningConfig {
  QualityConfig quality;
  RuleMetric metric = RuleMetric::kQrul;
  /// Attributes whose conjuncts elimConjuncts must keep.
  std::set<TaggedAttribute> unremovable;
  std::optional<NoiseConfig> noise;
  /// Off selects the uncached reference path; results must be identical.
  bool cache_meanings = true;
};

/// One greedy selection step: the rule moved into the final policy, its
/// score, and the UP0 tuples that were still uncovered when it was chosen.
struct SelectionStep {
  Rule rule;
  double score = 0.0;
  TupleSet uncovered_before;
};

struct NoiseReport {
  std::vector<Rule> kept;
  std::vector<Rule> dropped;
  /// UP0 tuples covered only by dropped rules, in tuple order.
  std::vector<UPTuple> suspected;
};

struct MiningResult {
  std::vector<Rule> rules;
  std::vector<SelectionStep> selection;
  std::optional<NoiseReport> noise;
};

/// Every well-typed atomic constraint that holds between the user and the
/// resource, ordered by form then attribute names.
std::vector<AtomicConstraint> candidate_constraint(const AttributeData& data, std::size_t resource,
                                                   std::size_t user);

/// Drops every set in a multi-valued user conjunct that is a strict
/// superset of another set in the same conjunct.
void elim_redundant_sets(const Schema& schema, AttrExpr& uae);

/// Characterizes a non-empty set of users (resources): one conjunct per
/// attribute known for all members, holding the union of their values;
/// uid (rid) is added only when that does not pin down the set exactly.
AttrExpr compute_uae(const AttributeData& data, const EntitySet& users);
AttrExpr compute_rae(const AttributeData& data, const EntitySet& resources);

/// Component-wise union; a top conjunct absorbs the other side.
AttrExpr expr_union(const AttrExpr& a, const AttrExpr& b);
/// ⟨uae1 ∪ uae2, rae1 ∪ rae2, ops1 ∪ ops2, con1⟩.
Rule merge_pair(const Rule& a, const Rule& b);

/// WSC of the largest conjunct; 0 for an all-top expression.
double max_conjunct_size(const AttrExpr& e);

/// Rule with the conjunct for the tagged attribute set to top.
Rule elim_attribute(const Rule& rule, const TaggedAttribute& ta);

/// A mining session over one universe and log summary. Owns a meaning
/// cache; not thread-safe.
class Miner {
 public:
  enum class MergeGuard : std::uint8_t {
    /// Merged rule must not grant tuples outside UP0.
    kValid,
    /// Merged rule must not grant tuples outside the current policy meaning.
    kPreserveMeaning,
  };

  /// Throws DataError on an empty summary.
  Miner(std::shared_ptr<const Universe> universe, LogSummary summary, MiningConfig cfg);

  const Universe& universe() const { return *universe_; }
  const MiningConfig& config() const { return cfg_; }
  const TupleSet& up0() const { return up0_; }
  const FrequencyTable& frequencies() const { return freq_; }

  TupleSet meaning(const Rule& rule);
  TupleSet meaning(std::span<const Rule> rules);
  bool valid(const Rule& rule) { return meaning(rule).is_subset_of(up0_); }

  double policy_quality(std::span<const Rule> rules);

  /// The configured rule metric when extending a rule set: `up` is the
  /// covered-set argument and `context` the rules chosen so far (used by
  /// the compression metric only).
  double extension_quality(const Rule& rule, const TupleSet& up, std::span<const Rule> context);

  /// Seed loop: returns candidate rules covering UP0.
  std::vector<Rule> generate_candidates();

  /// Builds ⟨computeUAE(su), computeRAE(sr), so, ∅⟩, generalizes it, adds
  /// it to `rules` (unless an identical rule is already there) and removes
  /// its meaning from `uncov`. Returns the added rule.
  Rule add_cand_rule(const EntitySet& su, const EntitySet& sr, std::set<std::uint32_t> so,
                     std::span<const AtomicConstraint> cc, TupleSet& uncov,
                     std::vector<Rule>& rules);

  Rule generalize_rule(const Rule& rule, std::span<const AtomicConstraint> cc,
                       const TupleSet& uncov, std::span<const Rule> rules);

  /// Redundancy removal followed by pairwise merging. Returns true if any
  /// merge was accepted.
  bool merge_rules(std::vector<Rule>& rules, MergeGuard guard = MergeGuard::kValid);

  bool simplify_rules(std::vector<Rule>& rules);
  bool elim_conjuncts(std::vector<Rule>& rules, std::size_t i);
  bool elim_elements(Rule& rule);
  bool elim_constraints(std::vector<Rule>& rules, std::size_t i);
  /// These may empty out rule i; dead rules are flagged in `alive`.
  bool elim_overlap_val(std::vector<Rule>& rules, std::vector<bool>& alive, std::size_t i);
  bool elim_overlap_op(std::vector<Rule>& rules, std::vector<bool>& alive, std::size_t i);

  /// Greedy selection. Throws InternalError if the candidates do not
  /// cover UP0.
  std::vector<SelectionStep> select_final_rules(std::vector<Rule> candidates);

  NoiseReport detect_noise(std::span<const SelectionStep> selection, const NoiseConfig& noise);

  /// The whole pipeline.
  MiningResult mine();

 private:
  double modification_quality(const Rule& rule, std::span<const Rule> rules, std::size_t i,
                              const TupleSet& others);
  Rule elim_conjuncts_helper(const Rule& rule, std::vector<TaggedAttribute> attrs,
                             std::span<const Rule> rules, std::size_t i, const TupleSet& others);
  Rule elim_constraints_helper(const Rule& rule, std::vector<AtomicConstraint> atoms,
                               std::span<const Rule> rules, std::size_t i,
                               const TupleSet& others);
  Rule generalize(const Rule& rule, std::span<const AtomicConstraint> cc, const TupleSet& uncov,
                  const TupleSet& covered);
  double seed_quality(const Rule& rule, const TupleSet& uncov, const TupleSet& covered);
  const Bitset& constraint_pairs(const AtomicConstraint& c);
  double seed_quality(const TupleSet& meaning, double rule_wsc, const TupleSet& uncov,
                      const TupleSet& covered);
  void remove_redundant(std::vector<Rule>& rules, MergeGuard guard);

  std::shared_ptr<const Universe> universe_;
  LogSummary summary_;
  MiningConfig cfg_;
  TupleSet up0_;
  FrequencyTable freq_;
  MeaningCache cache_;
  /// (user, resource) pairs satisfying each atomic constraint, filled lazily.
  std::map<AtomicConstraint, Bitset> constraint_pairs_;
};

MiningResult mine_policy(std::shared_ptr<const Universe> universe, const LogSummary& summary,
                         const MiningConfig& cfg);

}  // namespace abacmine
