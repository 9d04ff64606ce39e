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

#include <cstddef>
#include <span>
#include <unordered_map>

#include "abacmine/attributes.hpp"
#include "abacmine/bitset.hpp"
#include "abacmine/policy.hpp"

namespace abacmine {

// Satisfaction. A bottom value satisfies only top conjuncts and fails
// every atomic constraint. Multi-valued user conjuncts use superset
// semantics; multi-valued resource conjuncts use set equality.

bool satisfies_uae(const AttributeData& data, std::size_t user, const AttrExpr& e);
bool satisfies_rae(const AttributeData& data, std::size_t resource, const AttrExpr& e);
bool satisfies_atomic(const AttributeData& data, std::size_t user, std::size_t resource,
                      const AtomicConstraint& c);
bool satisfies_constraint(const AttributeData& data, std::size_t user, std::size_t resource,
                          const Constraint& con);
bool satisfies_rule(const Universe& universe, const UPTuple& t, const Rule& rule);

/// Entities satisfying the expression, computed through the attribute index.
EntitySet expr_meaning(const AttributeData& data, Side side, const AttrExpr& e);

/// (user, resource) pairs satisfying uae, rae and con, as a bitset over
/// U x R numbered u * |R| + r.
Bitset pair_meaning(const AttributeData& data, const AttrExpr& uae, const AttrExpr& rae,
                    const Constraint& con);

/// Tuples granted by the rule (indexed evaluation).
TupleSet rule_meaning(const Universe& universe, const Rule& rule);

/// Reference evaluation by filtering U x R x Op with satisfies_rule.
TupleSet rule_meaning_bruteforce(const Universe& universe, const Rule& rule);

TupleSet policy_meaning(const Universe& universe, std::span<const Rule> rules);

/// Memoizes rule meanings for one universe. Not thread-safe; each mining
/// session owns one. Entries are keyed by rule value, so a mutated rule
/// simply misses the cache.
class MeaningCache {
 public:
  explicit MeaningCache(const Universe& universe, std::size_t capacity = 200000)
      : universe_(&universe), capacity_(capacity) {}

  /// The returned reference stays valid until trim() or clear().
  const TupleSet& get(const Rule& rule);
  /// Drops every entry once the cache holds `capacity` rules. Call only
  /// where no references from get() are live.
  void trim();
  TupleSet policy(std::span<const Rule> rules);

  const Universe& universe() const { return *universe_; }
  std::size_t size() const { return cache_.size(); }
  void clear() { cache_.clear(); }

 private:
  const Universe* universe_;
  std::size_t capacity_;
  std::unordered_map<Rule, TupleSet, RuleHash> cache_;
};

}  // namespace abacmine
