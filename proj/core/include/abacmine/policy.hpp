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
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "abacmine/attributes.hpp"

namespace abacmine {

/// The value set of one conjunct. Every element is an AtomSet: for a
/// single-valued attribute each element is a singleton {v}; for a
/// multi-valued attribute each element is a set of atoms. Never empty.
using Conjunct = std::set<AtomSet>;

/// Conjunct for a single-valued attribute: a in {values...}.
Conjunct atoms_conjunct(std::initializer_list<std::string> values);
Conjunct atoms_conjunct(const std::vector<std::string>& values);

/// A user- or resource-attribute expression: one optional conjunct per
/// schema attribute on that side; nullopt means top (unconstrained).
class AttrExpr {
 public:
  AttrExpr() = default;
  explicit AttrExpr(std::size_t attribute_count) : conj_(attribute_count) {}

  std::size_t size() const { return conj_.size(); }
  bool is_top(std::size_t a) const { return !conj_[a].has_value(); }
  const Conjunct& conjunct(std::size_t a) const { return *conj_[a]; }
  const std::optional<Conjunct>& at(std::size_t a) const { return conj_[a]; }

  /// Throws std::invalid_argument on an empty conjunct.
  void set(std::size_t a, Conjunct c);
  void set_top(std::size_t a) { conj_[a].reset(); }

  /// Attributes with a non-top conjunct, ascending.
  std::vector<std::size_t> used() const;
  bool all_top() const;

  friend bool operator==(const AttrExpr&, const AttrExpr&) = default;
  friend bool operator<(const AttrExpr& a, const AttrExpr& b) { return a.conj_ < b.conj_; }

 private:
  std::vector<std::optional<Conjunct>> conj_;
};

/// a_u,m supseteq a_r,m | a_u,m contains a_r,1 | a_u,1 = a_r,1
struct AtomicConstraint {
  enum class Kind : std::uint8_t { kSupersetEq, kContains, kEqual };
  Kind kind = Kind::kEqual;
  std::size_t user_attr = 0;
  std::size_t res_attr = 0;

  friend auto operator<=>(const AtomicConstraint&, const AtomicConstraint&) = default;
};

using Constraint = std::set<AtomicConstraint>;

/// Throws SchemaError if the attribute kinds do not match the constraint form.
void check_constraint(const Schema& schema, const AtomicConstraint& c);

struct Rule {
  AttrExpr uae;
  AttrExpr rae;
  std::set<std::uint32_t> ops;
  Constraint con;

  friend bool operator==(const Rule&, const Rule&) = default;
  friend bool operator<(const Rule& a, const Rule& b) {
    if (!(a.uae == b.uae)) return a.uae < b.uae;
    if (!(a.rae == b.rae)) return a.rae < b.rae;
    if (a.ops != b.ops) return a.ops < b.ops;
    return a.con < b.con;
  }
};

/// ⟨all-top, all-top, ops, ∅⟩ sized for the schema.
Rule make_rule(const Schema& schema, std::set<std::uint32_t> ops = {});

/// Throws SchemaError if the rule does not fit the universe (sizes, op
/// indices, constraint kinds) or has no operations.
void validate_rule(const Universe& universe, const Rule& rule);

struct RuleHash {
  std::size_t operator()(const Rule& r) const;
};

/// Weights of uae, rae, ops and constraint in the structural complexity.
struct WscWeights {
  double w1 = 1.0;
  double w2 = 1.0;
  double w3 = 1.0;
  double w4 = 1.0;
};

/// Number of atomic values appearing in the expression.
double wsc(const AttrExpr& e);
double wsc(const Rule& r, const WscWeights& w);
double wsc(std::span<const Rule> rules, const WscWeights& w);

/// A universe together with a rule set.
struct Policy {
  std::shared_ptr<const Universe> universe;
  std::vector<Rule> rules;
};

}  // namespace abacmine
