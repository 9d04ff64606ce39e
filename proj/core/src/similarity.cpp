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

#include "abacmine/similarity.hpp"

#include "abacmine/error.hpp"
#include "abacmine/semantics.hpp"

namespace abacmine {

double jaccard(const Bitset& a, const Bitset& b) {
  const std::size_t both = a.intersect_count(b);
  const std::size_t either = a.count() + b.count() - both;
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

double conjunct_similarity(const std::optional<Conjunct>& a, const std::optional<Conjunct>& b) {
  if (!a || !b) return !a && !b ? 1.0 : 0.0;
  return jaccard(*a, *b);
}

double expr_similarity(const AttrExpr& a, const AttrExpr& b) {
  if (a.size() != b.size()) throw SchemaError("attribute expressions over different schemas");
  if (a.size() == 0) return 1.0;
  double total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += conjunct_similarity(a.at(i), b.at(i));
  return total / static_cast<double>(a.size());
}

double rule_similarity(const Rule& a, const Rule& b) {
  return (expr_similarity(a.uae, b.uae) + expr_similarity(a.rae, b.rae) + jaccard(a.ops, b.ops) +
          jaccard(a.con, b.con)) /
         4.0;
}

double rule_set_similarity(std::span<const Rule> a, std::span<const Rule> b) {
  if (a.empty()) return b.empty() ? 1.0 : 0.0;
  double total = 0;
  for (const auto& r : a) {
    double best = 0;
    for (const auto& s : b) best = std::max(best, rule_similarity(r, s));
    total += best;
  }
  return total / static_cast<double>(a.size());
}

namespace {

void check_comparable(const Policy& a, const Policy& b) {
  if (!(a.universe->schema() == b.universe->schema()))
    throw SchemaError("policies use different attribute schemas");
  if (a.universe->operations() != b.universe->operations())
    throw SchemaError("policies use different operations");
}

void check_same_universe(const Policy& a, const Policy& b) {
  check_comparable(a, b);
  const AttributeData& x = a.universe->data();
  const AttributeData& y = b.universe->data();
  for (Side side : {Side::kUser, Side::kResource}) {
    if (x.count(side) != y.count(side)) throw SchemaError("policies use different entities");
    for (std::size_t e = 0; e < x.count(side); ++e)
      if (x.id(side, e) != y.id(side, e)) throw SchemaError("policies use different entities");
  }
}

}  // namespace

double syntactic_similarity(const Policy& a, const Policy& b) {
  check_comparable(a, b);
  return std::max(rule_set_similarity(a.rules, b.rules), rule_set_similarity(b.rules, a.rules));
}

double semantic_similarity(const Policy& a, const Policy& b) {
  check_same_universe(a, b);
  return jaccard(policy_meaning(*a.universe, a.rules), policy_meaning(*b.universe, b.rules));
}

AssignmentFractions assignment_fractions(const Policy& original, const Policy& mined) {
  check_same_universe(original, mined);
  const TupleSet m0 = policy_meaning(*original.universe, original.rules);
  const TupleSet m = policy_meaning(*mined.universe, mined.rules);
  const double n = static_cast<double>(m.count());
  if (n == 0) throw DataError("mined policy grants nothing");
  return {static_cast<double>(m.difference_count(m0)) / n,
          static_cast<double>(m0.difference_count(m)) / n};
}

SimilarityReport compare_policies(const Policy& original, const Policy& mined) {
  SimilarityReport r;
  r.syn_sim = syntactic_similarity(original, mined);
  r.sem_sim = semantic_similarity(original, mined);
  const auto f = assignment_fractions(original, mined);
  r.over_frac = f.over;
  r.under_frac = f.under;
  return r;
}

}  // namespace abacmine
