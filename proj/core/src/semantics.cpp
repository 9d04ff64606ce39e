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

#include "abacmine/semantics.hpp"

#include <algorithm>

#include "abacmine/error.hpp"

namespace abacmine {

namespace {

void check_size(const AttributeData& data, Side side, const AttrExpr& e) {
  if (e.size() != data.schema().size(side))
    throw SchemaError("attribute expression does not match the schema");
}

bool satisfies_expr(const AttributeData& data, Side side, std::size_t entity,
                    const AttrExpr& e) {
  check_size(data, side, e);
  const Schema& schema = data.schema();
  for (std::size_t a = 0; a < e.size(); ++a) {
    if (e.is_top(a)) continue;
    const AttributeValue& v = data.value(side, entity, a);
    if (v.is_bottom()) return false;
    const Conjunct& c = e.conjunct(a);
    bool ok = false;
    if (!schema.is_multi(side, a)) {
      ok = c.contains(AtomSet{v.as_atom()});
    } else if (side == Side::kUser) {
      const AtomSet& have = v.as_set();
      ok = std::any_of(c.begin(), c.end(), [&](const AtomSet& want) {
        return std::includes(have.begin(), have.end(), want.begin(), want.end());
      });
    } else {
      ok = c.contains(v.as_set());
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool satisfies_uae(const AttributeData& data, std::size_t user, const AttrExpr& e) {
  return satisfies_expr(data, Side::kUser, user, e);
}

bool satisfies_rae(const AttributeData& data, std::size_t resource, const AttrExpr& e) {
  return satisfies_expr(data, Side::kResource, resource, e);
}

bool satisfies_atomic(const AttributeData& data, std::size_t user, std::size_t resource,
                      const AtomicConstraint& c) {
  const AttributeValue& uv = data.value(Side::kUser, user, c.user_attr);
  const AttributeValue& rv = data.value(Side::kResource, resource, c.res_attr);
  if (uv.is_bottom() || rv.is_bottom()) return false;
  switch (c.kind) {
    case AtomicConstraint::Kind::kSupersetEq:
      return std::includes(uv.as_set().begin(), uv.as_set().end(), rv.as_set().begin(),
                           rv.as_set().end());
    case AtomicConstraint::Kind::kContains:
      return std::binary_search(uv.as_set().begin(), uv.as_set().end(), rv.as_atom());
    case AtomicConstraint::Kind::kEqual:
      return uv.as_atom() == rv.as_atom();
  }
  return false;
}

bool satisfies_constraint(const AttributeData& data, std::size_t user, std::size_t resource,
                          const Constraint& con) {
  for (const auto& c : con)
    if (!satisfies_atomic(data, user, resource, c)) return false;
  return true;
}

bool satisfies_rule(const Universe& universe, const UPTuple& t, const Rule& rule) {
  const AttributeData& data = universe.data();
  return rule.ops.contains(t.op) && satisfies_uae(data, t.user, rule.uae) &&
         satisfies_rae(data, t.resource, rule.rae) &&
         satisfies_constraint(data, t.user, t.resource, rule.con);
}

EntitySet expr_meaning(const AttributeData& data, Side side, const AttrExpr& e) {
  check_size(data, side, e);
  const std::size_t n = data.count(side);
  EntitySet result = EntitySet::full(n);
  const Schema& schema = data.schema();
  for (std::size_t a = 0; a < e.size() && result.any(); ++a) {
    if (e.is_top(a)) continue;
    const bool multi = schema.is_multi(side, a);
    EntitySet allowed(n);
    for (const AtomSet& elem : e.conjunct(a)) {
      // Entities holding every atom of the element.
      EntitySet with = data.entities_known(side, a);
      for (const auto& atom : elem) with &= data.entities_with(side, a, atom);
      if (multi && side == Side::kResource) {
        // Equality: containing every atom is necessary; sizes must match too.
        with.for_each([&](std::size_t ent) {
          if (data.value(side, ent, a).as_set().size() != elem.size()) with.reset(ent);
        });
      }
      allowed |= with;
    }
    result &= allowed;
  }
  return result;
}

Bitset pair_meaning(const AttributeData& data, const AttrExpr& uae, const AttrExpr& rae,
                    const Constraint& con) {
  const std::size_t nr = data.resource_count();
  Bitset pairs(data.user_count() * nr);
  const EntitySet users = expr_meaning(data, Side::kUser, uae);
  if (users.none()) return pairs;
  EntitySet resources = expr_meaning(data, Side::kResource, rae);
  for (const auto& c : con) resources &= data.entities_known(Side::kResource, c.res_attr);
  if (resources.none()) return pairs;
  const std::vector<std::size_t> res_list = resources.indices();
  users.for_each([&](std::size_t u) {
    for (const auto& c : con)
      if (data.value(Side::kUser, u, c.user_attr).is_bottom()) return;
    for (std::size_t r : res_list) {
      if (satisfies_constraint(data, u, r, con)) pairs.set(u * nr + r);
    }
  });
  return pairs;
}

TupleSet rule_meaning(const Universe& universe, const Rule& rule) {
  TupleSet out = universe.empty_set();
  if (rule.ops.empty()) return out;
  const std::size_t nop = universe.op_count();
  const Bitset pairs = pair_meaning(universe.data(), rule.uae, rule.rae, rule.con);
  pairs.for_each([&](std::size_t ur) {
    for (auto o : rule.ops) out.set(ur * nop + o);
  });
  return out;
}

TupleSet rule_meaning_bruteforce(const Universe& universe, const Rule& rule) {
  TupleSet out = universe.empty_set();
  for (std::size_t i = 0; i < universe.tuple_count(); ++i)
    if (satisfies_rule(universe, universe.tuple(i), rule)) out.set(i);
  return out;
}

TupleSet policy_meaning(const Universe& universe, std::span<const Rule> rules) {
  TupleSet out = universe.empty_set();
  for (const auto& r : rules) out |= rule_meaning(universe, r);
  return out;
}

const TupleSet& MeaningCache::get(const Rule& rule) {
  auto it = cache_.find(rule);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(rule, rule_meaning(*universe_, rule)).first->second;
}

void MeaningCache::trim() {
  if (cache_.size() >= capacity_) cache_.clear();
}

TupleSet MeaningCache::policy(std::span<const Rule> rules) {
  TupleSet out = universe_->empty_set();
  for (const auto& r : rules) out |= get(r);
  return out;
}

}  // namespace abacmine
