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

#include "abacmine/policy.hpp"

#include <functional>
#include <stdexcept>

#include "abacmine/error.hpp"

namespace abacmine {

Conjunct atoms_conjunct(std::initializer_list<std::string> values) {
  Conjunct c;
  for (const auto& v : values) c.insert(AtomSet{v});
  return c;
}

Conjunct atoms_conjunct(const std::vector<std::string>& values) {
  Conjunct c;
  for (const auto& v : values) c.insert(AtomSet{v});
  return c;
}

void AttrExpr::set(std::size_t a, Conjunct c) {
  if (c.empty()) throw std::invalid_argument("empty conjunct");
  conj_[a] = std::move(c);
}

std::vector<std::size_t> AttrExpr::used() const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < conj_.size(); ++a)
    if (conj_[a]) out.push_back(a);
  return out;
}

bool AttrExpr::all_top() const {
  for (const auto& c : conj_)
    if (c) return false;
  return true;
}

void check_constraint(const Schema& schema, const AtomicConstraint& c) {
  if (c.user_attr >= schema.size(Side::kUser) || c.res_attr >= schema.size(Side::kResource))
    throw SchemaError("constraint attribute index out of range");
  const bool um = schema.is_multi(Side::kUser, c.user_attr);
  const bool rm = schema.is_multi(Side::kResource, c.res_attr);
  bool ok = false;
  switch (c.kind) {
    case AtomicConstraint::Kind::kSupersetEq: ok = um && rm; break;
    case AtomicConstraint::Kind::kContains: ok = um && !rm; break;
    case AtomicConstraint::Kind::kEqual: ok = !um && !rm; break;
  }
  if (!ok)
    throw SchemaError("constraint on '" + schema.attribute(Side::kUser, c.user_attr).name +
                      "' and '" + schema.attribute(Side::kResource, c.res_attr).name +
                      "' does not match the attribute kinds");
}

Rule make_rule(const Schema& schema, std::set<std::uint32_t> ops) {
  Rule r;
  r.uae = AttrExpr(schema.size(Side::kUser));
  r.rae = AttrExpr(schema.size(Side::kResource));
  r.ops = std::move(ops);
  return r;
}

void validate_rule(const Universe& universe, const Rule& rule) {
  const Schema& schema = universe.schema();
  if (rule.uae.size() != schema.size(Side::kUser) ||
      rule.rae.size() != schema.size(Side::kResource))
    throw SchemaError("attribute expression does not match the schema");
  if (rule.ops.empty()) throw SchemaError("rule has no operations");
  for (auto o : rule.ops)
    if (o >= universe.op_count()) throw SchemaError("operation index out of range");
  for (const auto& c : rule.con) check_constraint(schema, c);
  for (Side side : {Side::kUser, Side::kResource}) {
    const AttrExpr& e = side == Side::kUser ? rule.uae : rule.rae;
    for (auto a : e.used()) {
      const bool multi = schema.is_multi(side, a);
      for (const auto& elem : e.conjunct(a)) {
        if (!multi && elem.size() != 1)
          throw SchemaError("conjunct for single-valued attribute '" +
                            schema.attribute(side, a).name + "' must list atoms");
      }
    }
  }
}

namespace {

void mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }

void hash_expr(std::size_t& h, const AttrExpr& e) {
  std::hash<std::string> hs;
  for (std::size_t a = 0; a < e.size(); ++a) {
    if (e.is_top(a)) continue;
    mix(h, a + 1);
    for (const auto& elem : e.conjunct(a)) {
      mix(h, elem.size());
      for (const auto& atom : elem) mix(h, hs(atom));
    }
  }
}

}  // namespace

std::size_t RuleHash::operator()(const Rule& r) const {
  std::size_t h = 0;
  hash_expr(h, r.uae);
  mix(h, 0xabcdef);
  hash_expr(h, r.rae);
  for (auto o : r.ops) mix(h, o + 17);
  for (const auto& c : r.con) {
    mix(h, static_cast<std::size_t>(c.kind));
    mix(h, c.user_attr);
    mix(h, c.res_attr);
  }
  return h;
}

double wsc(const AttrExpr& e) {
  double n = 0;
  for (std::size_t a = 0; a < e.size(); ++a) {
    if (e.is_top(a)) continue;
    for (const auto& elem : e.conjunct(a)) n += static_cast<double>(elem.size());
  }
  return n;
}

double wsc(const Rule& r, const WscWeights& w) {
  return w.w1 * wsc(r.uae) + w.w2 * wsc(r.rae) + w.w3 * static_cast<double>(r.ops.size()) +
         w.w4 * static_cast<double>(r.con.size());
}

double wsc(std::span<const Rule> rules, const WscWeights& w) {
  double n = 0;
  for (const auto& r : rules) n += wsc(r, w);
  return n;
}

}  // namespace abacmine
