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

#include "abacmine/attributes.hpp"

#include <algorithm>
#include <set>

#include "abacmine/error.hpp"

namespace abacmine {

AtomSet canonical_atoms(AtomSet atoms) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

namespace {

std::vector<AttributeDef> build_side(std::vector<std::string> single,
                                     std::vector<std::string> multi, std::string_view id_name,
                                     const char* side_name) {
  std::set<std::string> seen;
  std::vector<AttributeDef> out;
  auto add = [&](std::string name, bool is_multi) {
    if (name.empty()) throw SchemaError(std::string("empty ") + side_name + " attribute name");
    if (!seen.insert(name).second) {
      if (name == id_name && !is_multi) return;
      throw SchemaError(std::string(side_name) + " attribute '" + name +
                        "' declared more than once");
    }
    out.push_back({std::move(name), is_multi});
  };
  add(std::string(id_name), false);
  for (auto& n : single) add(std::move(n), false);
  for (auto& n : multi) {
    if (n == id_name) throw SchemaError(std::string(id_name) + " must be single-valued");
    add(std::move(n), true);
  }
  std::sort(out.begin(), out.end(),
            [](const AttributeDef& a, const AttributeDef& b) { return a.name < b.name; });
  return out;
}

}  // namespace

Schema::Schema(std::vector<std::string> user_single, std::vector<std::string> user_multi,
               std::vector<std::string> res_single, std::vector<std::string> res_multi)
    : user_(build_side(std::move(user_single), std::move(user_multi), kUidAttr, "user")),
      res_(build_side(std::move(res_single), std::move(res_multi), kRidAttr, "resource")) {
  uid_ = *find(Side::kUser, kUidAttr);
  rid_ = *find(Side::kResource, kRidAttr);
}

std::optional<std::size_t> Schema::find(Side side, std::string_view name) const {
  const auto& attrs = attributes(side);
  auto it = std::lower_bound(attrs.begin(), attrs.end(), name,
                             [](const AttributeDef& a, std::string_view n) { return a.name < n; });
  if (it == attrs.end() || it->name != name) return std::nullopt;
  return static_cast<std::size_t>(it - attrs.begin());
}

std::size_t Schema::index(Side side, std::string_view name) const {
  if (auto i = find(side, name)) return *i;
  throw SchemaError(std::string("unknown ") + (side == Side::kUser ? "user" : "resource") +
                    " attribute '" + std::string(name) + "'");
}

namespace {

void fill_values(const Schema& schema, Side side, std::vector<Entity>& entities,
                 std::vector<std::string>& ids,
                 std::unordered_map<std::string, std::size_t>& pos,
                 std::vector<AttributeValue>& values) {
  std::sort(entities.begin(), entities.end(),
            [](const Entity& a, const Entity& b) { return a.id < b.id; });
  const std::size_t n_attr = schema.size(side);
  const std::size_t id_attr = schema.id_attribute(side);
  const char* kind = side == Side::kUser ? "user" : "resource";
  values.assign(entities.size() * n_attr, AttributeValue::bottom());
  for (std::size_t e = 0; e < entities.size(); ++e) {
    auto& ent = entities[e];
    if (ent.id.empty()) throw SchemaError(std::string("empty ") + kind + " id");
    if (!pos.emplace(ent.id, e).second)
      throw SchemaError(std::string("duplicate ") + kind + " id '" + ent.id + "'");
    ids.push_back(ent.id);
    for (auto& [name, v] : ent.attrs) {
      const std::size_t a = schema.index(side, name);
      if (a == id_attr) {
        if (!v.is_atom() || v.as_atom() != ent.id)
          throw SchemaError(std::string(kind) + " '" + ent.id + "': " + name +
                            " must equal the entity id");
        continue;
      }
      if (schema.is_multi(side, a) && v.is_atom())
        throw SchemaError(std::string(kind) + " '" + ent.id + "': attribute '" + name +
                          "' is multi-valued but has an atomic value");
      if (!schema.is_multi(side, a) && v.is_set())
        throw SchemaError(std::string(kind) + " '" + ent.id + "': attribute '" + name +
                          "' is single-valued but has a set value");
      values[e * n_attr + a] = std::move(v);
    }
    values[e * n_attr + id_attr] = AttributeValue::atom(ent.id);
  }
}

}  // namespace

AttributeData::AttributeData(Schema schema, std::vector<Entity> users,
                             std::vector<Entity> resources)
    : schema_(std::move(schema)) {
  fill_values(schema_, Side::kUser, users, users_, user_pos_, user_values_);
  fill_values(schema_, Side::kResource, resources, resources_, res_pos_, res_values_);
  build_index();
}

void AttributeData::build_index() {
  for (Side side : {Side::kUser, Side::kResource}) {
    const std::size_t n = count(side);
    auto& index = side == Side::kUser ? user_index_ : res_index_;
    auto& known = side == Side::kUser ? user_known_ : res_known_;
    index.assign(schema_.size(side), {});
    known.assign(schema_.size(side), EntitySet(n));
    for (std::size_t a = 0; a < schema_.size(side); ++a) {
      for (std::size_t e = 0; e < n; ++e) {
        const auto& v = value(side, e, a);
        if (v.is_bottom()) continue;
        known[a].set(e);
        auto mark = [&](const std::string& atom) {
          auto [it, inserted] = index[a].try_emplace(atom, n);
          it->second.set(e);
        };
        if (v.is_atom()) {
          mark(v.as_atom());
        } else {
          for (const auto& atom : v.as_set()) mark(atom);
        }
      }
    }
  }
  empty_users_ = EntitySet(users_.size());
  empty_res_ = EntitySet(resources_.size());
}

std::optional<std::size_t> AttributeData::find(Side side, std::string_view id) const {
  const auto& pos = side == Side::kUser ? user_pos_ : res_pos_;
  auto it = pos.find(std::string(id));
  if (it == pos.end()) return std::nullopt;
  return it->second;
}

std::size_t AttributeData::index(Side side, std::string_view id) const {
  if (auto e = find(side, id)) return *e;
  throw SchemaError(std::string("unknown ") + (side == Side::kUser ? "user" : "resource") +
                    " '" + std::string(id) + "'");
}

AtomSet AttributeData::vocabulary(Side side, std::size_t attr) const {
  const auto& index = side == Side::kUser ? user_index_ : res_index_;
  AtomSet out;
  out.reserve(index[attr].size());
  for (const auto& [atom, ents] : index[attr]) out.push_back(atom);
  std::sort(out.begin(), out.end());
  return out;
}

const EntitySet& AttributeData::entities_with(Side side, std::size_t attr,
                                              const std::string& atom) const {
  const auto& index = side == Side::kUser ? user_index_ : res_index_;
  auto it = index[attr].find(atom);
  if (it == index[attr].end()) return side == Side::kUser ? empty_users_ : empty_res_;
  return it->second;
}

Universe::Universe(AttributeData data, std::vector<std::string> operations)
    : data_(std::move(data)), ops_(canonical_atoms(std::move(operations))) {
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (ops_[i].empty()) throw SchemaError("empty operation name");
    op_pos_.emplace(ops_[i], i);
  }
}

std::optional<std::size_t> Universe::find_op(std::string_view name) const {
  auto it = op_pos_.find(std::string(name));
  if (it == op_pos_.end()) return std::nullopt;
  return it->second;
}

std::size_t Universe::op_index(std::string_view name) const {
  if (auto o = find_op(name)) return *o;
  throw SchemaError("unknown operation '" + std::string(name) + "'");
}

UPTuple Universe::tuple(std::string_view user, std::string_view resource,
                        std::string_view op) const {
  return {static_cast<std::uint32_t>(data_.index(Side::kUser, user)),
          static_cast<std::uint32_t>(data_.index(Side::kResource, resource)),
          static_cast<std::uint32_t>(op_index(op))};
}

std::string Universe::describe(const UPTuple& t) const {
  return data_.id(Side::kUser, t.user) + "," + data_.id(Side::kResource, t.resource) + "," +
         ops_[t.op];
}

}  // namespace abacmine
