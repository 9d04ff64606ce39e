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
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "abacmine/bitset.hpp"

namespace abacmine {

enum class Side : std::uint8_t { kUser, kResource };

inline constexpr std::string_view kUidAttr = "uid";
inline constexpr std::string_view kRidAttr = "rid";

/// A sorted, duplicate-free set of atomic values.
using AtomSet = std::vector<std::string>;

/// Sorts and deduplicates in place; returns the canonical set.
AtomSet canonical_atoms(AtomSet atoms);

struct AttributeDef {
  std::string name;
  bool multi = false;
};

/// User and resource attribute names, each partitioned into single- and
/// multi-valued attributes. Attributes are stored sorted by name, so the
/// attribute index order is also the canonical printing order. "uid" and
/// "rid" are always present as single-valued attributes.
class Schema {
 public:
  Schema() : Schema({}, {}, {}, {}) {}
  Schema(std::vector<std::string> user_single, std::vector<std::string> user_multi,
         std::vector<std::string> res_single, std::vector<std::string> res_multi);

  const std::vector<AttributeDef>& attributes(Side side) const {
    return side == Side::kUser ? user_ : res_;
  }
  std::size_t size(Side side) const { return attributes(side).size(); }
  const AttributeDef& attribute(Side side, std::size_t i) const {
    return attributes(side)[i];
  }
  bool is_multi(Side side, std::size_t i) const { return attribute(side, i).multi; }

  std::optional<std::size_t> find(Side side, std::string_view name) const;
  /// Throws SchemaError for unknown names.
  std::size_t index(Side side, std::string_view name) const;

  /// Index of uid (user side) or rid (resource side).
  std::size_t id_attribute(Side side) const {
    return side == Side::kUser ? uid_ : rid_;
  }

  friend bool operator==(const Schema& a, const Schema& b) {
    auto same = [](const std::vector<AttributeDef>& x, const std::vector<AttributeDef>& y) {
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i].name != y[i].name || x[i].multi != y[i].multi) return false;
      return true;
    };
    return same(a.user_, b.user_) && same(a.res_, b.res_);
  }

 private:
  std::vector<AttributeDef> user_;
  std::vector<AttributeDef> res_;
  std::size_t uid_ = 0;
  std::size_t rid_ = 0;
};

/// An attribute value: an atom, a set of atoms, or bottom (unknown).
class AttributeValue {
 public:
  AttributeValue() = default;  // bottom
  static AttributeValue bottom() { return {}; }
  static AttributeValue atom(std::string v) {
    AttributeValue a;
    a.v_ = std::move(v);
    return a;
  }
  static AttributeValue set(AtomSet atoms) {
    AttributeValue a;
    a.v_ = canonical_atoms(std::move(atoms));
    return a;
  }

  bool is_bottom() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_atom() const { return std::holds_alternative<std::string>(v_); }
  bool is_set() const { return std::holds_alternative<AtomSet>(v_); }

  const std::string& as_atom() const { return std::get<std::string>(v_); }
  const AtomSet& as_set() const { return std::get<AtomSet>(v_); }

  friend bool operator==(const AttributeValue&, const AttributeValue&) = default;

 private:
  std::variant<std::monostate, std::string, AtomSet> v_;
};

/// One user or resource as supplied by callers. Missing attributes are bottom.
struct Entity {
  std::string id;
  std::map<std::string, AttributeValue> attrs;
};

/// Attribute data for users and resources. Entities are sorted by id and
/// addressed by dense index; uid/rid values are set from the ids.
class AttributeData {
 public:
  AttributeData() = default;
  AttributeData(Schema schema, std::vector<Entity> users, std::vector<Entity> resources);

  const Schema& schema() const { return schema_; }

  std::size_t count(Side side) const {
    return side == Side::kUser ? users_.size() : resources_.size();
  }
  std::size_t user_count() const { return users_.size(); }
  std::size_t resource_count() const { return resources_.size(); }

  const std::string& id(Side side, std::size_t e) const {
    return side == Side::kUser ? users_[e] : resources_[e];
  }
  std::optional<std::size_t> find(Side side, std::string_view id) const;
  /// Throws SchemaError for unknown ids.
  std::size_t index(Side side, std::string_view id) const;

  const AttributeValue& value(Side side, std::size_t entity, std::size_t attr) const {
    const auto& table = side == Side::kUser ? user_values_ : res_values_;
    return table[entity * schema_.size(side) + attr];
  }

  /// Every atom occurring in values of the attribute, sorted.
  AtomSet vocabulary(Side side, std::size_t attr) const;

  /// Entities whose value for `attr` is `atom` (single-valued) or contains
  /// `atom` (multi-valued). Empty set if the atom never occurs.
  const EntitySet& entities_with(Side side, std::size_t attr, const std::string& atom) const;
  /// Entities whose value for `attr` is not bottom.
  const EntitySet& entities_known(Side side, std::size_t attr) const {
    return (side == Side::kUser ? user_known_ : res_known_)[attr];
  }

 private:
  void build_index();

  Schema schema_;
  std::vector<std::string> users_;
  std::vector<std::string> resources_;
  std::unordered_map<std::string, std::size_t> user_pos_;
  std::unordered_map<std::string, std::size_t> res_pos_;
  std::vector<AttributeValue> user_values_;
  std::vector<AttributeValue> res_values_;
  // attribute -> atom -> entities
  std::vector<std::unordered_map<std::string, EntitySet>> user_index_;
  std::vector<std::unordered_map<std::string, EntitySet>> res_index_;
  std::vector<EntitySet> user_known_;
  std::vector<EntitySet> res_known_;
  EntitySet empty_users_;
  EntitySet empty_res_;
};

/// A user-permission tuple by dense indices into a Universe.
struct UPTuple {
  std::uint32_t user = 0;
  std::uint32_t resource = 0;
  std::uint32_t op = 0;
  friend auto operator<=>(const UPTuple&, const UPTuple&) = default;
};

/// Users, resources, attribute data and operations: everything about a
/// policy except its rules. Tuples are numbered (u * |R| + r) * |Op| + o.
class Universe {
 public:
  Universe() = default;
  Universe(AttributeData data, std::vector<std::string> operations);

  const AttributeData& data() const { return data_; }
  const Schema& schema() const { return data_.schema(); }

  const std::vector<std::string>& operations() const { return ops_; }
  std::size_t op_count() const { return ops_.size(); }
  std::optional<std::size_t> find_op(std::string_view name) const;
  std::size_t op_index(std::string_view name) const;

  std::size_t user_count() const { return data_.user_count(); }
  std::size_t resource_count() const { return data_.resource_count(); }
  /// |U| * |R| * |Op|.
  std::size_t tuple_count() const {
    return user_count() * resource_count() * op_count();
  }

  std::size_t index(const UPTuple& t) const {
    return (static_cast<std::size_t>(t.user) * resource_count() + t.resource) * op_count() +
           t.op;
  }
  UPTuple tuple(std::size_t i) const {
    const std::size_t o = i % op_count();
    const std::size_t ur = i / op_count();
    return {static_cast<std::uint32_t>(ur / resource_count()),
            static_cast<std::uint32_t>(ur % resource_count()), static_cast<std::uint32_t>(o)};
  }
  /// Looks up a tuple by names; throws SchemaError on unknown names.
  UPTuple tuple(std::string_view user, std::string_view resource, std::string_view op) const;

  TupleSet empty_set() const { return TupleSet(tuple_count()); }

  /// Names in (user, resource, op) order, for printing and tie-breaking.
  std::string describe(const UPTuple& t) const;

 private:
  AttributeData data_;
  std::vector<std::string> ops_;
  std::unordered_map<std::string, std::size_t> op_pos_;
};

}  // namespace abacmine
