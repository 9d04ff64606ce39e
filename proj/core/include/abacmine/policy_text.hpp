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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abacmine/attributes.hpp"
#include "abacmine/policy.hpp"

namespace abacmine {

// Textual rule syntax, one rule per line:
//
//   rule: <uae>; <rae>; {op, ...}; <con>
//
// An attribute expression is `true` or conjuncts joined by `and`:
//   single-valued         a in {x, y}      or  a = x
//   multi-valued (user)   a supseteqin {{x, y}, {z}}  or  a supseteq {x, y}
//   multi-valued (res.)   a in {{x, y}, {z}}          or  a = {x, y}
// A constraint is `true` or atomic constraints joined by `and`:
//   u supseteq r | u contains r | u = r
// Text after `#` is a comment. Atoms that are not plain tokens are written
// in double quotes.

/// Canonical form: conjuncts in attribute-name order, values sorted,
/// constraints sorted by form then attribute names.
std::string format_expr(const Schema& schema, Side side, const AttrExpr& e);
std::string format_constraint(const Schema& schema, const Constraint& con);
std::string format_rule(const Universe& universe, const Rule& rule);
/// One `rule:` line per rule, in the given order.
std::string format_rules(const Universe& universe, std::span<const Rule> rules);
/// Rules sorted by their canonical text.
std::string format_policy(const Universe& universe, std::span<const Rule> rules);

/// Throws ParseError (with line and column) on syntax errors and on
/// references to unknown attributes or operations.
std::vector<Rule> parse_policy(const Universe& universe, std::string_view text);
Rule parse_rule(const Universe& universe, std::string_view line);

}  // namespace abacmine
