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

#include "abacmine/policy_text.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "abacmine/error.hpp"

namespace abacmine {

namespace {

bool plain_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == '@' || c == '/' || c == '+';
}

std::string quote_atom(const std::string& a) {
  static const char* const kKeywords[] = {"and", "in", "true", "supseteq", "supseteqin",
                                          "contains", "rule"};
  bool plain = !a.empty() && std::all_of(a.begin(), a.end(), plain_char);
  for (const char* k : kKeywords)
    if (a == k) plain = false;
  if (plain) return a;
  std::string out = "\"";
  for (char c : a) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string format_atoms(const AtomSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += quote_atom(s[i]);
  }
  return out + "}";
}

}  // namespace

std::string format_expr(const Schema& schema, Side side, const AttrExpr& e) {
  std::string out;
  for (std::size_t a = 0; a < e.size(); ++a) {
    if (e.is_top(a)) continue;
    if (!out.empty()) out += " and ";
    const AttributeDef& def = schema.attribute(side, a);
    out += def.name;
    const Conjunct& c = e.conjunct(a);
    if (!def.multi) {
      AtomSet vals;
      for (const auto& elem : c) vals.push_back(elem.front());
      out += " in " + format_atoms(vals);
      continue;
    }
    out += side == Side::kUser ? " supseteqin {" : " in {";
    bool first = true;
    for (const auto& elem : c) {
      if (!first) out += ", ";
      first = false;
      out += format_atoms(elem);
    }
    out += "}";
  }
  return out.empty() ? "true" : out;
}

std::string format_constraint(const Schema& schema, const Constraint& con) {
  if (con.empty()) return "true";
  std::vector<std::string> parts;
  for (const auto& c : con) {
    const char* op = c.kind == AtomicConstraint::Kind::kSupersetEq ? " supseteq "
                     : c.kind == AtomicConstraint::Kind::kContains ? " contains "
                                                                   : " = ";
    parts.push_back(schema.attribute(Side::kUser, c.user_attr).name + op +
                    schema.attribute(Side::kResource, c.res_attr).name);
  }
  // Attribute indices follow name order, so the set order is already
  // form-then-names; keep the join explicit for readability.
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " and " : "") + parts[i];
  return out;
}

std::string format_rule(const Universe& universe, const Rule& rule) {
  const Schema& s = universe.schema();
  std::string ops = "{";
  bool first = true;
  for (auto o : rule.ops) {
    if (!first) ops += ", ";
    first = false;
    ops += quote_atom(universe.operations()[o]);
  }
  ops += "}";
  return "rule: " + format_expr(s, Side::kUser, rule.uae) + "; " +
         format_expr(s, Side::kResource, rule.rae) + "; " + ops + "; " +
         format_constraint(s, rule.con);
}

std::string format_rules(const Universe& universe, std::span<const Rule> rules) {
  std::string out;
  for (const auto& r : rules) out += format_rule(universe, r) + "\n";
  return out;
}

std::string format_policy(const Universe& universe, std::span<const Rule> rules) {
  std::vector<std::string> lines;
  for (const auto& r : rules) lines.push_back(format_rule(universe, r));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

namespace {

class Parser {
 public:
  Parser(const Universe& u, std::string_view text, int line)
      : u_(u), s_(u.schema()), text_(text), line_(line) {}

  Rule rule() {
    skip_ws();
    expect_word("rule");
    expect(':');
    Rule r = make_rule(s_);
    r.uae = expr(Side::kUser);
    expect(';');
    r.rae = expr(Side::kResource);
    expect(';');
    r.ops = ops();
    expect(';');
    r.con = constraint();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected trailing text");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string token() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '"') {
      ++pos_;
      std::string out;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        out += text_[pos_++];
      }
      if (pos_ >= text_.size()) fail("unterminated string");
      ++pos_;
      return out;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && plain_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a name or value");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string word() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '"') fail("expected a keyword or name");
    return token();
  }

  bool try_word(std::string_view w) {
    skip_ws();
    const std::size_t save = pos_;
    if (pos_ < text_.size() && plain_char(text_[pos_])) {
      if (token() == w) return true;
    }
    pos_ = save;
    return false;
  }

  void expect_word(std::string_view w) {
    if (!try_word(w)) fail("expected '" + std::string(w) + "'");
  }

  AtomSet atoms() {
    expect('{');
    AtomSet out;
    if (peek('}')) {
      ++pos_;
      return out;
    }
    for (;;) {
      out.push_back(token());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect('}');
      break;
    }
    return canonical_atoms(std::move(out));
  }

  Conjunct atom_sets() {
    expect('{');
    Conjunct out;
    for (;;) {
      out.insert(atoms());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect('}');
      break;
    }
    return out;
  }

  std::size_t attribute(Side side, const std::string& name, std::size_t at) {
    auto a = s_.find(side, name);
    if (!a) {
      pos_ = at;
      fail(std::string("unknown ") + (side == Side::kUser ? "user" : "resource") +
           " attribute '" + name + "'");
    }
    return *a;
  }

  AttrExpr expr(Side side) {
    AttrExpr e(s_.size(side));
    if (try_word("true")) return e;
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      const std::size_t a = attribute(side, word(), at);
      if (!e.is_top(a)) {
        pos_ = at;
        fail("attribute '" + s_.attribute(side, a).name + "' constrained twice");
      }
      const bool multi = s_.is_multi(side, a);
      Conjunct c;
      skip_ws();
      const std::size_t op_at = pos_;
      if (!multi) {
        if (peek('=')) {
          ++pos_;
          c.insert(AtomSet{token()});
        } else if (try_word("in")) {
          for (auto& v : atoms()) c.insert(AtomSet{v});
        } else {
          fail("expected 'in' or '='");
        }
      } else if (side == Side::kUser) {
        if (try_word("supseteqin")) {
          c = atom_sets();
        } else if (try_word("supseteq")) {
          c.insert(atoms());
        } else {
          fail("expected 'supseteqin' or 'supseteq'");
        }
      } else {
        if (peek('=')) {
          ++pos_;
          c.insert(atoms());
        } else if (try_word("in")) {
          c = atom_sets();
        } else {
          fail("expected 'in' or '='");
        }
      }
      if (c.empty()) {
        pos_ = op_at;
        fail("empty value set");
      }
      e.set(a, std::move(c));
      if (!try_word("and")) break;
    }
    return e;
  }

  std::set<std::uint32_t> ops() {
    skip_ws();
    const std::size_t at = pos_;
    AtomSet names = atoms();
    if (names.empty()) {
      pos_ = at;
      fail("rule has no operations");
    }
    std::set<std::uint32_t> out;
    for (const auto& n : names) {
      auto o = u_.find_op(n);
      if (!o) {
        pos_ = at;
        fail("unknown operation '" + n + "'");
      }
      out.insert(static_cast<std::uint32_t>(*o));
    }
    return out;
  }

  Constraint constraint() {
    Constraint con;
    if (try_word("true")) return con;
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      AtomicConstraint c;
      c.user_attr = attribute(Side::kUser, word(), at);
      if (peek('=')) {
        ++pos_;
        c.kind = AtomicConstraint::Kind::kEqual;
      } else if (try_word("supseteq")) {
        c.kind = AtomicConstraint::Kind::kSupersetEq;
      } else if (try_word("contains")) {
        c.kind = AtomicConstraint::Kind::kContains;
      } else {
        fail("expected '=', 'supseteq' or 'contains'");
      }
      skip_ws();
      c.res_attr = attribute(Side::kResource, word(), pos_);
      try {
        check_constraint(s_, c);
      } catch (const SchemaError& e) {
        pos_ = at;
        fail(e.what());
      }
      con.insert(c);
      if (!try_word("and")) break;
    }
    return con;
  }

  const Universe& u_;
  const Schema& s_;
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

Rule parse_rule(const Universe& universe, std::string_view line) {
  return Parser(universe, strip_comment(line), 1).rule();
}

std::vector<Rule> parse_policy(const Universe& universe, std::string_view text) {
  std::vector<Rule> rules;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    line = strip_comment(line);
    if (!blank(line)) rules.push_back(Parser(universe, line, line_no).rule());
    start = end + 1;
  }
  return rules;
}

}  // namespace abacmine
