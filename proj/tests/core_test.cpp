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

#include <gtest/gtest.h>

#include "abacmine/error.hpp"
#include "abacmine/policy.hpp"
#include "abacmine/policy_text.hpp"
#include "abacmine/semantics.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

namespace abacmine {
namespace {

using testing::rule;

constexpr char kCampusSchema[] = R"({
  "user": {"single": ["dept", "position"], "multi": ["courses"]},
  "resource": {"single": ["type"], "multi": ["tags"]},
  "operations": ["read", "write"]
})";
constexpr char kCampusAttrs[] = R"({
  "users": [
    {"id": "ann", "attrs": {"dept": "CS", "position": "grad", "courses": ["CS101", "CS102", "CS501"]}},
    {"id": "bob", "attrs": {"courses": ["CS102"]}},
    {"id": "cat", "attrs": {"dept": "EE", "position": "ugrad"}}
  ],
  "resources": [
    {"id": "doc", "attrs": {"type": "gradebook", "tags": ["a", "b"]}},
    {"id": "memo", "attrs": {"tags": []}}
  ]
})";

std::shared_ptr<const Universe> campus() {
  return testing::universe_from_json(kCampusSchema, kCampusAttrs);
}

std::size_t user(const Universe& u, const char* id) { return u.data().index(Side::kUser, id); }
std::size_t res(const Universe& u, const char* id) { return u.data().index(Side::kResource, id); }

TEST(Satisfaction, UserExpressionWithSupersetConjunct) {
  auto u = campus();
  const Rule e1 = rule(*u,
                       "rule: dept in {CS} and position in {grad, ugrad} and courses supseteqin "
                       "{{CS101, CS102}}; true; {read}; true");
  EXPECT_TRUE(satisfies_uae(u->data(), user(*u, "ann"), e1.uae));
  EXPECT_FALSE(satisfies_uae(u->data(), user(*u, "bob"), e1.uae));
  EXPECT_FALSE(satisfies_uae(u->data(), user(*u, "cat"), e1.uae));
  EXPECT_DOUBLE_EQ(wsc(e1.uae), 5.0);
}

TEST(Satisfaction, DisjunctionOfSets) {
  auto u = campus();
  const Rule e2 = rule(*u, "rule: courses supseteqin {{CS101}, {CS102}}; true; {read}; true");
  EXPECT_TRUE(satisfies_uae(u->data(), user(*u, "bob"), e2.uae));
  EXPECT_TRUE(satisfies_uae(u->data(), user(*u, "ann"), e2.uae));
  EXPECT_FALSE(satisfies_uae(u->data(), user(*u, "cat"), e2.uae));
}

TEST(Satisfaction, AllTopIsSatisfiedByEveryone) {
  auto u = campus();
  const AttrExpr top(u->schema().size(Side::kUser));
  for (std::size_t i = 0; i < u->user_count(); ++i) EXPECT_TRUE(satisfies_uae(u->data(), i, top));
  const AttrExpr rtop(u->schema().size(Side::kResource));
  for (std::size_t i = 0; i < u->resource_count(); ++i)
    EXPECT_TRUE(satisfies_rae(u->data(), i, rtop));
}

TEST(Satisfaction, ResourceSetConjunctUsesEquality) {
  auto u = campus();
  const Rule r = rule(*u, "rule: true; tags in {{a}}; {read}; true");
  EXPECT_FALSE(satisfies_rae(u->data(), res(*u, "doc"), r.rae));
  const Rule exact = rule(*u, "rule: true; tags in {{a, b}}; {read}; true");
  EXPECT_TRUE(satisfies_rae(u->data(), res(*u, "doc"), exact.rae));
  const Rule empty = rule(*u, "rule: true; tags in {{}}; {read}; true");
  EXPECT_TRUE(satisfies_rae(u->data(), res(*u, "memo"), empty.rae));
  EXPECT_FALSE(satisfies_rae(u->data(), res(*u, "doc"), empty.rae));
}

TEST(Satisfaction, BottomFailsConjunctsAndConstraints) {
  auto u = campus();
  const Rule r = rule(*u, "rule: dept in {CS}; type in {gradebook}; {read}; true");
  EXPECT_FALSE(satisfies_uae(u->data(), user(*u, "bob"), r.uae));
  EXPECT_FALSE(satisfies_rae(u->data(), res(*u, "memo"), r.rae));
  const Rule c = rule(*u, "rule: true; true; {read}; courses supseteq tags");
  EXPECT_TRUE(satisfies_constraint(u->data(), user(*u, "bob"), res(*u, "memo"), c.con));
  EXPECT_FALSE(satisfies_constraint(u->data(), user(*u, "cat"), res(*u, "memo"), c.con));
}

TEST(Satisfaction, EmptyConstraintHoldsEverywhere) {
  auto u = campus();
  for (std::size_t a = 0; a < u->user_count(); ++a)
    for (std::size_t b = 0; b < u->resource_count(); ++b)
      EXPECT_TRUE(satisfies_constraint(u->data(), a, b, {}));
}

TEST(Satisfaction, FragmentConstraints) {
  auto f = testing::load_fixture("fragment");
  const auto& d = f.universe->data();
  const Rule r = rule(*f.universe, "rule: true; true; {addScore}; dept = dept and crsTaught contains crs");
  EXPECT_TRUE(satisfies_constraint(d, d.index(Side::kUser, "csFac2"),
                                   d.index(Side::kResource, "cs601gradebook"), r.con));
  const Rule rae = rule(*f.universe,
                        "rule: true; crs in {cs601} and dept in {cs} and type in {gradebook}; "
                        "{addScore}; true");
  EXPECT_TRUE(satisfies_rae(d, d.index(Side::kResource, "cs601gradebook"), rae.rae));
}

TEST(Satisfaction, BottomMultiValuedFailsContains) {
  auto u = testing::universe_from_json(
      R"({"user": {"single": [], "multi": ["crsTaught"]},
          "resource": {"single": ["crs"], "multi": []}, "operations": ["read"]})",
      R"({"users": [{"id": "u", "attrs": {"crsTaught": null}}],
          "resources": [{"id": "r", "attrs": {"crs": "c1"}}]})");
  const Rule r = rule(*u, "rule: true; true; {read}; crsTaught contains crs");
  EXPECT_FALSE(satisfies_constraint(u->data(), 0, 0, r.con));
}

TEST(Meaning, UnconstrainedRuleGrantsEverything) {
  auto u = campus();
  const Rule r = rule(*u, "rule: true; true; {read, write}; true");
  EXPECT_EQ(rule_meaning(*u, r).count(), u->tuple_count());
}

TEST(Meaning, UnknownAttributeIsRejected) {
  auto u = campus();
  EXPECT_THROW(rule(*u, "rule: rank in {a}; true; {read}; true"), ParseError);
  EXPECT_THROW(u->schema().index(Side::kUser, "rank"), SchemaError);
}

TEST(Meaning, RuleWithoutOperationsIsRejected) {
  auto u = campus();
  Rule r = make_rule(u->schema());
  EXPECT_THROW(validate_rule(*u, r), SchemaError);
}

TEST(Meaning, IndexedAgreesWithBruteForceOnRandomInstances) {
  testing::TestRng rng(3);
  for (int i = 0; i < 500; ++i) {
    auto u = testing::random_universe(rng);
    std::vector<Rule> rules;
    TupleSet brute = u->empty_set();
    for (std::size_t j = 0, n = testing::pick(rng, 1, 3); j < n; ++j) {
      rules.push_back(testing::random_rule(*u, rng));
      const TupleSet b = rule_meaning_bruteforce(*u, rules.back());
      ASSERT_EQ(rule_meaning(*u, rules.back()), b) << format_rule(*u, rules.back());
      brute |= b;
    }
    EXPECT_EQ(policy_meaning(*u, rules), brute);
  }
}

TEST(Meaning, CacheMatchesDirectEvaluation) {
  testing::TestRng rng(4);
  auto u = testing::random_universe(rng);
  MeaningCache cache(*u, 8);
  for (int i = 0; i < 200; ++i) {
    const Rule r = testing::random_rule(*u, rng);
    EXPECT_EQ(cache.get(r), rule_meaning(*u, r));
    cache.trim();
    EXPECT_LE(cache.size(), 8u);
  }
}

// Dropping a conjunct, a value set element, an atomic constraint or adding
// an operation can only grow the meaning.
TEST(Meaning, MonotoneUnderGeneralization) {
  testing::TestRng rng(5);
  for (int i = 0; i < 300; ++i) {
    auto u = testing::random_universe(rng);
    const Rule r = testing::random_rule(*u, rng);
    const TupleSet m = rule_meaning(*u, r);
    for (std::size_t a : r.uae.used()) {
      Rule g = r;
      g.uae.set_top(a);
      EXPECT_TRUE(m.is_subset_of(rule_meaning(*u, g)));
    }
    for (std::size_t a : r.rae.used()) {
      Rule g = r;
      g.rae.set_top(a);
      EXPECT_TRUE(m.is_subset_of(rule_meaning(*u, g)));
    }
    for (const auto& f : r.con) {
      Rule g = r;
      g.con.erase(f);
      EXPECT_TRUE(m.is_subset_of(rule_meaning(*u, g)));
    }
    Rule g = r;
    for (std::uint32_t o = 0; o < u->op_count(); ++o) g.ops.insert(o);
    EXPECT_TRUE(m.is_subset_of(rule_meaning(*u, g)));
  }
}

TEST(Wsc, FragmentRuleCountsSix) {
  auto f = testing::load_fixture("fragment");
  const Rule r1 = rule(*f.universe,
                       "rule: position in {faculty, student}; type in {gradebook}; {addScore}; "
                       "crsTaught contains crs and dept = dept");
  EXPECT_DOUBLE_EQ(wsc(r1, {}), 6.0);
  EXPECT_DOUBLE_EQ(wsc(std::span<const Rule>{}, {}), 0.0);
  EXPECT_DOUBLE_EQ(wsc(r1, {2, 3, 5, 7}), 2 * 2 + 3 * 1 + 5 * 1 + 7 * 2);
}

TEST(Wsc, CountsAtomsInsideSets) {
  auto u = campus();
  const Rule r = rule(*u, "rule: courses supseteqin {{CS101, CS102}, {CS501}}; tags in {{}}; {read}; true");
  EXPECT_DOUBLE_EQ(wsc(r.uae), 3.0);
  EXPECT_DOUBLE_EQ(wsc(r.rae), 0.0);
}

TEST(PolicyText, RoundTripsRandomRules) {
  testing::TestRng rng(6);
  for (int i = 0; i < 300; ++i) {
    auto u = testing::random_universe(rng);
    std::vector<Rule> rules;
    for (std::size_t j = 0, n = testing::pick(rng, 1, 3); j < n; ++j)
      rules.push_back(testing::random_rule(*u, rng));
    const std::string text = format_rules(*u, rules);
    EXPECT_EQ(parse_policy(*u, text), rules) << text;
    EXPECT_EQ(format_rules(*u, parse_policy(*u, text)), text);
  }
}

TEST(PolicyText, QuotedValuesRoundTrip) {
  auto u = testing::universe_from_json(
      R"({"user": {"single": ["role"], "multi": []}, "resource": {"single": [], "multi": []},
          "operations": ["read"]})",
      R"({"users": [{"id": "u", "attrs": {"role": "in"}}, {"id": "v", "attrs": {"role": "a b"}}],
          "resources": [{"id": "r", "attrs": {}}]})");
  const Rule r = rule(*u, R"(rule: role in {"in", "a b"}; true; {read}; true)");
  EXPECT_EQ(rule_meaning(*u, r).count(), 2u);
  EXPECT_EQ(parse_rule(*u, format_rule(*u, r)), r);
}

TEST(PolicyText, ErrorsCarryLineAndColumn) {
  auto u = campus();
  try {
    parse_policy(*u, "rule: true; true; {read}; true\nrule: dept in {CS; true; {read}; true\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 1);
  }
  EXPECT_THROW(parse_rule(*u, "rule: true; true; {}; true"), DataError);
  EXPECT_THROW(parse_rule(*u, "rule: true; true; {fly}; true"), ParseError);
  EXPECT_THROW(parse_rule(*u, "rule: true; true; {read}; dept contains type"), ParseError);
}

TEST(PolicyText, CommentsAndBlankLinesAreIgnored) {
  auto u = campus();
  auto rules = parse_policy(*u, "# policy\n\nrule: true; true; {read}; true\n");
  EXPECT_EQ(rules.size(), 1u);
}

}  // namespace
}  // namespace abacmine
