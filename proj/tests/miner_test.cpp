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

#include "abacmine/miner.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "abacmine/error.hpp"
#include "abacmine/policy_text.hpp"
#include "abacmine/synth.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

namespace abacmine {
namespace {

using testing::load_fixture;
using testing::rule;

constexpr char kRho1[] =
    "rule: position in {faculty, student}; type in {gradebook}; {addScore}; "
    "crsTaught contains crs and dept = dept";
constexpr char kRho2[] =
    "rule: position in {faculty}; type in {gradebook}; {addScore, readScore}; "
    "crsTaught contains crs and dept = dept";
constexpr char kRho3[] =
    "rule: position in {faculty, student}; type in {gradebook}; {addScore, readScore}; "
    "crsTaught contains crs and dept = dept";

MiningConfig fragment_config() {
  MiningConfig cfg;
  cfg.quality = QualityConfig::for_completeness(0.75);
  return cfg;
}

EntitySet entities(const Universe& u, Side side, std::initializer_list<const char*> ids) {
  EntitySet s(u.data().count(side));
  for (const char* id : ids) s.set(u.data().index(side, id));
  return s;
}

TEST(Fragment, CandidateConstraint) {
  auto f = load_fixture("fragment");
  const auto& d = f.universe->data();
  auto cc = candidate_constraint(d, d.index(Side::kResource, "cs601gradebook"),
                                 d.index(Side::kUser, "csFac2"));
  Constraint got(cc.begin(), cc.end());
  EXPECT_EQ(got, rule(*f.universe, "rule: true; true; {addScore}; dept = dept and crsTaught contains crs").con);
}

TEST(Fragment, ComputeUaeOfBothUsers) {
  auto f = load_fixture("fragment");
  auto uae = compute_uae(f.universe->data(), entities(*f.universe, Side::kUser, {"csFac2", "csStu3"}));
  auto want = rule(*f.universe,
                   "rule: position in {faculty, student} and dept in {cs} and crsTaught supseteqin "
                   "{{cs601}}; true; {addScore}; true");
  EXPECT_EQ(uae, want.uae);
}

TEST(Fragment, SeedsYieldRho1ThenRho2) {
  auto f = load_fixture("fragment");
  Miner m(f.universe, f.summary, fragment_config());
  auto cands = m.generate_candidates();
  ASSERT_EQ(cands.size(), 2u);
  EXPECT_EQ(cands[0], rule(*f.universe, kRho1));
  EXPECT_EQ(cands[1], rule(*f.universe, kRho2));
}

TEST(Fragment, Rho1MeaningMatchesBruteForce) {
  auto f = load_fixture("fragment");
  const Rule r1 = rule(*f.universe, kRho1);
  auto m = rule_meaning(*f.universe, r1);
  EXPECT_EQ(m, rule_meaning_bruteforce(*f.universe, r1));
  TupleSet want = f.universe->empty_set();
  want.set(f.universe->index(f.universe->tuple("csFac2", "cs601gradebook", "addScore")));
  want.set(f.universe->index(f.universe->tuple("csStu3", "cs601gradebook", "addScore")));
  EXPECT_EQ(m, want);
}

TEST(Fragment, MergeRejectsRho3) {
  auto f = load_fixture("fragment");
  Miner m(f.universe, f.summary, fragment_config());
  const Rule r1 = rule(*f.universe, kRho1), r2 = rule(*f.universe, kRho2);
  const Rule r3 = merge_pair(r1, r2);
  EXPECT_EQ(r3, rule(*f.universe, kRho3));
  EXPECT_FALSE(m.valid(r3));
  std::vector<Rule> rules{r1, r2};
  EXPECT_FALSE(m.merge_rules(rules));
  EXPECT_EQ(std::count(rules.begin(), rules.end(), r3), 0);
  EXPECT_TRUE(m.up0().is_subset_of(m.meaning(rules)));
}

TEST(Fragment, MinedPolicyIsTheExhaustiveOptimum) {
  auto f = load_fixture("fragment");
  const auto cfg = fragment_config();
  auto res = mine_policy(f.universe, f.summary, cfg);
  EXPECT_EQ(format_rules(*f.universe, res.rules),
            "rule: true; true; {addScore}; true\n"
            "rule: position in {faculty}; true; {readScore}; true\n");
  const double q = q_pol(Policy{f.universe, res.rules}, f.summary, cfg.quality);
  const double opt = testing::optimal_policy_quality(*f.universe, f.summary.support(*f.universe), cfg.quality);
  EXPECT_DOUBLE_EQ(q, 3.0);
  EXPECT_DOUBLE_EQ(opt, 3.0);
}

TEST(Fragment, FullCoverCandidateIsSelectedAlone) {
  auto f = load_fixture("fragment");
  Miner m(f.universe, f.summary, fragment_config());
  const Rule all = rule(*f.universe, "rule: true; true; {addScore, readScore}; true");
  auto steps = m.select_final_rules({all});
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(steps[0].rule, all);
}

TEST(Fragment, SelectionRejectsNonCoveringCandidates) {
  auto f = load_fixture("fragment");
  Miner m(f.universe, f.summary, fragment_config());
  EXPECT_THROW(m.select_final_rules({rule(*f.universe, "rule: true; true; {readScore}; true")}),
               InternalError);
}

constexpr char kRoleSchema[] = R"({
  "user": {"single": ["role"], "multi": []},
  "resource": {"single": ["kind"], "multi": []},
  "operations": ["read", "write"]
})";
constexpr char kRoleAttrs[] = R"({
  "users": [
    {"id": "u1", "attrs": {"role": "x"}},
    {"id": "u2", "attrs": {"role": "y"}},
    {"id": "u3", "attrs": {"role": "z"}}
  ],
  "resources": [
    {"id": "r1", "attrs": {"kind": "doc"}},
    {"id": "r2", "attrs": {"kind": "log"}}
  ]
})";

TEST(MergeRules, UnionOfValuesIsAcceptedWhenValid) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  auto s = testing::summary_of(*u, {{"u1,r1,read", 1}, {"u2,r1,read", 1}});
  Miner m(u, s, {});
  std::vector<Rule> rules{rule(*u, "rule: role in {x}; kind in {doc}; {read}; true"),
                          rule(*u, "rule: role in {y}; kind in {doc}; {read}; true")};
  EXPECT_TRUE(m.merge_rules(rules));
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0], rule(*u, "rule: role in {x, y}; kind in {doc}; {read}; true"));
}

TEST(MergeRules, IdenticalRulesCollapse) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  auto s = testing::summary_of(*u, {{"u1,r1,read", 1}});
  Miner m(u, s, {});
  const Rule r = rule(*u, "rule: role in {x}; kind in {doc}; {read}; true");
  std::vector<Rule> rules{r, r};
  m.merge_rules(rules);
  EXPECT_EQ(rules, std::vector<Rule>{r});
}

TEST(Generalize, EmptyCandidateConstraintLeavesRuleUnchanged) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  auto s = testing::summary_of(*u, {{"u1,r1,read", 1}});
  Miner m(u, s, {});
  const Rule r = rule(*u, "rule: role in {x}; kind in {doc}; {read}; true");
  EXPECT_EQ(m.generalize_rule(r, {}, m.up0(), {}), r);
}

TEST(Simplify, ElimRedundantSets) {
  Schema schema({}, {"tags"}, {}, {});
  AttrExpr e(schema.size(Side::kUser));
  const std::size_t a = schema.index(Side::kUser, "tags");
  e.set(a, Conjunct{AtomSet{"a"}, AtomSet{"a", "b"}});
  elim_redundant_sets(schema, e);
  EXPECT_EQ(e.conjunct(a), (Conjunct{AtomSet{"a"}}));
}

TEST(Selection, DisjointFamiliesAreBothSelected) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  auto s = testing::summary_of(
      *u, {{"u1,r1,read", 1}, {"u2,r1,read", 1}, {"u3,r1,read", 1}, {"u1,r2,write", 1}});
  Miner m(u, s, {});
  const Rule reads = rule(*u, "rule: true; kind in {doc}; {read}; true");
  const Rule writes = rule(*u, "rule: role in {x}; kind in {log}; {write}; true");
  auto steps = m.select_final_rules({writes, reads, reads});
  ASSERT_EQ(steps.size(), 2u);
  EXPECT_EQ(steps[0].rule, reads);
  EXPECT_EQ(steps[1].rule, writes);
  EXPECT_GT(steps[0].score, steps[1].score);
}

TEST(Mine, FullProductForOneOperationGivesOneTopRule) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  std::map<UPTuple, double> w;
  for (const char* user : {"u1", "u2", "u3"})
    for (const char* res : {"r1", "r2"}) w[u->tuple(user, res, "read")] = 1;
  auto res = mine_policy(u, LogSummary::normalize(w), {});
  EXPECT_EQ(format_rules(*u, res.rules), "rule: true; true; {read}; true\n");
}

TEST(Mine, EmptySummaryIsRejected) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  EXPECT_THROW(Miner(u, LogSummary{}, {}), DataError);
}

// Four x-role reads at 19/80 each and one bogus write at 1/20.
LogSummary noisy_summary(const Universe& u) {
  return testing::summary_of(u, {{"u1,r1,read", 19},
                                 {"u2,r1,read", 19},
                                 {"u3,r1,read", 19},
                                 {"u1,r2,read", 19},
                                 {"u2,r2,write", 4}});
}

TEST(Noise, ThresholdZeroDropsNothing) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  MiningConfig cfg;
  cfg.noise = NoiseConfig{NoiseMetric::kQrulFreq, 0.0};
  auto res = mine_policy(u, noisy_summary(*u), cfg);
  ASSERT_TRUE(res.noise);
  EXPECT_TRUE(res.noise->dropped.empty());
  EXPECT_TRUE(res.noise->suspected.empty());
}

TEST(Noise, ThresholdAboveEveryScoreDropsAll) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  MiningConfig cfg;
  cfg.noise = NoiseConfig{NoiseMetric::kQrulFreq, 1e9};
  const auto s = noisy_summary(*u);
  auto res = mine_policy(u, s, cfg);
  EXPECT_TRUE(res.rules.empty());
  std::vector<UPTuple> all;
  for (const auto& [t, f] : s.entries()) all.push_back(t);
  EXPECT_EQ(res.noise->suspected, all);
}

TEST(Noise, RareBogusEntryIsReported) {
  auto u = testing::universe_from_json(kRoleSchema, kRoleAttrs);
  const auto s = noisy_summary(*u);
  for (auto metric : {NoiseMetric::kQrulFreq, NoiseMetric::kQfreq}) {
    MiningConfig cfg;
    cfg.noise = NoiseConfig{metric, metric == NoiseMetric::kQrulFreq ? 0.05 : 0.1};
    auto res = mine_policy(u, s, cfg);
    ASSERT_EQ(res.noise->suspected.size(), 1u);
    EXPECT_EQ(res.noise->suspected[0], u->tuple("u2", "r2", "write"));
    EXPECT_EQ(res.rules.size(), 2u);
  }
}

// Properties over random micro-instances.

struct MicroCase {
  std::shared_ptr<const Universe> universe;
  std::vector<Rule> policy;
  LogSummary summary;
};

MicroCase micro_case(testing::TestRng& rng) {
  for (;;) {
    MicroCase c;
    c.universe = testing::random_universe(rng);
    for (std::size_t i = 0, n = testing::pick(rng, 1, 2); i < n; ++i)
      c.policy.push_back(testing::random_rule(*c.universe, rng));
    const TupleSet m = policy_meaning(*c.universe, c.policy);
    if (m.none()) continue;
    c.summary = testing::uniform_summary(*c.universe, m);
    return c;
  }
}

TEST(MinerProperties, MinedPolicyCoversLoggedTuples) {
  testing::TestRng rng(11);
  for (int i = 0; i < 100; ++i) {
    auto c = micro_case(rng);
    auto res = mine_policy(c.universe, c.summary, {});
    EXPECT_TRUE(c.summary.support(*c.universe).is_subset_of(policy_meaning(*c.universe, res.rules)));
  }
}

TEST(MinerProperties, MergeAndSimplifyPreserveCoverage) {
  testing::TestRng rng(12);
  for (int i = 0; i < 100; ++i) {
    auto c = micro_case(rng);
    Miner m(c.universe, c.summary, {});
    auto rules = m.generate_candidates();
    ASSERT_TRUE(m.up0().is_subset_of(m.meaning(rules)));
    m.merge_rules(rules);
    EXPECT_TRUE(m.up0().is_subset_of(m.meaning(rules)));
    m.simplify_rules(rules);
    EXPECT_TRUE(m.up0().is_subset_of(m.meaning(rules)));
  }
}

TEST(MinerProperties, PreserveMeaningGuardKeepsMeaningExactly) {
  testing::TestRng rng(13);
  for (int i = 0; i < 100; ++i) {
    auto c = micro_case(rng);
    Miner m(c.universe, c.summary, {});
    std::vector<Rule> rules;
    for (std::size_t j = 0, n = testing::pick(rng, 1, 4); j < n; ++j)
      rules.push_back(testing::random_rule(*c.universe, rng));
    const TupleSet before = policy_meaning(*c.universe, rules);
    m.merge_rules(rules, Miner::MergeGuard::kPreserveMeaning);
    EXPECT_EQ(policy_meaning(*c.universe, rules), before);
  }
}

TEST(MinerProperties, CacheDoesNotChangeResults) {
  testing::TestRng rng(14);
  for (int i = 0; i < 50; ++i) {
    auto c = micro_case(rng);
    MiningConfig cached, uncached;
    uncached.cache_meanings = false;
    EXPECT_EQ(mine_policy(c.universe, c.summary, cached).rules,
              mine_policy(c.universe, c.summary, uncached).rules);
  }
}

TEST(MinerProperties, AllMetricsCoverLoggedTuples) {
  testing::TestRng rng(15);
  for (int i = 0; i < 50; ++i) {
    auto c = micro_case(rng);
    for (auto metric : {RuleMetric::kQrulFreq, RuleMetric::kQrulIlp}) {
      MiningConfig cfg;
      cfg.metric = metric;
      auto res = mine_policy(c.universe, c.summary, cfg);
      EXPECT_TRUE(
          c.summary.support(*c.universe).is_subset_of(policy_meaning(*c.universe, res.rules)));
    }
  }
}

TEST(MinerProperties, NeverBeatsExhaustiveOptimum) {
  testing::TestRng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto c = micro_case(rng);
    const auto cfg = MiningConfig{};
    auto res = mine_policy(c.universe, c.summary, cfg);
    const double q = q_pol(Policy{c.universe, res.rules}, c.summary, cfg.quality);
    const double opt =
        testing::optimal_policy_quality(*c.universe, c.summary.support(*c.universe), cfg.quality);
    EXPECT_LE(opt, q + 1e-9) << format_policy(*c.universe, res.rules);
  }
}

// Direct recursion over rules, without memoization or state encoding.
Rule reference_generalize(Miner& m, const Rule& rule, std::span<const AtomicConstraint> cc,
                          const TupleSet& uncov) {
  const auto& q = m.config().quality;
  auto score = [&](const Rule& r) {
    const TupleSet mean = m.meaning(r);
    return m.config().metric == RuleMetric::kQrulFreq
               ? q_rul_freq(mean, wsc(r, q.wsc), uncov, m.up0(), m.frequencies(), q.wo_rule)
               : q_rul(mean, wsc(r, q.wsc), uncov, m.up0(), q.wo_rule);
  };
  Rule best = rule;
  double best_q = score(rule);
  for (std::size_t i = 0; i < cc.size(); ++i) {
    Rule base = rule;
    base.con.insert(cc[i]);
    Rule gen[3] = {base, base, base};
    gen[0].uae.set_top(cc[i].user_attr);
    gen[0].rae.set_top(cc[i].res_attr);
    gen[1].uae.set_top(cc[i].user_attr);
    gen[2].rae.set_top(cc[i].res_attr);
    for (const Rule& g : gen) {
      Rule r = reference_generalize(m, g, cc.subspan(i + 1), uncov);
      const double rq = score(r);
      if (rq > best_q) {
        best = std::move(r);
        best_q = rq;
      }
    }
  }
  return best;
}

std::size_t expect_generalize_matches_reference(const std::shared_ptr<const Universe>& u, const LogSummary& s,
                                         RuleMetric metric, testing::TestRng& rng, std::size_t max_cc) {
  MiningConfig cfg;
  cfg.metric = metric;
  Miner m(u, s, cfg);
  const auto seeds = m.up0().indices();
  std::size_t compared = 0;
  for (std::size_t k = 0; k < std::min<std::size_t>(seeds.size(), 8); ++k) {
    const UPTuple t = u->tuple(seeds[testing::pick(rng, 0, seeds.size() - 1)]);
    const auto cc = candidate_constraint(u->data(), t.resource, t.user);
    if (cc.size() > max_cc) continue;
    EntitySet su(u->user_count()), sr(u->resource_count());
    su.set(t.user);
    sr.set(t.resource);
    const Rule rho{compute_uae(u->data(), su), compute_rae(u->data(), sr), {t.op}, {}};
    TupleSet uncov = m.up0();
    for (std::size_t i : m.up0().indices())
      if (testing::coin(rng, 0.3)) uncov.reset(i);
    EXPECT_EQ(m.generalize_rule(rho, cc, uncov, {}), reference_generalize(m, rho, cc, uncov))
        << format_rule(*u, rho);
    ++compared;
  }
  return compared;
}

TEST(MinerProperties, GeneralizeMatchesDirectRecursion) {
  testing::TestRng rng(21);
  for (int i = 0; i < 60; ++i) {
    auto c = micro_case(rng);
    expect_generalize_matches_reference(c.universe, c.summary,
                                        i % 2 ? RuleMetric::kQrulFreq : RuleMetric::kQrul, rng, 64);
  }
  std::size_t compared = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SynthPolicyConfig sc;
    sc.n_rules = 4;
    sc.seed = seed;
    const Policy p = gen_synthetic_policy(sc);
    Rng gen(seed);
    const auto s = gen_log_summary(p, make_distributions(p, {}, gen), 0.8, gen);
    compared += expect_generalize_matches_reference(
        p.universe, s, seed % 2 ? RuleMetric::kQrulFreq : RuleMetric::kQrul, rng, 6);
  }
  EXPECT_GE(compared, 16u);
}

}  // namespace
}  // namespace abacmine
