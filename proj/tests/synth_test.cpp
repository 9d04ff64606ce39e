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

#include "abacmine/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "abacmine/error.hpp"
#include "abacmine/io.hpp"
#include "abacmine/policy_text.hpp"
#include "abacmine/semantics.hpp"
#include "fixtures.hpp"

namespace abacmine {
namespace {

using testing::rule;

GenDistributions uniform(const Policy& p) {
  const Universe& u = *p.universe;
  return {std::vector<double>(p.rules.size(), 1.0 / p.rules.size()),
          std::vector<double>(u.user_count(), 1.0 / u.user_count()),
          std::vector<double>(u.resource_count(), 1.0 / u.resource_count()),
          std::vector<double>(u.op_count(), 1.0 / u.op_count())};
}

Policy fragment_policy(std::initializer_list<const char*> lines) {
  auto f = testing::load_fixture("fragment");
  Policy p{f.universe, {}};
  for (const char* l : lines) p.rules.push_back(rule(*f.universe, l));
  return p;
}

std::string serialize(const Policy& p) {
  return format_schema(p.universe->schema(), p.universe->operations()) +
         format_attribute_data(p.universe->data()) + format_rules(*p.universe, p.rules);
}

TEST(SynthPolicy, DeterministicPerSeed) {
  SynthPolicyConfig cfg;
  cfg.n_rules = 20;
  cfg.seed = 7;
  EXPECT_EQ(serialize(gen_synthetic_policy(cfg)), serialize(gen_synthetic_policy(cfg)));
  auto other = cfg;
  other.seed = 8;
  EXPECT_NE(serialize(gen_synthetic_policy(cfg)), serialize(gen_synthetic_policy(other)));
}

TEST(SynthPolicy, EveryRuleGrantsSomething) {
  for (std::size_t n : {1u, 5u, 20u}) {
    SynthPolicyConfig cfg;
    cfg.n_rules = n;
    cfg.seed = 3;
    const Policy p = gen_synthetic_policy(cfg);
    ASSERT_EQ(p.rules.size(), n);
    EXPECT_EQ(p.universe->user_count(), n * cfg.users_per_rule);
    EXPECT_EQ(p.universe->resource_count(), n * cfg.resources_per_rule);
    for (const auto& r : p.rules) {
      EXPECT_NO_THROW(validate_rule(*p.universe, r));
      EXPECT_TRUE(rule_meaning(*p.universe, r).any());
    }
    if (n == 1)
      EXPECT_EQ(policy_meaning(*p.universe, p.rules), rule_meaning(*p.universe, p.rules[0]));
  }
}

TEST(SynthPolicy, RoundTripsThroughFiles) {
  SynthPolicyConfig cfg;
  cfg.n_rules = 6;
  const Policy p = gen_synthetic_policy(cfg);
  auto schema = parse_schema(format_schema(p.universe->schema(), p.universe->operations()));
  auto u = std::make_shared<const Universe>(
      parse_attribute_data(schema.schema, format_attribute_data(p.universe->data())),
      schema.operations);
  auto rules = parse_policy(*u, format_rules(*p.universe, p.rules));
  EXPECT_EQ(rules, p.rules);
  EXPECT_EQ(policy_meaning(*u, rules), policy_meaning(*p.universe, p.rules));
}

TEST(Ratios, GeometricInterpolationHonorsRatio) {
  Rng rng(1);
  for (double ratio : {1.0, 3.0, 25.0}) {
    auto d = ratio_distribution(12, ratio, rng);
    ASSERT_EQ(d.size(), 12u);
    double sum = 0;
    for (double x : d) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    const double got = *hi / *lo;
    EXPECT_LE(got, ratio * 1.1);
    EXPECT_GE(got, ratio / 1.1);
  }
  auto one = ratio_distribution(1, 25.0, rng);
  EXPECT_EQ(one, std::vector<double>{1.0});
}

TEST(Ratios, DistributionsPerItemKind) {
  SynthPolicyConfig cfg;
  cfg.n_rules = 10;
  const Policy p = gen_synthetic_policy(cfg);
  Rng rng(2);
  const GenRatios ratios;
  auto d = make_distributions(p, ratios, rng);
  auto check = [](const std::vector<double>& v, double ratio) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    EXPECT_LE(*hi / *lo, ratio * 1.1);
    EXPECT_GE(*hi / *lo, ratio / 1.1);
  };
  check(d.rule, ratios.rule);
  check(d.user, ratios.user);
  check(d.resource, ratios.resource);
  check(d.op, ratios.op);
}

TEST(Conditional, SingleValidPair) {
  auto p = fragment_policy({"rule: position in {faculty}; true; {readScore}; true"});
  auto c = derive_conditional_dists(*p.universe, uniform(p), p.rules[0]);
  ASSERT_EQ(c.ur.size(), 1u);
  EXPECT_DOUBLE_EQ(c.ur[0].second, 1.0);
  ASSERT_EQ(c.op.size(), 1u);
  EXPECT_DOUBLE_EQ(c.op[0].second, 1.0);
}

TEST(Conditional, UniformOverValidPairs) {
  auto p = fragment_policy({"rule: true; true; {addScore, readScore}; true"});
  auto c = derive_conditional_dists(*p.universe, uniform(p), p.rules[0]);
  ASSERT_EQ(c.ur.size(), 2u);
  for (const auto& [pair, mass] : c.ur) EXPECT_DOUBLE_EQ(mass, 0.5);
}

TEST(Conditional, HandSetMassesRenormalize) {
  auto p = fragment_policy({"rule: true; type in {gradebook}; {addScore, readScore}; crsTaught contains crs",
                            "rule: position in {faculty}; true; {addScore}; true"});
  // Users csFac2, csStu3; one resource; ops addScore, readScore.
  GenDistributions d{{0.5, 0.5}, {0.2, 0.6}, {1.0}, {0.1, 0.3}};
  auto c0 = derive_conditional_dists(*p.universe, d, p.rules[0]);
  ASSERT_EQ(c0.ur.size(), 2u);
  EXPECT_DOUBLE_EQ(c0.ur[0].second, 0.25);
  EXPECT_DOUBLE_EQ(c0.ur[1].second, 0.75);
  EXPECT_DOUBLE_EQ(c0.op[0].second, 0.25);
  EXPECT_DOUBLE_EQ(c0.op[1].second, 0.75);
  auto c1 = derive_conditional_dists(*p.universe, d, p.rules[1]);
  ASSERT_EQ(c1.ur.size(), 1u);
  EXPECT_DOUBLE_EQ(c1.ur[0].second, 1.0);
  EXPECT_EQ(c1.op, (std::vector<std::pair<std::uint32_t, double>>{{0, 1.0}}));
}

TEST(Conditional, EmptyMeaningIsAnError) {
  auto p = fragment_policy({"rule: position in {dean}; true; {readScore}; true"});
  EXPECT_THROW(derive_conditional_dists(*p.universe, uniform(p), p.rules[0]), DataError);
}

TEST(Completeness, TargetSupportRoundsHalfUp) {
  EXPECT_EQ(target_support_size(0.7, 10), 7u);
  EXPECT_EQ(target_support_size(0.5, 4), 2u);
  EXPECT_EQ(target_support_size(0.5, 5), 3u);
  EXPECT_EQ(target_support_size(0.25, 2), 1u);
  EXPECT_EQ(target_support_size(1.0, 9), 9u);
}

TEST(GenLog, FullCompletenessCoversTheMeaning) {
  auto p = fragment_policy({"rule: true; true; {addScore}; true",
                            "rule: position in {faculty}; true; {readScore}; true"});
  Rng rng(4);
  auto log = gen_log(p, uniform(p), 1.0, rng);
  EXPECT_EQ(up_from_log(*p.universe, log), policy_meaning(*p.universe, p.rules));
  for (std::size_t i = 0; i < log.size(); ++i) EXPECT_EQ(log[i].timestamp, std::to_string(i));
}

TEST(GenLog, HalfCompletenessStopsAtHalfTheTuples) {
  auto p = fragment_policy({"rule: true; type in {gradebook}; {addScore, readScore}; crsTaught contains crs"});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    auto log = gen_log(p, uniform(p), 0.5, rng);
    EXPECT_EQ(up_from_log(*p.universe, log).count(), 2u);
  }
}

TEST(GenLog, DeterministicPerSeed) {
  auto p = gen_synthetic_policy({});
  Rng r1(9), r2(9);
  auto d1 = make_distributions(p, {}, r1);
  auto d2 = make_distributions(p, {}, r2);
  EXPECT_EQ(format_log(*p.universe, gen_log(p, d1, 0.8, r1)),
            format_log(*p.universe, gen_log(p, d2, 0.8, r2)));
}

TEST(GenLog, InvalidCompletenessIsRejected) {
  auto p = fragment_policy({"rule: true; true; {addScore}; true"});
  Rng rng(1);
  EXPECT_THROW(gen_log(p, uniform(p), 0.0, rng), DataError);
  EXPECT_THROW(gen_log(p, uniform(p), 1.5, rng), DataError);
  EXPECT_THROW(gen_log_summary(p, uniform(p), -0.1, rng), DataError);
}

TEST(GenLog, UnreachableCompletenessHitsTheCap) {
  auto p = fragment_policy({"rule: true; true; {addScore, readScore}; true"});
  GenDistributions d = uniform(p);
  d.op = {1.0, 0.0};
  Rng rng(1);
  EXPECT_THROW(gen_log(p, d, 1.0, rng, 1000), DataError);
}

TEST(Summary, OneUniformRule) {
  auto p = fragment_policy({"rule: true; type in {gradebook}; {addScore, readScore}; crsTaught contains crs"});
  auto s = gen_log_summary(p, uniform(p));
  ASSERT_EQ(s.size(), 4u);
  for (const auto& [t, f] : s.entries()) EXPECT_DOUBLE_EQ(f, 0.25);
}

TEST(Summary, RuleMassesCarryOver) {
  auto p = fragment_policy({"rule: position in {faculty}; true; {readScore}; true",
                            "rule: position in {student}; true; {addScore}; true"});
  GenDistributions d = uniform(p);
  d.rule = {0.8, 0.2};
  auto s = gen_log_summary(p, d);
  const Universe& u = *p.universe;
  EXPECT_DOUBLE_EQ(s.frequency(u.tuple("csFac2", "cs601gradebook", "readScore")), 0.8);
  EXPECT_DOUBLE_EQ(s.frequency(u.tuple("csStu3", "cs601gradebook", "addScore")), 0.2);
}

TEST(Summary, FullSupportIsTheMeaning) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthPolicyConfig cfg;
    cfg.seed = seed;
    const Policy p = gen_synthetic_policy(cfg);
    Rng rng(seed);
    auto s = gen_log_summary(p, make_distributions(p, {}, rng));
    EXPECT_EQ(s.support(*p.universe), policy_meaning(*p.universe, p.rules));
  }
}

TEST(Summary, ReducedSupportSizeAndNesting) {
  const Policy p = gen_synthetic_policy({});
  Rng rng(5);
  const auto d = make_distributions(p, {}, rng);
  const TupleSet meaning = policy_meaning(*p.universe, p.rules);
  const std::vector<double> levels{1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
  auto series = gen_summary_series(p, d, levels, rng);
  ASSERT_EQ(series.size(), levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const TupleSet sup = series[i].support(*p.universe);
    EXPECT_EQ(sup.count(), target_support_size(levels[i], meaning.count()));
    EXPECT_TRUE(sup.is_subset_of(meaning));
    double total = 0;
    for (const auto& [t, f] : series[i].entries()) total += f;
    EXPECT_NEAR(total, 1.0, 1e-9);
    if (i > 0) EXPECT_TRUE(sup.is_subset_of(series[i - 1].support(*p.universe)));
  }
  auto single = gen_log_summary(p, d, 0.6, rng);
  EXPECT_EQ(single.size(), target_support_size(0.6, meaning.count()));
}

TEST(Summary, ReductionKeepsRelativeFrequencies) {
  auto p = fragment_policy({"rule: true; type in {gradebook}; {addScore, readScore}; crsTaught contains crs"});
  GenDistributions d = uniform(p);
  d.op = {0.25, 0.75};
  const auto full = gen_log_summary(p, d);
  Rng rng(6);
  const auto half = reduce_summary(full, 2, rng);
  ASSERT_EQ(half.size(), 2u);
  double scale = 0;
  for (const auto& [t, f] : half.entries()) scale += full.frequency(t);
  for (const auto& [t, f] : half.entries()) EXPECT_NEAR(f, full.frequency(t) / scale, 1e-12);
}

TEST(Summary, EmpiricalFrequenciesConverge) {
  SynthPolicyConfig cfg;
  cfg.n_rules = 4;
  const Policy p = gen_synthetic_policy(cfg);
  Rng rng(11);
  const auto d = make_distributions(p, {}, rng);
  const auto expected = gen_log_summary(p, d);
  const auto observed = summarize(gen_log_entries(p, d, 100000, rng));
  for (const auto& [t, f] : expected.entries()) EXPECT_NEAR(observed.frequency(t), f, 0.02);
  for (const auto& [t, f] : observed.entries()) EXPECT_GT(expected.frequency(t), 0.0);
}

}  // namespace
}  // namespace abacmine
