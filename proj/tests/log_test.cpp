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

#include "abacmine/log.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "abacmine/error.hpp"
#include "abacmine/io.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

namespace abacmine {
namespace {

std::vector<LogEntry> fragment_log(const Universe& u) {
  return parse_log(u, read_file(testing::data_dir() / "fragment" / "log.csv"));
}

TEST(Log, FragmentHasThreeDistinctTuples) {
  auto f = testing::load_fixture("fragment");
  auto log = fragment_log(*f.universe);
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(up_from_log(*f.universe, log).count(), 3u);
  EXPECT_EQ(log[1].timestamp, "t2");
  for (const auto& [t, freq] : f.summary.entries()) EXPECT_DOUBLE_EQ(freq, 1.0 / 3);
}

TEST(Log, RepeatedTupleIsOneSupportMember) {
  auto f = testing::load_fixture("fragment");
  const UPTuple t = f.universe->tuple("csFac2", "cs601gradebook", "addScore");
  std::vector<LogEntry> log(5, LogEntry{t, "x"});
  EXPECT_EQ(up_from_log(*f.universe, log).count(), 1u);
  EXPECT_DOUBLE_EQ(summarize(log).frequency(t), 1.0);
}

TEST(Log, EmptyLog) {
  auto f = testing::load_fixture("fragment");
  EXPECT_TRUE(up_from_log(*f.universe, {}).none());
  EXPECT_THROW(summarize({}), DataError);
}

TEST(Log, SummaryFrequencies) {
  auto f = testing::load_fixture("fragment");
  const UPTuple t = f.universe->tuple("csFac2", "cs601gradebook", "addScore");
  const UPTuple s = f.universe->tuple("csStu3", "cs601gradebook", "addScore");
  auto sum = summarize(std::vector<LogEntry>{{t, "1"}, {t, "2"}, {t, "3"}, {s, "4"}});
  EXPECT_DOUBLE_EQ(sum.frequency(t), 0.75);
  EXPECT_DOUBLE_EQ(sum.frequency(s), 0.25);
  EXPECT_DOUBLE_EQ(sum.frequency(f.universe->tuple("csStu3", "cs601gradebook", "readScore")), 0.0);
}

TEST(Log, SummaryIsPermutationInvariant) {
  testing::TestRng rng(1);
  auto u = testing::random_universe(rng);
  std::vector<LogEntry> log;
  for (int i = 0; i < 40; ++i)
    log.push_back({u->tuple(testing::pick(rng, 0, u->tuple_count() - 1)), std::to_string(i)});
  const LogSummary base = summarize(log);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(log.begin(), log.end(), rng);
    EXPECT_EQ(summarize(log), base);
  }
  std::map<UPTuple, double> keys;
  for (const auto& [t, f] : base.entries()) keys[t] = 1;
  EXPECT_EQ(up_from_log(*u, log), LogSummary::normalize(keys).support(*u));
}

TEST(Log, SummaryValidation) {
  const UPTuple t{0, 0, 0}, s{0, 0, 1};
  EXPECT_NO_THROW(LogSummary({{t, 0.5}, {s, 0.5}}));
  EXPECT_THROW(LogSummary({{t, 0.5}, {s, 0.4}}), DataError);
  EXPECT_THROW(LogSummary({{t, 1.5}, {s, -0.5}}), DataError);
  EXPECT_THROW(LogSummary({{t, 1.0}, {s, 0.0}}), DataError);
  auto n = LogSummary::normalize({{t, 3.0}, {s, 1.0}, {UPTuple{0, 0, 2}, 0.0}});
  EXPECT_EQ(n.size(), 2u);
  EXPECT_DOUBLE_EQ(n.frequency(t), 0.75);
}

TEST(Log, WeightedSizes) {
  auto f = testing::load_fixture("fragment");
  const FrequencyTable freq(*f.universe, f.summary);
  const TupleSet all = f.summary.support(*f.universe);
  EXPECT_NEAR(freq_weighted_size(all, freq), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(freq_weighted_size(f.universe->empty_set(), freq), 0.0);

  const UPTuple t = f.universe->tuple("csFac2", "cs601gradebook", "addScore");
  const UPTuple s = f.universe->tuple("csStu3", "cs601gradebook", "addScore");
  auto sum = summarize(std::vector<LogEntry>{{t, "1"}, {t, "2"}, {t, "3"}, {s, "4"}});
  const FrequencyTable f2(*f.universe, sum);
  TupleSet one = f.universe->empty_set();
  one.set(f.universe->index(s));
  EXPECT_DOUBLE_EQ(f2.weighted_size(one), 0.25);
}

TEST(Log, WeightedSizeIsAdditiveOverDisjointSets) {
  testing::TestRng rng(2);
  for (int i = 0; i < 50; ++i) {
    auto u = testing::random_universe(rng);
    std::map<UPTuple, double> w;
    for (std::size_t t = 0; t < u->tuple_count(); ++t)
      if (testing::coin(rng, 0.6)) w[u->tuple(t)] = 1.0 + static_cast<double>(testing::pick(rng, 0, 9));
    if (w.empty()) continue;
    const FrequencyTable freq(*u, LogSummary::normalize(w));
    TupleSet a = u->empty_set(), b = u->empty_set();
    for (std::size_t t = 0; t < u->tuple_count(); ++t) (testing::coin(rng, 0.5) ? a : b).set(t);
    EXPECT_NEAR(freq.weighted_size(a) + freq.weighted_size(b), freq.weighted_size(a | b), 1e-12);
  }
}

TEST(Log, CompletenessOfSupport) {
  auto f = testing::load_fixture("fragment");
  const TupleSet meaning = policy_meaning(*f.universe, f.policy);
  EXPECT_DOUBLE_EQ(completeness(f.summary.support(*f.universe), meaning), 0.75);
  EXPECT_THROW(completeness(meaning, f.universe->empty_set()), DataError);
}

TEST(Io, LogAndSummaryRoundTrip) {
  auto f = testing::load_fixture("fragment");
  auto log = fragment_log(*f.universe);
  const std::string text = format_log(*f.universe, log);
  auto again = parse_log(*f.universe, text);
  ASSERT_EQ(again.size(), log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(again[i].tuple, log[i].tuple);
    EXPECT_EQ(again[i].timestamp, log[i].timestamp);
  }
  EXPECT_EQ(parse_summary(*f.universe, format_summary(*f.universe, f.summary)), f.summary);
}

TEST(Io, SchemaAndAttributesRoundTrip) {
  testing::TestRng rng(3);
  for (int i = 0; i < 30; ++i) {
    auto u = testing::random_universe(rng);
    auto schema = parse_schema(format_schema(u->schema(), u->operations()));
    EXPECT_EQ(schema.schema, u->schema());
    EXPECT_EQ(schema.operations, u->operations());
    auto data = parse_attribute_data(schema.schema, format_attribute_data(u->data()));
    EXPECT_EQ(format_attribute_data(data), format_attribute_data(u->data()));
    for (std::size_t e = 0; e < u->user_count(); ++e)
      for (std::size_t a = 0; a < u->schema().size(Side::kUser); ++a)
        EXPECT_EQ(data.value(Side::kUser, e, a), u->data().value(Side::kUser, e, a));
  }
}

TEST(Io, LogErrorsNameTheLine) {
  auto f = testing::load_fixture("fragment");
  try {
    parse_log(*f.universe, "csFac2,cs601gradebook,addScore,t1\nnobody,cs601gradebook,addScore,t2\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_log(*f.universe, "csFac2,cs601gradebook\n"), ParseError);
  EXPECT_THROW(parse_summary(*f.universe, "csFac2,cs601gradebook,addScore,abc\n"), ParseError);
  EXPECT_THROW(parse_summary(*f.universe, "csFac2,cs601gradebook,addScore,0.5\n"), DataError);
}

TEST(Io, MalformedJsonIsADataError) {
  EXPECT_THROW(parse_schema("{"), DataError);
  EXPECT_THROW(parse_schema(R"({"user": {"single": [], "multi": []}})"), DataError);
  auto s = parse_schema(R"({"user": {"single": ["a"], "multi": []},
                            "resource": {"single": [], "multi": []}, "operations": ["x"]})");
  EXPECT_THROW(parse_attribute_data(s.schema, R"({"users": [{"id": "u", "attrs": {"b": "1"}}],
                                                 "resources": []})"),
               std::exception);
  EXPECT_THROW(load_universe("/nonexistent/schema.json", "/nonexistent/attrs.json"), DataError);
}

}  // namespace
}  // namespace abacmine
