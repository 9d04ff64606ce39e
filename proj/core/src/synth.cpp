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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "abacmine/error.hpp"
#include "abacmine/semantics.hpp"

namespace abacmine {

namespace {

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[uniform(rng, 0, v.size() - 1)];
}

std::string value_name(std::size_t i) { return "v" + std::to_string(i); }

AtomSet random_values(Rng& rng, std::size_t domain, std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> idx(domain);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t n = std::min(domain, uniform(rng, lo, hi));
  AtomSet out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(value_name(idx[i]));
  return canonical_atoms(std::move(out));
}

struct Draft {
  // Attribute positions refer to the schema's sorted order.
  AttrExpr uae, rae;
  std::set<std::uint32_t> ops;
  Constraint con;
};

}  // namespace

Policy gen_synthetic_policy(const SynthPolicyConfig& cfg) {
  if (cfg.n_rules == 0) throw DataError("n_rules must be at least 1");
  if (cfg.values == 0 || cfg.operations == 0) throw DataError("empty value or operation domain");
  Rng rng(cfg.seed);

  auto names = [](const char* prefix, std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
    return v;
  };
  const Schema schema(names("us", cfg.user_single_attrs), names("um", cfg.user_multi_attrs),
                      names("rs", cfg.res_single_attrs), names("rm", cfg.res_multi_attrs));
  const std::size_t uid = schema.id_attribute(Side::kUser);
  const std::size_t rid = schema.id_attribute(Side::kResource);

  std::vector<std::size_t> user_attrs, res_attrs;
  for (std::size_t a = 0; a < schema.size(Side::kUser); ++a)
    if (a != uid) user_attrs.push_back(a);
  for (std::size_t a = 0; a < schema.size(Side::kResource); ++a)
    if (a != rid) res_attrs.push_back(a);
  if (user_attrs.empty() && res_attrs.empty()) throw DataError("schema has no attributes");

  // Rules.
  std::vector<Draft> drafts;
  for (std::size_t n = 0; n < cfg.n_rules; ++n) {
    Draft d{AttrExpr(schema.size(Side::kUser)), AttrExpr(schema.size(Side::kResource)), {}, {}};
    std::set<std::size_t> used_u, used_r;
    const std::size_t n_con = uniform(rng, 0, 2);
    for (std::size_t c = 0; c < n_con; ++c) {
      std::vector<AtomicConstraint> options;
      for (auto ua : user_attrs) {
        if (used_u.contains(ua)) continue;
        for (auto ra : res_attrs) {
          if (used_r.contains(ra)) continue;
          const bool um = schema.is_multi(Side::kUser, ua), rm = schema.is_multi(Side::kResource, ra);
          if (um && rm) options.push_back({AtomicConstraint::Kind::kSupersetEq, ua, ra});
          if (um && !rm) options.push_back({AtomicConstraint::Kind::kContains, ua, ra});
          if (!um && !rm) options.push_back({AtomicConstraint::Kind::kEqual, ua, ra});
        }
      }
      if (options.empty()) break;
      const auto f = pick(rng, options);
      d.con.insert(f);
      used_u.insert(f.user_attr);
      used_r.insert(f.res_attr);
    }
    const std::size_t n_conj = uniform(rng, 1, 3);
    for (std::size_t c = 0; c < n_conj; ++c) {
      std::vector<std::pair<Side, std::size_t>> options;
      for (auto a : user_attrs)
        if (!used_u.contains(a)) options.emplace_back(Side::kUser, a);
      for (auto a : res_attrs)
        if (!used_r.contains(a)) options.emplace_back(Side::kResource, a);
      if (options.empty()) break;
      const auto [side, a] = pick(rng, options);
      (side == Side::kUser ? used_u : used_r).insert(a);
      Conjunct conj;
      if (!schema.is_multi(side, a)) {
        for (auto& v : random_values(rng, cfg.values, 1, 2)) conj.insert(AtomSet{v});
      } else {
        conj.insert(random_values(rng, cfg.values, 1, 2));
      }
      (side == Side::kUser ? d.uae : d.rae).set(a, std::move(conj));
    }
    const AtomSet ops = random_values(rng, cfg.operations, 1, 2);
    for (const auto& o : ops) d.ops.insert(static_cast<std::uint32_t>(std::stoul(o.substr(1))));
    drafts.push_back(std::move(d));
  }

  // Attribute data guided by the rules.
  auto random_value = [&](Side side, std::size_t a) {
    if (schema.is_multi(side, a)) return AttributeValue::set(random_values(rng, cfg.values, 0, 3));
    return AttributeValue::atom(value_name(uniform(rng, 0, cfg.values - 1)));
  };
  auto satisfying_value = [&](Side side, std::size_t a, const Conjunct& c) {
    const AtomSet& chosen = *std::next(c.begin(), static_cast<std::ptrdiff_t>(uniform(rng, 0, c.size() - 1)));
    if (!schema.is_multi(side, a)) return AttributeValue::atom(chosen.front());
    if (side == Side::kResource) return AttributeValue::set(chosen);
    AtomSet v = chosen;
    for (auto& x : random_values(rng, cfg.values, 0, 1)) v.push_back(x);
    return AttributeValue::set(std::move(v));
  };

  std::vector<Entity> users, resources;
  for (std::size_t n = 0; n < drafts.size(); ++n) {
    const Draft& d = drafts[n];
    std::vector<Entity> mine_res;
    for (std::size_t i = 0; i < cfg.resources_per_rule; ++i) {
      Entity e{"r" + std::to_string(n) + "_" + std::to_string(i), {}};
      for (auto a : res_attrs) {
        const auto& name = schema.attribute(Side::kResource, a).name;
        e.attrs[name] = d.rae.is_top(a) ? random_value(Side::kResource, a)
                                        : satisfying_value(Side::kResource, a, d.rae.conjunct(a));
      }
      for (const auto& f : d.con)
        if (e.attrs[schema.attribute(Side::kResource, f.res_attr).name].is_bottom())
          e.attrs[schema.attribute(Side::kResource, f.res_attr).name] =
              random_value(Side::kResource, f.res_attr);
      mine_res.push_back(e);
    }
    for (std::size_t i = 0; i < cfg.users_per_rule; ++i) {
      Entity e{"u" + std::to_string(n) + "_" + std::to_string(i), {}};
      for (auto a : user_attrs) {
        const auto& name = schema.attribute(Side::kUser, a).name;
        e.attrs[name] = d.uae.is_top(a) ? random_value(Side::kUser, a)
                                        : satisfying_value(Side::kUser, a, d.uae.conjunct(a));
      }
      if (!mine_res.empty()) {
        const Entity& r = pick(rng, mine_res);
        for (const auto& f : d.con) {
          const auto& un = schema.attribute(Side::kUser, f.user_attr).name;
          const AttributeValue& rv = r.attrs.at(schema.attribute(Side::kResource, f.res_attr).name);
          switch (f.kind) {
            case AtomicConstraint::Kind::kEqual: e.attrs[un] = rv; break;
            case AtomicConstraint::Kind::kContains: {
              AtomSet v = e.attrs[un].is_set() ? e.attrs[un].as_set() : AtomSet{};
              v.push_back(rv.as_atom());
              e.attrs[un] = AttributeValue::set(std::move(v));
              break;
            }
            case AtomicConstraint::Kind::kSupersetEq: {
              AtomSet v = e.attrs[un].is_set() ? e.attrs[un].as_set() : AtomSet{};
              v.insert(v.end(), rv.as_set().begin(), rv.as_set().end());
              e.attrs[un] = AttributeValue::set(std::move(v));
              break;
            }
          }
        }
      }
      users.push_back(std::move(e));
    }
    for (auto& r : mine_res) resources.push_back(std::move(r));
  }

  std::vector<std::string> ops;
  for (std::size_t o = 0; o < cfg.operations; ++o) ops.push_back("op" + std::to_string(o));
  auto universe =
      std::make_shared<const Universe>(AttributeData(schema, std::move(users), std::move(resources)),
                                       std::move(ops));
  // Operation names sort as strings, so map draft indices through names.
  Policy p{universe, {}};
  for (auto& d : drafts) {
    Rule r{std::move(d.uae), std::move(d.rae), {}, std::move(d.con)};
    for (auto o : d.ops) r.ops.insert(static_cast<std::uint32_t>(universe->op_index("op" + std::to_string(o))));
    p.rules.push_back(std::move(r));
  }
  return p;
}

std::vector<double> ratio_distribution(std::size_t n, double ratio, Rng& rng) {
  std::vector<double> w(n);
  if (n == 0) return w;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = n == 1 ? 1.0 : std::pow(ratio, static_cast<double>(i) / static_cast<double>(n - 1));
  std::shuffle(w.begin(), w.end(), rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return w;
}

GenDistributions make_distributions(const Policy& policy, const GenRatios& ratios, Rng& rng) {
  const Universe& u = *policy.universe;
  GenDistributions d;
  d.rule = ratio_distribution(policy.rules.size(), ratios.rule, rng);
  d.user = ratio_distribution(u.user_count(), ratios.user, rng);
  d.resource = ratio_distribution(u.resource_count(), ratios.resource, rng);
  d.op = ratio_distribution(u.op_count(), ratios.op, rng);
  return d;
}

ConditionalDists derive_conditional_dists(const Universe& universe, const GenDistributions& d,
                                          const Rule& rule) {
  ConditionalDists out;
  const Bitset pairs = pair_meaning(universe.data(), rule.uae, rule.rae, rule.con);
  const std::size_t nr = universe.resource_count();
  double c = 0;
  pairs.for_each([&](std::size_t p) {
    const double w = d.user[p / nr] * d.resource[p % nr];
    out.ur.emplace_back(p, w);
    c += w;
  });
  if (out.ur.empty()) throw DataError("rule grants no user-resource pair");
  if (c <= 0) throw DataError("rule's user-resource pairs carry no probability mass");
  for (auto& [p, w] : out.ur) w /= c;
  double co = 0;
  for (auto o : rule.ops) co += d.op[o];
  if (co <= 0) throw DataError("rule's operations carry no probability mass");
  for (auto o : rule.ops) out.op.emplace_back(o, d.op[o] / co);
  return out;
}

std::size_t target_support_size(double completeness, std::size_t meaning_size) {
  return static_cast<std::size_t>(
      std::floor(completeness * static_cast<double>(meaning_size) + 0.5 + 1e-9));
}

namespace {

void check_completeness(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw DataError("completeness must be in (0, 1]");
}

template <typename T>
std::discrete_distribution<std::size_t> weights_of(const std::vector<std::pair<T, double>>& v) {
  std::vector<double> w;
  for (const auto& [k, x] : v) w.push_back(x);
  return std::discrete_distribution<std::size_t>(w.begin(), w.end());
}

}  // namespace

namespace {

// Draws entries rule -> operation -> (user, resource) until `done` says stop.
template <typename Done>
std::vector<LogEntry> sample_log(const Policy& policy, const GenDistributions& d, Rng& rng,
                                 Done done) {
  const Universe& u = *policy.universe;
  std::vector<ConditionalDists> cond;
  std::vector<std::discrete_distribution<std::size_t>> ur_dist, op_dist;
  for (const auto& r : policy.rules) {
    cond.push_back(derive_conditional_dists(u, d, r));
    ur_dist.push_back(weights_of(cond.back().ur));
    op_dist.push_back(weights_of(cond.back().op));
  }
  std::discrete_distribution<std::size_t> rule_dist(d.rule.begin(), d.rule.end());
  std::vector<LogEntry> log;
  const std::size_t nr = u.resource_count();
  while (!done(log)) {
    const std::size_t k = rule_dist(rng);
    const std::uint32_t o = cond[k].op[op_dist[k](rng)].first;
    const std::size_t p = cond[k].ur[ur_dist[k](rng)].first;
    log.push_back({{static_cast<std::uint32_t>(p / nr), static_cast<std::uint32_t>(p % nr), o},
                   std::to_string(log.size())});
  }
  return log;
}

}  // namespace

std::vector<LogEntry> gen_log(const Policy& policy, const GenDistributions& d,
                              double completeness, Rng& rng, std::size_t max_entries) {
  check_completeness(completeness);
  const Universe& u = *policy.universe;
  const std::size_t target =
      target_support_size(completeness, policy_meaning(u, policy.rules).count());
  TupleSet seen = u.empty_set();
  std::size_t distinct = 0;
  return sample_log(policy, d, rng, [&](const std::vector<LogEntry>& log) {
    if (!log.empty()) {
      const std::size_t idx = u.index(log.back().tuple);
      if (!seen.test(idx)) {
        seen.set(idx);
        ++distinct;
      }
    }
    if (distinct >= target) return true;
    if (log.size() >= max_entries)
      throw DataError("target completeness not reached after " + std::to_string(max_entries) +
                      " log entries");
    return false;
  });
}

std::vector<LogEntry> gen_log_entries(const Policy& policy, const GenDistributions& d,
                                      std::size_t n, Rng& rng) {
  return sample_log(policy, d, rng,
                    [&](const std::vector<LogEntry>& log) { return log.size() >= n; });
}

LogSummary gen_log_summary(const Policy& policy, const GenDistributions& d) {
  const Universe& u = *policy.universe;
  const std::size_t nr = u.resource_count();
  std::map<UPTuple, double> freq;
  for (std::size_t k = 0; k < policy.rules.size(); ++k) {
    const ConditionalDists c = derive_conditional_dists(u, d, policy.rules[k]);
    for (const auto& [o, po] : c.op)
      for (const auto& [p, pur] : c.ur)
        freq[{static_cast<std::uint32_t>(p / nr), static_cast<std::uint32_t>(p % nr), o}] +=
            d.rule[k] * po * pur;
  }
  return LogSummary::normalize(freq);
}

LogSummary reduce_summary(const LogSummary& summary, std::size_t target, Rng& rng) {
  if (target >= summary.size()) return summary;
  std::vector<UPTuple> tuples;
  std::vector<double> w;
  for (const auto& [t, f] : summary.entries()) {
    tuples.push_back(t);
    w.push_back(f);
  }
  std::map<UPTuple, double> kept;
  for (std::size_t n = 0; n < target; ++n) {
    std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
    const std::size_t i = dist(rng);
    kept.emplace(tuples[i], summary.entries().at(tuples[i]));
    w[i] = 0.0;
  }
  return LogSummary::normalize(kept);
}

LogSummary gen_log_summary(const Policy& policy, const GenDistributions& d, double completeness,
                           Rng& rng) {
  check_completeness(completeness);
  LogSummary full = gen_log_summary(policy, d);
  const std::size_t target = target_support_size(
      completeness, policy_meaning(*policy.universe, policy.rules).count());
  return reduce_summary(full, target, rng);
}

std::vector<LogSummary> gen_summary_series(const Policy& policy, const GenDistributions& d,
                                           std::vector<double> levels, Rng& rng) {
  for (double c : levels) check_completeness(c);
  std::vector<std::size_t> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return levels[a] > levels[b]; });
  const std::size_t n = policy_meaning(*policy.universe, policy.rules).count();
  std::vector<LogSummary> out(levels.size());
  LogSummary current = gen_log_summary(policy, d);
  for (std::size_t i : order) {
    current = reduce_summary(current, target_support_size(levels[i], n), rng);
    out[i] = current;
  }
  return out;
}

}  // namespace abacmine
