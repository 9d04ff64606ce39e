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

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "abacmine/error.hpp"
#include "abacmine/policy_text.hpp"

namespace abacmine {

namespace {

using Kind = AtomicConstraint::Kind;

bool includes(const AtomSet& big, const AtomSet& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool holds(const AttributeValue& uv, const AttributeValue& rv, Kind kind) {
  if (uv.is_bottom() || rv.is_bottom()) return false;
  switch (kind) {
    case Kind::kSupersetEq: return includes(uv.as_set(), rv.as_set());
    case Kind::kContains:
      return std::binary_search(uv.as_set().begin(), uv.as_set().end(), rv.as_atom());
    case Kind::kEqual: return uv.as_atom() == rv.as_atom();
  }
  return false;
}

AttrExpr characterize(const AttributeData& data, Side side, const EntitySet& s) {
  const Schema& schema = data.schema();
  const std::size_t id_attr = schema.id_attribute(side);
  AttrExpr e(schema.size(side));
  const auto members = s.indices();
  if (members.empty()) throw std::invalid_argument("cannot characterize an empty set");
  for (std::size_t a = 0; a < schema.size(side); ++a) {
    if (a == id_attr) continue;
    Conjunct c;
    bool known = true;
    for (auto m : members) {
      const AttributeValue& v = data.value(side, m, a);
      if (v.is_bottom()) {
        known = false;
        break;
      }
      c.insert(v.is_atom() ? AtomSet{v.as_atom()} : v.as_set());
    }
    if (known) e.set(a, std::move(c));
  }
  if (!(expr_meaning(data, side, e) == s)) {
    Conjunct ids;
    for (auto m : members) ids.insert(AtomSet{data.id(side, m)});
    e.set(id_attr, std::move(ids));
  }
  return e;
}

bool conjunct_covers(const std::optional<Conjunct>& wide, const std::optional<Conjunct>& narrow) {
  if (!wide) return true;
  if (!narrow) return false;
  return std::includes(wide->begin(), wide->end(), narrow->begin(), narrow->end());
}

bool attrs_subset(const AttrExpr& a, const AttrExpr& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a.is_top(i) && b.is_top(i)) return false;
  return true;
}

AttrExpr& expr_of(Rule& r, Side side) { return side == Side::kUser ? r.uae : r.rae; }
const AttrExpr& expr_of(const Rule& r, Side side) { return side == Side::kUser ? r.uae : r.rae; }

}  // namespace

std::vector<AtomicConstraint> candidate_constraint(const AttributeData& data, std::size_t resource,
                                                   std::size_t user) {
  const Schema& schema = data.schema();
  std::vector<AtomicConstraint> out;
  for (Kind kind : {Kind::kSupersetEq, Kind::kContains, Kind::kEqual}) {
    for (std::size_t ua = 0; ua < schema.size(Side::kUser); ++ua) {
      const bool um = schema.is_multi(Side::kUser, ua);
      for (std::size_t ra = 0; ra < schema.size(Side::kResource); ++ra) {
        const bool rm = schema.is_multi(Side::kResource, ra);
        const bool typed = kind == Kind::kSupersetEq ? (um && rm)
                           : kind == Kind::kContains ? (um && !rm)
                                                     : (!um && !rm);
        if (!typed) continue;
        if (holds(data.value(Side::kUser, user, ua), data.value(Side::kResource, resource, ra),
                  kind))
          out.push_back({kind, ua, ra});
      }
    }
  }
  return out;
}

void elim_redundant_sets(const Schema& schema, AttrExpr& uae) {
  for (std::size_t a = 0; a < uae.size(); ++a) {
    if (uae.is_top(a) || !schema.is_multi(Side::kUser, a)) continue;
    const Conjunct& c = uae.conjunct(a);
    Conjunct kept;
    for (const auto& s : c) {
      const bool redundant = std::any_of(c.begin(), c.end(), [&](const AtomSet& t) {
        return t.size() < s.size() && includes(s, t);
      });
      if (!redundant) kept.insert(s);
    }
    if (kept.size() != c.size()) uae.set(a, std::move(kept));
  }
}

AttrExpr compute_uae(const AttributeData& data, const EntitySet& users) {
  AttrExpr e = characterize(data, Side::kUser, users);
  elim_redundant_sets(data.schema(), e);
  return e;
}

AttrExpr compute_rae(const AttributeData& data, const EntitySet& resources) {
  return characterize(data, Side::kResource, resources);
}

AttrExpr expr_union(const AttrExpr& a, const AttrExpr& b) {
  AttrExpr out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.is_top(i) || b.is_top(i)) continue;
    Conjunct c = a.conjunct(i);
    c.insert(b.conjunct(i).begin(), b.conjunct(i).end());
    out.set(i, std::move(c));
  }
  return out;
}

Rule merge_pair(const Rule& a, const Rule& b) {
  Rule m;
  m.uae = expr_union(a.uae, b.uae);
  m.rae = expr_union(a.rae, b.rae);
  m.ops = a.ops;
  m.ops.insert(b.ops.begin(), b.ops.end());
  m.con = a.con;
  return m;
}

double max_conjunct_size(const AttrExpr& e) {
  double best = 0;
  for (std::size_t a = 0; a < e.size(); ++a) {
    if (e.is_top(a)) continue;
    double n = 0;
    for (const auto& elem : e.conjunct(a)) n += static_cast<double>(elem.size());
    best = std::max(best, n);
  }
  return best;
}

Rule elim_attribute(const Rule& rule, const TaggedAttribute& ta) {
  Rule r = rule;
  expr_of(r, ta.side).set_top(ta.attr);
  return r;
}

Miner::Miner(std::shared_ptr<const Universe> universe, LogSummary summary, MiningConfig cfg)
    : universe_(std::move(universe)),
      summary_(std::move(summary)),
      cfg_(std::move(cfg)),
      up0_(summary_.support(*universe_)),
      freq_(*universe_, summary_),
      cache_(*universe_) {
  if (summary_.empty()) throw DataError("cannot mine from an empty log summary");
}

TupleSet Miner::meaning(const Rule& rule) {
  if (!cfg_.cache_meanings) return rule_meaning(*universe_, rule);
  cache_.trim();
  return cache_.get(rule);
}

TupleSet Miner::meaning(std::span<const Rule> rules) {
  TupleSet out = universe_->empty_set();
  for (const auto& r : rules) out |= meaning(r);
  return out;
}

double Miner::policy_quality(std::span<const Rule> rules) {
  return q_pol(wsc(rules, cfg_.quality.wsc), meaning(rules), up0_, universe_->user_count(), freq_,
               cfg_.quality);
}

double Miner::seed_quality(const Rule& rule, const TupleSet& up, const TupleSet& covered) {
  return seed_quality(meaning(rule), wsc(rule, cfg_.quality.wsc), up, covered);
}

double Miner::seed_quality(const TupleSet& m, double w, const TupleSet& up,
                           const TupleSet& covered) {
  switch (cfg_.metric) {
    case RuleMetric::kQrul: return q_rul(m, w, up, up0_, cfg_.quality.wo_rule);
    case RuleMetric::kQrulFreq: return q_rul_freq(m, w, up, up0_, freq_, cfg_.quality.wo_rule);
    case RuleMetric::kQrulIlp: {
      const TupleSet gained = m - covered;
      const double dg = static_cast<double>(gained.count()) /
                        static_cast<double>(universe_->tuple_count());
      return q_rul_ilp_log2(w, up0_.count(), gained.intersect_count(up0_), dg);
    }
  }
  return 0.0;
}

double Miner::extension_quality(const Rule& rule, const TupleSet& up,
                                std::span<const Rule> context) {
  if (cfg_.metric != RuleMetric::kQrulIlp) return seed_quality(rule, up, up);
  return seed_quality(rule, up, meaning(context));
}

double Miner::modification_quality(const Rule& rule, std::span<const Rule> rules, std::size_t i,
                                   const TupleSet& others) {
  if (cfg_.metric != RuleMetric::kQrulIlp) return seed_quality(rule, up0_, up0_);
  const double size = wsc(rules, cfg_.quality.wsc) - wsc(rules[i], cfg_.quality.wsc) +
                      wsc(rule, cfg_.quality.wsc);
  const double g = static_cast<double>((others | meaning(rule)).count()) /
                   static_cast<double>(universe_->tuple_count());
  return fm_log2(size, g, up0_.count());
}

std::vector<Rule> Miner::generate_candidates() {
  const Universe& u = *universe_;
  const AttributeData& data = u.data();
  std::vector<std::pair<double, UPTuple>> seeds;
  for (const auto& [t, f] : summary_.entries()) seeds.emplace_back(f, t);
  // Highest frequency first; ties by (user, resource, op) names, which is
  // index order because entities and operations are stored sorted.
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<Rule> rules;
  TupleSet uncov = up0_;
  for (const auto& [f, seed] : seeds) {
    if (!uncov.test(u.index(seed))) continue;
    const auto cc = candidate_constraint(data, seed.resource, seed.user);
    EntitySet su(u.user_count());
    for (std::size_t v = 0; v < u.user_count(); ++v) {
      const UPTuple t{static_cast<std::uint32_t>(v), seed.resource, seed.op};
      if (up0_.test(u.index(t)) && candidate_constraint(data, seed.resource, v) == cc) su.set(v);
    }
    EntitySet sr(u.resource_count());
    sr.set(seed.resource);
    add_cand_rule(su, sr, {seed.op}, cc, uncov, rules);

    std::set<std::uint32_t> so;
    for (std::uint32_t o = 0; o < u.op_count(); ++o)
      if (up0_.test(u.index({seed.user, seed.resource, o}))) so.insert(o);
    EntitySet one(u.user_count());
    one.set(seed.user);
    add_cand_rule(one, sr, std::move(so), cc, uncov, rules);
  }
  return rules;
}

Rule Miner::add_cand_rule(const EntitySet& su, const EntitySet& sr, std::set<std::uint32_t> so,
                          std::span<const AtomicConstraint> cc, TupleSet& uncov,
                          std::vector<Rule>& rules) {
  const AttributeData& data = universe_->data();
  Rule rho{compute_uae(data, su), compute_rae(data, sr), std::move(so), {}};
  Rule gen = generalize_rule(rho, cc, uncov, rules);
  uncov -= meaning(gen);
  if (std::find(rules.begin(), rules.end(), gen) == rules.end()) rules.push_back(gen);
  return gen;
}

Rule Miner::generalize_rule(const Rule& rule, std::span<const AtomicConstraint> cc,
                            const TupleSet& uncov, std::span<const Rule> rules) {
  const TupleSet covered =
      cfg_.metric == RuleMetric::kQrulIlp ? meaning(rules) : universe_->empty_set();
  return generalize(rule, cc, uncov, covered);
}

const Bitset& Miner::constraint_pairs(const AtomicConstraint& c) {
  auto it = constraint_pairs_.find(c);
  if (it != constraint_pairs_.end()) return it->second;
  const AttributeData& data = universe_->data();
  const std::size_t nr = data.resource_count();
  Bitset pairs(data.user_count() * nr);
  for (std::size_t u = 0; u < data.user_count(); ++u)
    for (std::size_t r = 0; r < nr; ++r)
      if (satisfies_atomic(data, u, r, c)) pairs.set(u * nr + r);
  return constraint_pairs_.emplace(c, std::move(pairs)).first->second;
}

// The search visits rules that differ from `rule` only in which constraints
// of cc were added and which attributes were set to top, so states are kept
// as bit vectors (constraints, then user attributes, then resource
// attributes) and scored from per-attribute entity sets and per-constraint
// pair sets instead of building each rule.
Rule Miner::generalize(const Rule& rule, std::span<const AtomicConstraint> cc,
                       const TupleSet& uncov, const TupleSet& covered) {
  using State = std::vector<bool>;
  const Universe& u = *universe_;
  const AttributeData& data = u.data();
  const WscWeights& ww = cfg_.quality.wsc;
  const std::size_t nc = cc.size(), nu = rule.uae.size(), nra = rule.rae.size();
  const std::size_t n_users = u.user_count(), n_res = u.resource_count();

  auto conjunct_set = [&](Side side, const AttrExpr& e, std::size_t a) {
    AttrExpr single(e.size());
    single.set(a, e.conjunct(a));
    return expr_meaning(data, side, single);
  };
  auto conjunct_size = [](const AttrExpr& e, std::size_t a) {
    double n = 0;
    for (const auto& elem : e.conjunct(a)) n += static_cast<double>(elem.size());
    return n;
  };
  std::vector<EntitySet> user_sets(nu), res_sets(nra);
  std::vector<double> user_size(nu, 0.0), res_size(nra, 0.0);
  for (std::size_t a = 0; a < nu; ++a) {
    if (rule.uae.is_top(a)) continue;
    user_sets[a] = conjunct_set(Side::kUser, rule.uae, a);
    user_size[a] = conjunct_size(rule.uae, a);
  }
  for (std::size_t a = 0; a < nra; ++a) {
    if (rule.rae.is_top(a)) continue;
    res_sets[a] = conjunct_set(Side::kResource, rule.rae, a);
    res_size[a] = conjunct_size(rule.rae, a);
  }
  Bitset base_pairs = Bitset::full(n_users * n_res);
  for (const auto& c : rule.con) base_pairs &= constraint_pairs(c);
  std::vector<const Bitset*> cc_pairs;
  std::vector<bool> in_base(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    cc_pairs.push_back(&constraint_pairs(cc[i]));
    in_base[i] = rule.con.contains(cc[i]);
  }

  auto score = [&](const State& st) {
    double w = ww.w3 * static_cast<double>(rule.ops.size());
    double ncon = static_cast<double>(rule.con.size());
    EntitySet users = EntitySet::full(n_users), res = EntitySet::full(n_res);
    for (std::size_t a = 0; a < nu; ++a) {
      if (st[nc + a]) continue;
      users &= user_sets[a];
      w += ww.w1 * user_size[a];
    }
    for (std::size_t a = 0; a < nra; ++a) {
      if (st[nc + nu + a]) continue;
      res &= res_sets[a];
      w += ww.w2 * res_size[a];
    }
    Bitset pairs(n_users * n_res);
    users.for_each([&](std::size_t v) {
      res.for_each([&](std::size_t r) { pairs.set(v * n_res + r); });
    });
    pairs &= base_pairs;
    for (std::size_t i = 0; i < nc; ++i) {
      if (!st[i]) continue;
      pairs &= *cc_pairs[i];
      if (!in_base[i]) ncon += 1;
    }
    w += ww.w4 * ncon;
    TupleSet m = u.empty_set();
    if (!rule.ops.empty()) {
      pairs.for_each([&](std::size_t ur) {
        for (auto o : rule.ops) m.set(ur * u.op_count() + o);
      });
    }
    return seed_quality(m, w, uncov, covered);
  };
  auto build = [&](const State& st) {
    Rule r = rule;
    for (std::size_t i = 0; i < nc; ++i)
      if (st[i]) r.con.insert(cc[i]);
    for (std::size_t a = 0; a < nu; ++a)
      if (st[nc + a]) r.uae.set_top(a);
    for (std::size_t a = 0; a < nra; ++a)
      if (st[nc + nu + a]) r.rae.set_top(a);
    return r;
  };
  State root(nc + nu + nra, false);
  for (std::size_t a = 0; a < nu; ++a) root[nc + a] = rule.uae.is_top(a);
  for (std::size_t a = 0; a < nra; ++a) root[nc + nu + a] = rule.rae.is_top(a);

  struct Best {
    State state;
    double quality;
  };
  std::unordered_map<State, Best> memo;
  std::function<Best(const State&, std::size_t)> visit = [&](const State& st, std::size_t start) {
    if (auto it = memo.find(st); it != memo.end()) return it->second;
    Best best{st, score(st)};
    for (std::size_t i = start; i < nc; ++i) {
      State base = st;
      base[i] = true;
      State gen[3] = {base, base, base};
      gen[0][nc + cc[i].user_attr] = true;
      gen[0][nc + nu + cc[i].res_attr] = true;
      gen[1][nc + cc[i].user_attr] = true;
      gen[2][nc + nu + cc[i].res_attr] = true;
      for (std::size_t k = 0; k < 3; ++k) {
        if (std::find(gen, gen + k, gen[k]) != gen + k) continue;
        Best r = visit(gen[k], i + 1);
        if (r.quality > best.quality) best = std::move(r);
      }
    }
    memo.emplace(st, best);
    return best;
  };
  return build(visit(root, 0).state);
}

void Miner::remove_redundant(std::vector<Rule>& rules, MergeGuard guard) {
  std::vector<TupleSet> cov;
  for (const auto& r : rules)
    cov.push_back(guard == MergeGuard::kValid ? meaning(r) & up0_ : meaning(r));
  std::vector<std::size_t> order(rules.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> size(rules.size());
  std::vector<double> w(rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) {
    size[i] = cov[i].count();
    w[i] = wsc(rules[i], cfg_.quality.wsc);
  }
  // Smallest coverage first, then the most complex, so that the rule kept
  // among equal-coverage rules is the simplest one.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (size[a] != size[b]) return size[a] < size[b];
    if (w[a] != w[b]) return w[a] > w[b];
    return rules[b] < rules[a];
  });
  // Only rules holding every tuple of cov[i] can cover it, so candidates
  // come from the holders of its rarest tuple.
  std::unordered_map<std::size_t, std::vector<std::size_t>> holders;
  for (std::size_t j = 0; j < rules.size(); ++j) cov[j].for_each([&](std::size_t t) { holders[t].push_back(j); });
  std::vector<bool> alive(rules.size(), true);
  std::size_t alive_count = rules.size();
  for (std::size_t i : order) {
    if (cov[i].none()) {
      if (alive_count > 1) {
        alive[i] = false;
        --alive_count;
      }
      continue;
    }
    const std::vector<std::size_t>* pool = nullptr;
    cov[i].for_each([&](std::size_t t) {
      const auto& h = holders[t];
      if (!pool || h.size() < pool->size()) pool = &h;
    });
    for (std::size_t j : *pool) {
      if (j == i || !alive[j]) continue;
      if (cov[i].is_subset_of(cov[j])) {
        alive[i] = false;
        --alive_count;
        break;
      }
    }
  }
  std::vector<Rule> kept;
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (alive[i]) kept.push_back(std::move(rules[i]));
  rules = std::move(kept);
}

bool Miner::merge_rules(std::vector<Rule>& rules, MergeGuard guard) {
  remove_redundant(rules, guard);
  std::sort(rules.begin(), rules.end());

  struct Slot {
    Rule rule;
    TupleSet meaning;
    double wsc;
    bool alive;
  };
  std::vector<Slot> slots;
  for (auto& r : rules) {
    TupleSet m = meaning(r);
    const double w = wsc(r, cfg_.quality.wsc);
    slots.push_back({std::move(r), std::move(m), w, true});
  }
  const TupleSet target = guard == MergeGuard::kValid ? up0_ : [&] {
    TupleSet t = universe_->empty_set();
    for (const auto& s : slots) t |= s.meaning;
    return t;
  }();

  // Rules dropped as redundant are covered by the merged rule, so the
  // policy meaning after a merge is the union of all alive rules and the
  // merged one; only the WSC sum needs the redundancy mask.
  TupleSet alive_union = universe_->empty_set();
  for (const auto& s : slots) alive_union |= s.meaning;
  auto quality_with = [&](const std::vector<bool>* drop, const Slot* extra) {
    double w = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i].alive || (drop && (*drop)[i])) continue;
      w += slots[i].wsc;
    }
    if (extra) w += extra->wsc;
    const TupleSet m = extra ? alive_union | extra->meaning : alive_union;
    return q_pol(w, m, up0_, universe_->user_count(), freq_, cfg_.quality);
  };

  std::deque<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t i = 0; i < slots.size(); ++i)
    for (std::size_t j = i + 1; j < slots.size(); ++j)
      if (slots[i].rule.con == slots[j].rule.con) work.emplace_back(i, j);

  bool merged = false;
  double q_now = quality_with(nullptr, nullptr);
  while (!work.empty()) {
    const auto [a, b] = work.front();
    work.pop_front();
    if (!slots[a].alive || !slots[b].alive) continue;
    Slot mrg{merge_pair(slots[a].rule, slots[b].rule), {}, 0.0, true};
    mrg.meaning = meaning(mrg.rule);
    if (!mrg.meaning.is_subset_of(target)) continue;
    mrg.wsc = wsc(mrg.rule, cfg_.quality.wsc);
    std::vector<bool> redun(slots.size(), false);
    for (std::size_t i = 0; i < slots.size(); ++i)
      redun[i] = slots[i].alive && slots[i].meaning.is_subset_of(mrg.meaning);
    const double q_new = quality_with(&redun, &mrg);
    if (!(q_new < q_now)) continue;

    for (std::size_t i = 0; i < slots.size(); ++i)
      if (redun[i]) slots[i].alive = false;
    const std::size_t id = slots.size();
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].alive && slots[i].rule.con == mrg.rule.con) work.emplace_back(id, i);
    alive_union |= mrg.meaning;
    slots.push_back(std::move(mrg));
    q_now = q_new;
    merged = true;
  }

  rules.clear();
  for (auto& s : slots)
    if (s.alive) rules.push_back(std::move(s.rule));
  return merged;
}

Rule Miner::elim_conjuncts_helper(const Rule& rule, std::vector<TaggedAttribute> attrs,
                                  std::span<const Rule> rules, std::size_t i,
                                  const TupleSet& others) {
  std::erase_if(attrs, [&](const TaggedAttribute& ta) { return !valid(elim_attribute(rule, ta)); });
  Rule best = rule;
  double best_q = modification_quality(best, rules, i, others);
  for (std::size_t k = 0; k < attrs.size(); ++k) {
    const Rule r1 = elim_attribute(rule, attrs[k]);
    Rule r2 = elim_conjuncts_helper(
        r1, std::vector<TaggedAttribute>(attrs.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                                         attrs.end()),
        rules, i, others);
    const double q = modification_quality(r2, rules, i, others);
    if (q > best_q) {
      best = std::move(r2);
      best_q = q;
    }
  }
  return best;
}

namespace {

TupleSet others_meaning(Miner& m, std::span<const Rule> rules, std::size_t i) {
  TupleSet out = m.universe().empty_set();
  for (std::size_t j = 0; j < rules.size(); ++j)
    if (j != i) out |= m.meaning(rules[j]);
  return out;
}

}  // namespace

bool Miner::elim_conjuncts(std::vector<Rule>& rules, std::size_t i) {
  const Rule& rho = rules[i];
  auto tagged = [&](Side side) {
    std::vector<TaggedAttribute> out;
    for (auto a : expr_of(rho, side).used()) {
      TaggedAttribute ta{side, a};
      if (!cfg_.unremovable.contains(ta)) out.push_back(ta);
    }
    return out;
  };
  const TupleSet others = cfg_.metric == RuleMetric::kQrulIlp ? others_meaning(*this, rules, i)
                                                              : universe_->empty_set();
  const auto au = tagged(Side::kUser);
  const auto ar = tagged(Side::kResource);
  Rule r2;
  if (max_conjunct_size(rho.uae) >= max_conjunct_size(rho.rae)) {
    Rule r1 = elim_conjuncts_helper(rho, au, rules, i, others);
    r2 = elim_conjuncts_helper(r1, ar, rules, i, others);
  } else {
    Rule r1 = elim_conjuncts_helper(rho, ar, rules, i, others);
    r2 = elim_conjuncts_helper(r1, au, rules, i, others);
  }
  if (r2 == rules[i]) return false;
  rules[i] = std::move(r2);
  return true;
}

bool Miner::elim_elements(Rule& rule) {
  const Schema& schema = universe_->schema();
  bool changed = false;
  for (auto a : rule.uae.used()) {
    if (!schema.is_multi(Side::kUser, a)) continue;
    const Conjunct original = rule.uae.conjunct(a);
    for (const AtomSet& s0 : original) {
      AtomSet s = s0;
      for (const std::string& x : s0) {
        if (s.size() <= 1) break;
        AtomSet smaller = s;
        std::erase(smaller, x);
        Conjunct c = rule.uae.conjunct(a);
        c.erase(s);
        c.insert(smaller);
        Rule candidate = rule;
        candidate.uae.set(a, std::move(c));
        if (valid(candidate)) {
          rule = std::move(candidate);
          s = std::move(smaller);
          changed = true;
        }
      }
    }
  }
  elim_redundant_sets(schema, rule.uae);
  return changed;
}

Rule Miner::elim_constraints_helper(const Rule& rule, std::vector<AtomicConstraint> atoms,
                                    std::span<const Rule> rules, std::size_t i,
                                    const TupleSet& others) {
  auto without = [](const Rule& r, const AtomicConstraint& c) {
    Rule out = r;
    out.con.erase(c);
    return out;
  };
  std::erase_if(atoms, [&](const AtomicConstraint& c) { return !valid(without(rule, c)); });
  Rule best = rule;
  double best_q = modification_quality(best, rules, i, others);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    Rule r2 = elim_constraints_helper(
        without(rule, atoms[k]),
        std::vector<AtomicConstraint>(atoms.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                                      atoms.end()),
        rules, i, others);
    const double q = modification_quality(r2, rules, i, others);
    if (q > best_q) {
      best = std::move(r2);
      best_q = q;
    }
  }
  return best;
}

bool Miner::elim_constraints(std::vector<Rule>& rules, std::size_t i) {
  if (rules[i].con.empty()) return false;
  const TupleSet others = cfg_.metric == RuleMetric::kQrulIlp ? others_meaning(*this, rules, i)
                                                              : universe_->empty_set();
  std::vector<AtomicConstraint> atoms(rules[i].con.begin(), rules[i].con.end());
  Rule best = elim_constraints_helper(rules[i], std::move(atoms), rules, i, others);
  if (best == rules[i]) return false;
  rules[i] = std::move(best);
  return true;
}

namespace {

// rho2 grants every tuple rho grants, except possibly through the conjunct
// for (side, attr), where it is required to accept `value` instead.
bool overlaps_except(const Rule& rho, const Rule& rho2, Side side, std::size_t attr,
                     const AtomSet* value) {
  if (!attrs_subset(rho2.uae, rho.uae) || !attrs_subset(rho2.rae, rho.rae)) return false;
  if (!std::includes(rho.con.begin(), rho.con.end(), rho2.con.begin(), rho2.con.end()))
    return false;
  for (Side s : {Side::kUser, Side::kResource}) {
    const AttrExpr& e = expr_of(rho, s);
    const AttrExpr& e2 = expr_of(rho2, s);
    for (std::size_t a = 0; a < e.size(); ++a) {
      if (value && s == side && a == attr) {
        if (!e2.is_top(a) && !e2.conjunct(a).contains(*value)) return false;
        continue;
      }
      if (!conjunct_covers(e2.at(a), e.at(a))) return false;
    }
  }
  return true;
}

}  // namespace

bool Miner::elim_overlap_val(std::vector<Rule>& rules, std::vector<bool>& alive, std::size_t i) {
  bool changed = false;
  for (Side side : {Side::kUser, Side::kResource}) {
    for (auto a : expr_of(rules[i], side).used()) {
      const Conjunct values = expr_of(rules[i], side).conjunct(a);
      Conjunct kept = values;
      for (const AtomSet& v : values) {
        for (std::size_t j = 0; j < rules.size(); ++j) {
          if (j == i || !alive[j]) continue;
          const Rule& rho2 = rules[j];
          if (!std::includes(rho2.ops.begin(), rho2.ops.end(), rules[i].ops.begin(),
                             rules[i].ops.end()))
            continue;
          if (overlaps_except(rules[i], rho2, side, a, &v)) {
            kept.erase(v);
            changed = true;
            break;
          }
        }
      }
      if (kept.empty()) {
        alive[i] = false;
        return true;
      }
      if (kept.size() != values.size()) expr_of(rules[i], side).set(a, std::move(kept));
    }
  }
  return changed;
}

bool Miner::elim_overlap_op(std::vector<Rule>& rules, std::vector<bool>& alive, std::size_t i) {
  bool changed = false;
  const std::set<std::uint32_t> ops = rules[i].ops;
  for (auto o : ops) {
    for (std::size_t j = 0; j < rules.size(); ++j) {
      if (j == i || !alive[j] || !rules[j].ops.contains(o)) continue;
      if (overlaps_except(rules[i], rules[j], Side::kUser, 0, nullptr)) {
        rules[i].ops.erase(o);
        changed = true;
        break;
      }
    }
  }
  if (rules[i].ops.empty()) alive[i] = false;
  return changed;
}

bool Miner::simplify_rules(std::vector<Rule>& rules) {
  const Schema& schema = universe_->schema();
  bool changed = false;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    elim_redundant_sets(schema, rules[i].uae);
    changed |= elim_conjuncts(rules, i);
    changed |= elim_elements(rules[i]);
  }
  std::vector<bool> alive(rules.size(), true);
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (alive[i]) changed |= elim_overlap_val(rules, alive, i);
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (alive[i]) changed |= elim_overlap_op(rules, alive, i);
  std::vector<Rule> kept;
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (alive[i]) kept.push_back(std::move(rules[i]));
  rules = std::move(kept);
  for (std::size_t i = 0; i < rules.size(); ++i) changed |= elim_constraints(rules, i);
  return changed;
}

std::vector<SelectionStep> Miner::select_final_rules(std::vector<Rule> candidates) {
  if (!up0_.is_subset_of(meaning(candidates)))
    throw InternalError("candidate rules do not cover the logged permissions");
  std::vector<SelectionStep> steps;
  TupleSet uncovered = up0_;
  std::vector<std::string> text;
  for (const auto& r : candidates) text.push_back(format_rule(*universe_, r));
  std::vector<TupleSet> mean;
  std::vector<double> w;
  for (const auto& r : candidates) {
    mean.push_back(meaning(r));
    w.push_back(wsc(r, cfg_.quality.wsc));
  }
  std::vector<bool> left(candidates.size(), true);
  TupleSet covered = universe_->empty_set();
  while (uncovered.any()) {
    std::optional<std::size_t> best;
    double best_q = 0, best_w = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!left[i]) continue;
      if (!mean[i].intersects(uncovered)) {
        left[i] = false;
        continue;
      }
      const double q = seed_quality(mean[i], w[i], uncovered, covered);
      const bool better = !best || q > best_q ||
                          (q == best_q && (w[i] < best_w || (w[i] == best_w && text[i] < text[*best])));
      if (better) {
        best = i;
        best_q = q;
        best_w = w[i];
      }
    }
    if (!best) throw InternalError("selection ran out of candidate rules");
    left[*best] = false;
    steps.push_back({candidates[*best], best_q, uncovered});
    uncovered -= mean[*best];
    if (cfg_.metric == RuleMetric::kQrulIlp) covered |= mean[*best];
  }
  return steps;
}

NoiseReport Miner::detect_noise(std::span<const SelectionStep> selection,
                                const NoiseConfig& noise) {
  NoiseReport report;
  TupleSet kept_meaning = universe_->empty_set();
  TupleSet dropped_meaning = universe_->empty_set();
  for (const auto& step : selection) {
    const TupleSet m = meaning(step.rule);
    const double q =
        noise.metric == NoiseMetric::kQfreq
            ? q_freq(m, freq_)
            : q_rul_freq(m, wsc(step.rule, cfg_.quality.wsc), step.uncovered_before, up0_, freq_,
                         cfg_.quality.wo_rule);
    if (q < noise.tau) {
      report.dropped.push_back(step.rule);
      dropped_meaning |= m;
    } else {
      report.kept.push_back(step.rule);
      kept_meaning |= m;
    }
  }
  ((up0_ & dropped_meaning) - kept_meaning).for_each([&](std::size_t t) {
    report.suspected.push_back(universe_->tuple(t));
  });
  return report;
}

MiningResult Miner::mine() {
  std::vector<Rule> rules = generate_candidates();
  merge_rules(rules);
  while (simplify_rules(rules) && merge_rules(rules)) {
  }
  MiningResult result;
  result.selection = select_final_rules(std::move(rules));
  for (const auto& s : result.selection) result.rules.push_back(s.rule);
  if (cfg_.noise) {
    result.noise = detect_noise(result.selection, *cfg_.noise);
    result.rules = result.noise->kept;
  }
  return result;
}

MiningResult mine_policy(std::shared_ptr<const Universe> universe, const LogSummary& summary,
                         const MiningConfig& cfg) {
  return Miner(std::move(universe), summary, cfg).mine();
}

}  // namespace abacmine
