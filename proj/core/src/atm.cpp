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

#include "abacmine/atm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "abacmine/error.hpp"
#include "abacmine/semantics.hpp"

namespace abacmine {

namespace {

using Rng = std::mt19937_64;

// Conjunct choices for one attribute.
std::vector<Conjunct> value_options(const AttributeData& data, Side side, std::size_t a,
                                    std::size_t set_size) {
  std::vector<Conjunct> out;
  const Schema& schema = data.schema();
  if (!schema.is_multi(side, a)) {
    for (const auto& v : data.vocabulary(side, a)) out.push_back(Conjunct{AtomSet{v}});
    return out;
  }
  if (side == Side::kResource) {
    std::set<AtomSet> seen;
    for (std::size_t e = 0; e < data.count(side); ++e) {
      const AttributeValue& v = data.value(side, e, a);
      if (v.is_set() && v.as_set().size() <= set_size) seen.insert(v.as_set());
    }
    for (const auto& s : seen) out.push_back(Conjunct{s});
    return out;
  }
  // User multi-valued: subsets of the vocabulary of size 1..set_size.
  const AtomSet vocab = data.vocabulary(side, a);
  AtomSet cur;
  auto rec = [&](auto&& self, std::size_t from, std::size_t size) -> void {
    if (cur.size() == size) {
      out.push_back(Conjunct{cur});
      return;
    }
    for (std::size_t i = from; i < vocab.size(); ++i) {
      cur.push_back(vocab[i]);
      self(self, i + 1, size);
      cur.pop_back();
    }
  };
  for (std::size_t s = 1; s <= set_size; ++s) rec(rec, 0, s);
  return out;
}

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw DataError("author space exceeds the cap of " + std::to_string(cap) +
                    " authors; lower the bounds");
}

std::vector<AttrExpr> expr_options(const AttributeData& data, Side side, std::size_t bound,
                                   std::size_t set_size, std::size_t cap) {
  const Schema& schema = data.schema();
  const std::size_t id = schema.id_attribute(side);
  std::vector<std::size_t> attrs;
  std::vector<std::vector<Conjunct>> values;
  for (std::size_t a = 0; a < schema.size(side); ++a) {
    if (a == id) continue;
    attrs.push_back(a);
    values.push_back(value_options(data, side, a, set_size));
  }
  std::vector<AttrExpr> out;
  AttrExpr cur(schema.size(side));
  std::vector<std::size_t> chosen;
  auto fill = [&](auto&& self, std::size_t pos) -> void {
    if (pos == chosen.size()) {
      out.push_back(cur);
      check_cap(out.size(), cap);
      return;
    }
    for (const auto& c : values[chosen[pos]]) {
      cur.set(attrs[chosen[pos]], c);
      self(self, pos + 1);
    }
    cur.set_top(attrs[chosen[pos]]);
  };
  auto choose = [&](auto&& self, std::size_t from, std::size_t size) -> void {
    if (chosen.size() == size) {
      fill(fill, 0);
      return;
    }
    for (std::size_t i = from; i < attrs.size(); ++i) {
      chosen.push_back(i);
      self(self, i + 1, size);
      chosen.pop_back();
    }
  };
  for (std::size_t s = 0; s <= std::min(bound, attrs.size()); ++s) choose(choose, 0, s);
  return out;
}

std::vector<Constraint> atomic_combinations(const Schema& schema, std::size_t bound,
                                           std::size_t cap) {
  std::vector<AtomicConstraint> atoms;
  const std::size_t uid = schema.id_attribute(Side::kUser);
  const std::size_t rid = schema.id_attribute(Side::kResource);
  for (std::size_t ua = 0; ua < schema.size(Side::kUser); ++ua) {
    if (ua == uid) continue;
    for (std::size_t ra = 0; ra < schema.size(Side::kResource); ++ra) {
      if (ra == rid) continue;
      const bool um = schema.is_multi(Side::kUser, ua);
      const bool rm = schema.is_multi(Side::kResource, ra);
      if (um && rm) atoms.push_back({AtomicConstraint::Kind::kSupersetEq, ua, ra});
      else if (um) atoms.push_back({AtomicConstraint::Kind::kContains, ua, ra});
      else if (!rm) atoms.push_back({AtomicConstraint::Kind::kEqual, ua, ra});
    }
  }
  std::sort(atoms.begin(), atoms.end());
  std::vector<Constraint> out;
  std::vector<std::size_t> chosen;
  auto choose = [&](auto&& self, std::size_t from, std::size_t size) -> void {
    if (chosen.size() == size) {
      Constraint c;
      for (auto i : chosen) c.insert(atoms[i]);
      out.push_back(std::move(c));
      check_cap(out.size(), cap);
      return;
    }
    for (std::size_t i = from; i < atoms.size(); ++i) {
      const bool clash = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t j) {
        return atoms[j].user_attr == atoms[i].user_attr || atoms[j].res_attr == atoms[i].res_attr;
      });
      if (clash) continue;
      chosen.push_back(i);
      self(self, i + 1, size);
      chosen.pop_back();
    }
  };
  for (std::size_t s = 0; s <= std::min(bound, atoms.size()); ++s) choose(choose, 0, s);
  return out;
}

}  // namespace

AuthorSpace::AuthorSpace(const AttributeData& data, const AuthorBounds& bounds, std::size_t cap)
    : uae_(expr_options(data, Side::kUser, bounds.user, bounds.set_size, cap)),
      rae_(expr_options(data, Side::kResource, bounds.resource, bounds.set_size, cap)),
      con_(atomic_combinations(data.schema(), bounds.constraint, cap)) {
  const double n = static_cast<double>(uae_.size()) * static_cast<double>(rae_.size()) *
                   static_cast<double>(con_.size());
  if (n > static_cast<double>(cap))
    throw DataError("author space of " + std::to_string(static_cast<std::uint64_t>(n)) +
                    " authors exceeds the cap of " + std::to_string(cap) +
                    "; lower the bounds");
}

Author AuthorSpace::author(std::size_t i) const {
  const std::size_t nc = con_.size(), nr = rae_.size();
  return {uae_[i / (nr * nc)], rae_[(i / nc) % nr], con_[i % nc]};
}

std::vector<Author> enumerate_authors(const AttributeData& data, const AuthorBounds& bounds,
                                      std::size_t cap) {
  const AuthorSpace space(data, bounds, cap);
  std::vector<Author> out;
  out.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) out.push_back(space.author(i));
  return out;
}

bool author_satisfied(const AttributeData& data, const Author& a, std::size_t user,
                      std::size_t resource) {
  return satisfies_uae(data, user, a.uae) && satisfies_rae(data, resource, a.rae) &&
         satisfies_constraint(data, user, resource, a.con);
}

Rule author_rule(const Author& a, std::set<std::uint32_t> ops) {
  return {a.uae, a.rae, std::move(ops), a.con};
}

std::size_t reconstruct_log_length(const LogSummary& summary, std::size_t cap) {
  for (std::size_t n = 1; n <= cap; ++n) {
    const double dn = static_cast<double>(n);
    const bool integral = std::all_of(summary.entries().begin(), summary.entries().end(),
                                      [&](const auto& e) {
                                        const double x = e.second * dn;
                                        return std::abs(x - std::round(x)) <= 1e-6;
                                      });
    if (integral) return n;
  }
  return cap;
}

Corpus build_documents(const Universe& universe, const LogSummary& summary,
                       const AuthorSpace& authors, std::size_t length_cap) {
  Corpus corpus;
  if (summary.empty()) return corpus;
  const AttributeData& data = universe.data();
  const double n = static_cast<double>(reconstruct_log_length(summary, length_cap));

  std::vector<Document> docs;
  for (const auto& [t, f] : summary.entries()) {
    if (docs.empty() || docs.back().user != t.user || docs.back().resource != t.resource)
      docs.push_back({t.user, t.resource, {}, {}});
    const auto m = std::max<long long>(1, std::llround(f * n));
    docs.back().words.insert(docs.back().words.end(), static_cast<std::size_t>(m), t.op);
  }

  // Documents matched by each option, then by each author.
  const std::size_t nd = docs.size();
  auto doc_masks = [&](Side side, const std::vector<AttrExpr>& options) {
    std::vector<Bitset> masks;
    for (const auto& e : options) {
      const EntitySet ents = expr_meaning(data, side, e);
      Bitset m(nd);
      for (std::size_t d = 0; d < nd; ++d)
        if (ents.test(side == Side::kUser ? docs[d].user : docs[d].resource)) m.set(d);
      masks.push_back(std::move(m));
    }
    return masks;
  };
  const auto umask = doc_masks(Side::kUser, authors.user_options());
  const auto rmask = doc_masks(Side::kResource, authors.resource_options());
  std::vector<Bitset> cmask;
  for (const auto& c : authors.constraint_options()) {
    Bitset m(nd);
    for (std::size_t d = 0; d < nd; ++d)
      if (satisfies_constraint(data, docs[d].user, docs[d].resource, c)) m.set(d);
    cmask.push_back(std::move(m));
  }
  const std::size_t nr = rmask.size(), nc = cmask.size();
  for (std::size_t iu = 0; iu < umask.size(); ++iu) {
    if (umask[iu].none()) continue;
    for (std::size_t ir = 0; ir < nr; ++ir) {
      const Bitset ur = umask[iu] & rmask[ir];
      if (ur.none()) continue;
      for (std::size_t ic = 0; ic < nc; ++ic) {
        const std::size_t id = (iu * nr + ir) * nc + ic;
        (ur & cmask[ic]).for_each([&](std::size_t d) { docs[d].authors.push_back(id); });
      }
    }
  }
  for (auto& d : docs) {
    if (d.authors.empty()) {
      corpus.dropped.emplace_back(d.user, d.resource);
      std::fprintf(stderr, "warning: no author explains user %s on resource %s; dropped\n",
                   data.id(Side::kUser, d.user).c_str(), data.id(Side::kResource, d.resource).c_str());
    } else {
      corpus.documents.push_back(std::move(d));
    }
  }
  return corpus;
}

AtmModel learn_atm(std::span<const Document> documents, std::size_t author_count,
                   std::size_t word_count, std::size_t k, const GibbsConfig& cfg) {
  std::size_t total = 0;
  for (const auto& d : documents) total += d.words.size();
  if (k == 0) throw DataError("topic count must be at least 1");
  if (k > total)
    throw DataError("topic count " + std::to_string(k) + " exceeds the " + std::to_string(total) +
                    " words of the corpus");
  const double alpha = cfg.alpha, beta = cfg.beta;
  const double ka = static_cast<double>(k) * alpha, wb = static_cast<double>(word_count) * beta;

  std::vector<double> cat(author_count * k, 0), ca(author_count, 0), ctw(k * word_count, 0),
      ct(k, 0);
  struct Token {
    std::uint32_t word;
    std::size_t doc, author, topic;
  };
  std::vector<Token> tokens;
  tokens.reserve(total);
  Rng rng(cfg.seed);
  for (std::size_t di = 0; di < documents.size(); ++di) {
    const auto& d = documents[di];
    for (auto w : d.words) {
      if (w >= word_count) throw DataError("word index out of range");
      const std::size_t a =
          d.authors[std::uniform_int_distribution<std::size_t>(0, d.authors.size() - 1)(rng)];
      if (a >= author_count) throw DataError("author index out of range");
      const std::size_t t = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
      tokens.push_back({w, di, a, t});
      ++cat[a * k + t], ++ca[a], ++ctw[t * word_count + w], ++ct[t];
    }
  }

  std::vector<double> weights;
  std::vector<double> topic_factor(k);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (auto& tok : tokens) {
      --cat[tok.author * k + tok.topic], --ca[tok.author];
      --ctw[tok.topic * word_count + tok.word], --ct[tok.topic];
      for (std::size_t t = 0; t < k; ++t)
        topic_factor[t] = (ctw[t * word_count + tok.word] + beta) / (ct[t] + wb);
      const auto& authors = documents[tok.doc].authors;
      weights.resize(authors.size() * k);
      double sum = 0;
      for (std::size_t i = 0; i < authors.size(); ++i) {
        const std::size_t a = authors[i];
        const double inv = 1.0 / (ca[a] + ka);
        for (std::size_t t = 0; t < k; ++t) {
          sum += (cat[a * k + t] + alpha) * inv * topic_factor[t];
          weights[i * k + t] = sum;
        }
      }
      const double x = unit(rng) * sum;
      const std::size_t pick = std::min<std::size_t>(
          static_cast<std::size_t>(std::upper_bound(weights.begin(), weights.end(), x) -
                                   weights.begin()),
          weights.size() - 1);
      tok.author = authors[pick / k];
      tok.topic = pick % k;
      ++cat[tok.author * k + tok.topic], ++ca[tok.author];
      ++ctw[tok.topic * word_count + tok.word], ++ct[tok.topic];
    }
  }

  AtmModel m;
  m.k = k;
  m.theta.assign(author_count, std::vector<double>(k));
  for (std::size_t a = 0; a < author_count; ++a)
    for (std::size_t t = 0; t < k; ++t) m.theta[a][t] = (cat[a * k + t] + alpha) / (ca[a] + ka);
  m.phi.assign(k, std::vector<double>(word_count));
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t w = 0; w < word_count; ++w)
      m.phi[t][w] = (ctw[t * word_count + w] + beta) / (ct[t] + wb);
  return m;
}

std::string format_model(const AtmModel& model) {
  std::string out;
  char buf[32];
  const std::size_t words = model.phi.empty() ? 0 : model.phi.front().size();
  out += std::to_string(model.k) + " " + std::to_string(model.theta.size()) + " " +
         std::to_string(words) + "\n";
  auto rows = [&](const std::vector<std::vector<double>>& m) {
    for (const auto& row : m) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", row[i]);
        out += (i ? " " : "") + std::string(buf);
      }
      out += "\n";
    }
  };
  rows(model.theta);
  rows(model.phi);
  return out;
}

AtmModel parse_model(std::string_view text) {
  std::vector<std::vector<double>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  std::vector<int> numbers;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    std::vector<double> row;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      double v = 0;
      const auto [p, ec] = std::from_chars(line.data() + i, line.data() + line.size(), v);
      if (ec != std::errc() || v < 0 || !std::isfinite(v))
        throw ParseError("expected a non-negative number", line_no, static_cast<int>(i) + 1);
      row.push_back(v);
      i = static_cast<std::size_t>(p - line.data());
    }
    if (!row.empty()) {
      lines.push_back(std::move(row));
      numbers.push_back(line_no);
    }
  }
  if (lines.empty() || lines[0].size() != 3) throw ParseError("expected `k authors words`", 1, 1);
  const auto k = static_cast<std::size_t>(lines[0][0]);
  const auto na = static_cast<std::size_t>(lines[0][1]);
  const auto nw = static_cast<std::size_t>(lines[0][2]);
  if (k == 0 || lines.size() != 1 + na + k)
    throw ParseError("expected " + std::to_string(na + k) + " probability rows", numbers[0], 1);
  auto take = [&](std::size_t first, std::size_t count, std::size_t width) {
    std::vector<std::vector<double>> m;
    for (std::size_t r = first; r < first + count; ++r) {
      auto row = lines[r];
      if (row.size() != width)
        throw ParseError("expected " + std::to_string(width) + " values", numbers[r], 1);
      const double s = std::accumulate(row.begin(), row.end(), 0.0);
      if (std::abs(s - 1.0) > 1e-6) throw ParseError("row does not sum to 1", numbers[r], 1);
      for (auto& x : row) x /= s;
      m.push_back(std::move(row));
    }
    return m;
  };
  AtmModel m;
  m.k = k;
  m.theta = take(1, na, k);
  m.phi = take(1 + na, k, nw);
  return m;
}

namespace {

// Indices of the n largest entries, ties to the lower index.
std::vector<std::size_t> top_n(const std::vector<double>& v, std::size_t n) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  idx.resize(std::min(n, idx.size()));
  return idx;
}

void check_dimensions(const AtmModel& model, std::size_t authors) {
  if (model.theta.size() != authors) throw DataError("model does not match the author count");
  if (model.phi.size() != model.k) throw DataError("model does not match its topic count");
}

}  // namespace

std::vector<Rule> construct_rules(const AtmModel& model, std::span<const std::size_t> at,
                                  std::span<const std::size_t> tw, std::span<const Author> authors) {
  check_dimensions(model, authors.size());
  std::vector<std::set<std::uint32_t>> words;
  for (std::size_t t = 0; t < model.k; ++t) {
    std::set<std::uint32_t> o;
    for (auto w : top_n(model.phi[t], tw[t])) o.insert(static_cast<std::uint32_t>(w));
    words.push_back(std::move(o));
  }
  std::vector<Rule> rules;
  std::set<Rule> seen;
  for (std::size_t a = 0; a < authors.size(); ++a) {
    for (auto t : top_n(model.theta[a], at[a])) {
      if (words[t].empty()) continue;
      Rule r = author_rule(authors[a], words[t]);
      if (seen.insert(r).second) rules.push_back(std::move(r));
    }
  }
  return rules;
}

void merge_rules_gen(Miner& miner, std::vector<Rule>& rules) {
  miner.merge_rules(rules, Miner::MergeGuard::kPreserveMeaning);
}

std::vector<Rule> construct_abac_rules(Miner& miner, const AtmModel& model,
                                       std::span<const std::size_t> at,
                                       std::span<const std::size_t> tw,
                                       std::span<const Author> authors) {
  std::vector<Rule> rules = construct_rules(model, at, tw, authors);
  merge_rules_gen(miner, rules);
  return rules;
}

QualityConfig atm_quality(QualityConfig cfg, std::size_t logged_tuples) {
  if (cfg.wu <= 0) cfg.wu = 10.0 * static_cast<double>(logged_tuples);
  return cfg;
}

namespace {

// Q_pol of the unmerged rule set for a given (AT, TW), computed from
// per-author pair lists without building rules. A state keeps, for every
// (operation, pair), the number of authors granting it, so that changing
// one author's AT is scored in time linear in that author's meaning.
class PolicyScorer {
 public:
  PolicyScorer(Miner& miner, const AtmModel& model, std::span<const Author> authors)
      : k_(model.k), nw_(miner.universe().op_count()) {
    const Universe& u = miner.universe();
    const QualityConfig q = atm_quality(miner.config().quality, miner.up0().count());
    wo_ = q.wo;
    wu_ = q.wu;
    w_ops_ = q.wsc.w3;
    users_ = static_cast<double>(u.user_count());
    npairs_ = u.user_count() * u.resource_count();
    for (std::size_t a = 0; a < authors.size(); ++a) {
      const Author& au = authors[a];
      std::vector<std::uint32_t> list;
      pair_meaning(u.data(), au.uae, au.rae, au.con).for_each(
          [&](std::size_t p) { list.push_back(static_cast<std::uint32_t>(p)); });
      pairs_.push_back(std::move(list));
      base_.push_back(q.wsc.w1 * wsc(au.uae) + q.wsc.w2 * wsc(au.rae) +
                      q.wsc.w4 * static_cast<double>(au.con.size()));
      topics_.push_back(top_n(model.theta[a], k_));
    }
    freq_.assign(nw_ * npairs_, 0.0);
    logged_.assign(nw_ * npairs_, 0);
    miner.up0().for_each([&](std::size_t i) {
      const UPTuple t = u.tuple(i);
      const std::size_t p = static_cast<std::size_t>(t.user) * u.resource_count() + t.resource;
      logged_[t.op * npairs_ + p] = 1;
      freq_[t.op * npairs_ + p] = miner.frequencies()[i];
    });
    for (std::size_t t = 0; t < k_; ++t) words_.push_back(top_n(model.phi[t], nw_));
  }

  double score(const std::vector<std::size_t>& at, const std::vector<std::size_t>& tw) const {
    State st;
    load(st, at, tw);
    return st.q;
  }

  // Makes (at, tw) the state that author proposals are scored against.
  void reset(const std::vector<std::size_t>& at, const std::vector<std::size_t>& tw) {
    load(cur_, at, tw);
  }
  double quality() const { return cur_.q; }

  // Q_pol after changing AT[a] to n in the current state.
  double with_author(std::size_t a, std::size_t n) const {
    double size = 0;
    const std::vector<std::uint32_t> ops = author_ops(a, n, cur_.topic_ops, size);
    const std::vector<std::uint32_t>& old = cur_.ops[a];
    double over = cur_.over, under = cur_.under;
    for (auto o : old) {
      if (std::binary_search(ops.begin(), ops.end(), o)) continue;
      for (auto p : pairs_[a]) {
        const std::size_t i = o * npairs_ + p;
        if (cur_.count[i] != 1) continue;
        if (logged_[i]) under += freq_[i];
        else over -= 1;
      }
    }
    for (auto o : ops) {
      if (std::binary_search(old.begin(), old.end(), o)) continue;
      for (auto p : pairs_[a]) {
        const std::size_t i = o * npairs_ + p;
        if (cur_.count[i] != 0) continue;
        if (logged_[i]) under -= freq_[i];
        else over += 1;
      }
    }
    return total(cur_.size - cur_.sizes[a] + size, over, under);
  }

 private:
  struct State {
    std::vector<std::vector<std::uint32_t>> topic_ops;
    std::vector<std::vector<std::uint32_t>> ops;
    std::vector<double> sizes;
    std::vector<std::uint32_t> count;
    double size = 0, over = 0, under = 0, q = 0;
  };

  double total(double size, double over, double under) const {
    return size + (users_ > 0 ? wo_ * over / users_ : 0.0) + wu_ * std::max(0.0, under);
  }

  // Operations granted by author a with n topics, and the WSC of its rules.
  std::vector<std::uint32_t> author_ops(std::size_t a, std::size_t n,
                                        const std::vector<std::vector<std::uint32_t>>& topic_ops,
                                        double& size) const {
    std::vector<std::uint32_t> ops;
    std::vector<std::size_t> seen;
    size = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t t = topics_[a][i];
      const auto& o = topic_ops[t];
      if (o.empty()) continue;
      // Topics with equal operation sets yield the same rule.
      if (std::any_of(seen.begin(), seen.end(), [&](std::size_t s) { return topic_ops[s] == o; }))
        continue;
      seen.push_back(t);
      size += base_[a] + w_ops_ * static_cast<double>(o.size());
      ops.insert(ops.end(), o.begin(), o.end());
    }
    std::sort(ops.begin(), ops.end());
    ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
    return ops;
  }

  void load(State& st, const std::vector<std::size_t>& at,
            const std::vector<std::size_t>& tw) const {
    st.topic_ops.assign(k_, {});
    for (std::size_t t = 0; t < k_; ++t) {
      for (std::size_t i = 0; i < tw[t]; ++i)
        st.topic_ops[t].push_back(static_cast<std::uint32_t>(words_[t][i]));
      std::sort(st.topic_ops[t].begin(), st.topic_ops[t].end());
    }
    st.ops.assign(pairs_.size(), {});
    st.sizes.assign(pairs_.size(), 0.0);
    st.count.assign(nw_ * npairs_, 0);
    st.size = 0;
    for (std::size_t a = 0; a < pairs_.size(); ++a) {
      st.ops[a] = author_ops(a, at[a], st.topic_ops, st.sizes[a]);
      st.size += st.sizes[a];
      for (auto o : st.ops[a])
        for (auto p : pairs_[a]) ++st.count[o * npairs_ + p];
    }
    st.over = 0;
    st.under = 0;
    for (std::size_t i = 0; i < st.count.size(); ++i) {
      if (logged_[i] && st.count[i] == 0) st.under += freq_[i];
      if (!logged_[i] && st.count[i] > 0) st.over += 1;
    }
    st.q = total(st.size, st.over, st.under);
  }

  std::size_t k_, nw_, npairs_ = 0;
  double wo_ = 0, wu_ = 0, w_ops_ = 1, users_ = 0;
  std::vector<std::vector<std::uint32_t>> pairs_;
  std::vector<double> base_;
  std::vector<std::vector<std::size_t>> topics_;
  std::vector<std::vector<std::size_t>> words_;
  std::vector<std::uint8_t> logged_;
  std::vector<double> freq_;
  State cur_;
};

}  // namespace

DiscretizeResult discretize(Miner& miner, const AtmModel& model, std::span<const Author> authors,
                            const AnnealConfig& cfg) {
  if (cfg.max_iter == 0) throw std::invalid_argument("max_iter must be at least 1");
  if (!(cfg.t0 > 0)) throw std::invalid_argument("t0 must be positive");
  if (!(cfg.gamma > 0 && cfg.gamma < 1)) throw std::invalid_argument("gamma must be in (0, 1)");
  check_dimensions(model, authors.size());
  const std::size_t k = model.k, nw = miner.universe().op_count();
  for (const auto& row : model.phi)
    if (row.size() != nw) throw DataError("model word count does not match the operations");

  PolicyScorer scorer(miner, model, authors);
  Rng rng(cfg.seed);
  auto rand_in = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::size_t> at(authors.size()), tw(k);
  for (auto& x : at) x = rand_in(0, k);
  for (auto& x : tw) x = rand_in(0, nw);

  scorer.reset(at, tw);
  double q = scorer.quality();
  DiscretizeResult res;
  res.initial_quality = q;
  std::vector<std::size_t> best_at = at, best_tw = tw;
  double best_q = q;
  double temp = cfg.t0;
  auto accept = [&](double q_new) {
    if (q_new < q) return true;
    return unit(rng) < std::exp(-(q_new - q) / temp);
  };
  const std::size_t eps = cfg.epsilon;
  std::size_t iter = 0;
  while (iter <= cfg.max_iter) {
    ++iter;
    std::vector<std::size_t> at_tmp = at, tw_tmp = tw;
    for (std::size_t a = 0; a < at.size(); ++a) {
      const std::size_t n = rand_in(at[a] >= eps ? at[a] - eps : 0, std::min(k, at[a] + eps));
      if (n == at[a]) continue;
      if (accept(scorer.with_author(a, n))) at_tmp[a] = n;
    }
    for (std::size_t t = 0; t < k; ++t) {
      auto prop = tw;
      prop[t] = rand_in(tw[t] >= eps ? tw[t] - eps : 0, std::min(nw, tw[t] + eps));
      if (prop[t] == tw[t]) continue;
      if (accept(scorer.score(at, prop))) tw_tmp[t] = prop[t];
    }
    const bool converged = at_tmp == at && tw_tmp == tw;
    at = std::move(at_tmp);
    tw = std::move(tw_tmp);
    scorer.reset(at, tw);
    q = scorer.quality();
    if (q < best_q) {
      best_q = q;
      best_at = at;
      best_tw = tw;
    }
    temp *= cfg.gamma;
    if (converged) break;
  }
  res.iterations = iter;
  if (!cfg.return_final) {
    at = best_at;
    tw = best_tw;
    q = best_q;
  }
  res.quality = q;
  res.rules = construct_abac_rules(miner, model, at, tw, authors);
  res.at = std::move(at);
  res.tw = std::move(tw);
  return res;
}

AtmResult mine_atm(std::shared_ptr<const Universe> universe, const LogSummary& summary,
                   const AtmConfig& cfg) {
  if (summary.empty()) throw DataError("empty log summary");
  const AuthorSpace space(universe->data(), cfg.bounds, cfg.author_cap);
  AtmResult res;
  res.author_space_size = space.size();
  res.corpus = build_documents(*universe, summary, space, cfg.log_length_cap);
  if (res.corpus.documents.empty()) throw DataError("no document has an eligible author");

  std::vector<std::size_t> active;
  for (const auto& d : res.corpus.documents) active.insert(active.end(), d.authors.begin(), d.authors.end());
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  for (auto& d : res.corpus.documents)
    for (auto& a : d.authors)
      a = static_cast<std::size_t>(std::lower_bound(active.begin(), active.end(), a) - active.begin());
  for (auto i : active) res.authors.push_back(space.author(i));

  MiningConfig mcfg;
  mcfg.quality = atm_quality(cfg.quality, summary.size());
  Miner miner(universe, summary, mcfg);
  const std::size_t nw = universe->op_count();
  std::size_t total_words = 0;
  for (const auto& d : res.corpus.documents) total_words += d.words.size();

  auto run = [&](std::size_t k) {
    AtmResult r;
    r.k = k;
    r.model = cfg.model ? *cfg.model : learn_atm(res.corpus.documents, res.authors.size(), nw, k, cfg.gibbs);
    if (r.model.k != k) throw DataError("loaded model has a different topic count");
    const DiscretizeResult d = discretize(miner, r.model, res.authors, cfg.anneal);
    r.rules = d.rules;
    r.quality = miner.policy_quality(r.rules);
    return r;
  };

  AtmResult best;
  if (cfg.k != 0 || cfg.model) {
    best = run(cfg.model ? cfg.model->k : cfg.k);
    res.k_quality.push_back(best.quality);
  } else {
    if (!(cfg.k_threshold > 0)) throw std::invalid_argument("k threshold must be positive");
    double prev = std::numeric_limits<double>::infinity();
    bool have = false;
    for (std::size_t k = 1; k <= std::max<std::size_t>(1, cfg.max_k) && k <= total_words; ++k) {
      AtmResult r = run(k);
      const double q = r.quality;
      res.k_quality.push_back(q);
      if (!have || q < best.quality) {
        best = std::move(r);
        have = true;
      }
      if (k > 1 && prev - q < cfg.k_threshold) break;
      prev = std::min(prev, q);
    }
  }
  res.rules = std::move(best.rules);
  res.k = best.k;
  res.quality = best.quality;
  res.model = std::move(best.model);
  return res;
}

}  // namespace abacmine
