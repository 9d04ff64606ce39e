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

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "abacmine/bitset.hpp"
#include "abacmine/log.hpp"
#include "abacmine/miner.hpp"
#include "abacmine/policy.hpp"
#include "abacmine/quality.hpp"

namespace abacmine {

struct AuthorBounds {
  /// Maximum number of conjuncts in the uae.
  std::size_t user = 2;
  /// Maximum number of conjuncts in the rae.
  std::size_t resource = 2;
  /// Maximum number of atomic constraints.
  std::size_t constraint = 2;
  /// Maximum size of the single set in a multi-valued conjunct.
  std::size_t set_size = 1;
};

/// ⟨uae, rae, con⟩: a rule without operations.
struct Author {
  AttrExpr uae;
  AttrExpr rae;
  Constraint con;
  friend bool operator==(const Author&, const Author&) = default;
};

inline constexpr std::size_t kDefaultAuthorCap = 1'000'000;

/// Every author within the bounds, indexed without materializing them.
/// Each conjunct holds one value taken from the attribute data (an atom,
/// or for multi-valued attributes one set of at most set_size atoms); each
/// attribute occurs in at most one atomic constraint; uid and rid are not
/// used. Author i is (uae option, rae option, con option) in row-major
/// order, each option list ordered by size and then attribute and value.
class AuthorSpace {
 public:
  /// Throws DataError if the space holds more than `cap` authors.
  AuthorSpace(const AttributeData& data, const AuthorBounds& bounds,
              std::size_t cap = kDefaultAuthorCap);

  std::size_t size() const { return uae_.size() * rae_.size() * con_.size(); }
  Author author(std::size_t i) const;

  const std::vector<AttrExpr>& user_options() const { return uae_; }
  const std::vector<AttrExpr>& resource_options() const { return rae_; }
  const std::vector<Constraint>& constraint_options() const { return con_; }

 private:
  std::vector<AttrExpr> uae_;
  std::vector<AttrExpr> rae_;
  std::vector<Constraint> con_;
};

/// All authors of the space, in index order.
std::vector<Author> enumerate_authors(const AttributeData& data, const AuthorBounds& bounds,
                                      std::size_t cap = kDefaultAuthorCap);

bool author_satisfied(const AttributeData& data, const Author& a, std::size_t user,
                      std::size_t resource);
Rule author_rule(const Author& a, std::set<std::uint32_t> ops);

/// The operations performed by one user on one resource, with the
/// authors (indices into the space) that can explain them.
struct Document {
  std::size_t user = 0;
  std::size_t resource = 0;
  /// Operation indices; repeated according to multiplicity.
  std::vector<std::uint32_t> words;
  std::vector<std::size_t> authors;
};

struct Corpus {
  std::vector<Document> documents;
  /// (user, resource) pairs dropped because no author explains them.
  std::vector<std::pair<std::size_t, std::size_t>> dropped;
};

/// Smallest log length N <= cap for which every frequency times N is an
/// integer (within 1e-6); `cap` when there is none.
std::size_t reconstruct_log_length(const LogSummary& summary, std::size_t cap = 10'000);

/// One document per logged (user, resource) pair, in pair order.
Corpus build_documents(const Universe& universe, const LogSummary& summary,
                       const AuthorSpace& authors, std::size_t length_cap = 10'000);

struct AtmModel {
  std::size_t k = 0;
  /// theta[a][t]: author a's distribution over topics.
  std::vector<std::vector<double>> theta;
  /// phi[t][w]: topic t's distribution over words.
  std::vector<std::vector<double>> phi;
};

struct GibbsConfig {
  std::size_t iterations = 200;
  double alpha = 0.1;
  double beta = 0.1;
  std::uint64_t seed = 1;
};

/// Collapsed Gibbs sampling of the author-topic model. `documents` refer to
/// authors 0..author_count-1 and words 0..word_count-1. Throws DataError
/// if k is 0 or exceeds the total number of words.
AtmModel learn_atm(std::span<const Document> documents, std::size_t author_count,
                   std::size_t word_count, std::size_t k, const GibbsConfig& cfg);

/// Plain text: a header line `k authors words`, then one theta row per
/// author and one phi row per topic, whitespace separated.
std::string format_model(const AtmModel& model);
/// Rows must sum to 1 within 1e-6 and are renormalized. Throws ParseError.
AtmModel parse_model(std::string_view text);

/// For each author the AT[a] topics with the largest theta (ties to the
/// lower index), and for each of those the TW[t] most likely words; empty
/// operation sets are skipped and duplicates dropped. No merging.
std::vector<Rule> construct_rules(const AtmModel& model, std::span<const std::size_t> at,
                                  std::span<const std::size_t> tw, std::span<const Author> authors);

/// construct_rules followed by meaning-preserving merging.
std::vector<Rule> construct_abac_rules(Miner& miner, const AtmModel& model,
                                       std::span<const std::size_t> at,
                                       std::span<const std::size_t> tw,
                                       std::span<const Author> authors);

/// merge_rules with the meaning-preservation guard.
void merge_rules_gen(Miner& miner, std::vector<Rule>& rules);

/// The quality used by the generative miner. Without an under-assignment
/// term the empty policy would be optimal, so a non-positive wu is replaced
/// by 10 * logged_tuples: an average-frequency tuple then costs 10.
QualityConfig atm_quality(QualityConfig cfg, std::size_t logged_tuples);

struct AnnealConfig {
  /// Iterations run while i <= max_iter, i counting from 0.
  std::size_t max_iter = 50;
  double t0 = 10.0;
  double gamma = 0.9;
  std::size_t epsilon = 1;
  std::uint64_t seed = 1;
  /// Return the state reached at the end instead of the best one seen.
  bool return_final = false;
};

struct DiscretizeResult {
  std::vector<Rule> rules;
  std::vector<std::size_t> at;
  std::vector<std::size_t> tw;
  /// Q_pol of the unmerged rule sets of the initial and returned states.
  double initial_quality = 0.0;
  double quality = 0.0;
  std::size_t iterations = 0;
};

/// Annealing search over AT and TW from a random start. Every author and
/// topic proposal is scored against the same state and accepted updates
/// are applied together at the end of an iteration. Proposals are scored by Q_pol (with
/// atm_quality's under-assignment term) of the constructed rule set before
/// merging; the returned rules are merged.
/// Throws std::invalid_argument on max_iter = 0, t0 <= 0 or gamma outside
/// (0, 1).
DiscretizeResult discretize(Miner& miner, const AtmModel& model, std::span<const Author> authors,
                            const AnnealConfig& cfg);

struct AtmConfig {
  AuthorBounds bounds;
  std::size_t author_cap = kDefaultAuthorCap;
  std::size_t log_length_cap = 10'000;
  /// Topic count; 0 searches k = 1, 2, ...
  std::size_t k = 0;
  /// The search stops once Q_pol improves by less than this.
  double k_threshold = 1.0;
  std::size_t max_k = 8;
  GibbsConfig gibbs;
  AnnealConfig anneal;
  QualityConfig quality;
  /// Bypasses learning. Must be indexed by the active authors.
  std::shared_ptr<const AtmModel> model;
};

struct AtmResult {
  std::vector<Rule> rules;
  std::size_t k = 0;
  double quality = 0.0;
  AtmModel model;
  /// Authors explaining at least one document, in space order. Model rows
  /// follow this order.
  std::vector<Author> authors;
  std::size_t author_space_size = 0;
  Corpus corpus;
  /// Q_pol per topic count tried, for k = 1, 2, ... (one entry when k is fixed).
  std::vector<double> k_quality;
};

/// Enumerates authors, builds documents, keeps the authors that explain
/// some document, then learns and discretizes for the configured k or
/// searches k. Throws DataError on an empty summary or an oversized
/// author space.
AtmResult mine_atm(std::shared_ptr<const Universe> universe, const LogSummary& summary,
                   const AtmConfig& cfg);

}  // namespace abacmine
