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

#include <algorithm>
#include <set>
#include <span>

#include "abacmine/bitset.hpp"
#include "abacmine/policy.hpp"

namespace abacmine {

/// |a ∩ b| / |a ∪ b|, with J(∅, ∅) = 1.
template <typename T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double jaccard(const Bitset& a, const Bitset& b);

/// Top is a distinguished symbol: J(top, top) = 1, J(top, S) = 0.
double conjunct_similarity(const std::optional<Conjunct>& a, const std::optional<Conjunct>& b);
/// Mean conjunct similarity over all attributes of the side.
double expr_similarity(const AttrExpr& a, const AttrExpr& b);
/// Mean of the uae, rae, operation and constraint similarities.
double rule_similarity(const Rule& a, const Rule& b);
/// Mean over rules in `a` of the similarity to the most similar rule in `b`.
double rule_set_similarity(std::span<const Rule> a, std::span<const Rule> b);

/// Throws SchemaError unless both policies share schema and operations.
double syntactic_similarity(const Policy& a, const Policy& b);
/// Jaccard similarity of the policy meanings.
double semantic_similarity(const Policy& a, const Policy& b);

struct AssignmentFractions {
  double over = 0.0;
  double under = 0.0;
};

/// Over- and under-assignments of `mined` relative to `original`, both
/// divided by the size of the mined meaning. Throws DataError if the mined
/// meaning is empty.
AssignmentFractions assignment_fractions(const Policy& original, const Policy& mined);

struct SimilarityReport {
  double syn_sim = 0.0;
  double sem_sim = 0.0;
  double over_frac = 0.0;
  double under_frac = 0.0;
};

SimilarityReport compare_policies(const Policy& original, const Policy& mined);

}  // namespace abacmine
