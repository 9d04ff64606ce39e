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
#include <memory>
#include <random>
#include <vector>

#include "abacmine/log.hpp"
#include "abacmine/policy.hpp"

namespace abacmine {

using Rng = std::mt19937_64;

struct SynthPolicyConfig {
  std::size_t n_rules = 10;
  std::size_t users_per_rule = 5;
  std::size_t resources_per_rule = 5;
  std::size_t user_single_attrs = 3;
  std::size_t user_multi_attrs = 2;
  std::size_t res_single_attrs = 3;
  std::size_t res_multi_attrs = 1;
  /// Size of the value domain shared by all attributes.
  std::size_t values = 8;
  std::size_t operations = 4;
  std::uint64_t seed = 1;
};

/// Generates rules first, then attribute data for users and resources
/// built to satisfy them, so that every rule grants at least one tuple.
Policy gen_synthetic_policy(const SynthPolicyConfig& cfg);

/// Ratio between the most and least likely item of each kind.
struct GenRatios {
  double rule = 25.0;
  double user = 3.0;
  double resource = 25.0;
  double op = 3.0;
};

/// P_rule over rule positions, P_user, P_res and P'_op over entity and
/// operation indices.
struct GenDistributions {
  std::vector<double> rule;
  std::vector<double> user;
  std::vector<double> resource;
  std::vector<double> op;
};

/// n masses interpolated geometrically between 1 and `ratio`, normalized
/// and assigned to items in a random order.
std::vector<double> ratio_distribution(std::size_t n, double ratio, Rng& rng);

GenDistributions make_distributions(const Policy& policy, const GenRatios& ratios, Rng& rng);

/// P_ur(·|rule) keyed by pair index u * |R| + r, and P_op(·|rule) keyed by
/// operation index; both restricted to the rule and renormalized.
struct ConditionalDists {
  std::vector<std::pair<std::size_t, double>> ur;
  std::vector<std::pair<std::uint32_t, double>> op;
};

/// Throws DataError if the rule grants nothing or carries no mass.
ConditionalDists derive_conditional_dists(const Universe& universe, const GenDistributions& d,
                                          const Rule& rule);

/// round-half-up(completeness * meaning_size).
std::size_t target_support_size(double completeness, std::size_t meaning_size);

/// Samples entries rule -> operation -> (user, resource) until the log's
/// distinct tuples reach the target completeness. Timestamps are entry
/// indices. Throws DataError after `max_entries` entries.
std::vector<LogEntry> gen_log(const Policy& policy, const GenDistributions& d,
                              double completeness, Rng& rng, std::size_t max_entries = 10'000'000);

/// Exactly `n` entries sampled the same way, regardless of completeness.
std::vector<LogEntry> gen_log_entries(const Policy& policy, const GenDistributions& d,
                                      std::size_t n, Rng& rng);

/// Asymptotic frequencies of an infinitely long generated log.
LogSummary gen_log_summary(const Policy& policy, const GenDistributions& d);

/// Keeps `target` tuples drawn without replacement with probability
/// proportional to frequency, then renormalizes.
LogSummary reduce_summary(const LogSummary& summary, std::size_t target, Rng& rng);

/// Summary at the given completeness: the full summary, reduced when
/// completeness < 1.
LogSummary gen_log_summary(const Policy& policy, const GenDistributions& d, double completeness,
                           Rng& rng);

/// Nested summaries for decreasing completeness levels: each one is
/// reduced from the previous (higher) one. Levels are returned in the
/// order given; they are processed from highest to lowest.
std::vector<LogSummary> gen_summary_series(const Policy& policy, const GenDistributions& d,
                                           std::vector<double> levels, Rng& rng);

}  // namespace abacmine
