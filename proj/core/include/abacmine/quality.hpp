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

#include <cstddef>
#include <span>

#include "abacmine/bitset.hpp"
#include "abacmine/log.hpp"
#include "abacmine/policy.hpp"

namespace abacmine {

struct QualityConfig {
  WscWeights wsc;
  /// Policy over-assignment weight.
  double wo = 35.0;
  /// Rule over-assignment weight.
  double wo_rule = 3.5;
  /// Under-assignment weight; the under-assignment term is included only
  /// when this is positive.
  double wu = 0.0;

  /// wo = max(0, 50c - 15), wo_rule = wo / 10 for an estimated log
  /// completeness c.
  static QualityConfig for_completeness(double completeness);
};

/// Policy quality, lower is better:
///   WSC + wo * |meaning \ UP0| / |U|  [+ wu * |UP0 \ meaning|_L]
double q_pol(double policy_wsc, const TupleSet& policy_meaning, const TupleSet& up0,
             std::size_t user_count, const FrequencyTable& freq, const QualityConfig& cfg);
double q_pol(const Policy& policy, const LogSummary& summary, const QualityConfig& cfg);

/// Rule quality, higher is better:
///   |meaning ∩ up| / |rule| * (1 - wo_rule * |meaning \ up0| / |meaning|)
/// with |rule| the rule's WSC. An empty meaning scores 0.
double q_rul(const TupleSet& meaning, double rule_wsc, const TupleSet& up, const TupleSet& up0,
             double wo_rule);
double q_rul(const Universe& universe, const Rule& rule, const TupleSet& up,
             const TupleSet& up0, const QualityConfig& cfg);

/// q_rul with |meaning ∩ up| replaced by its frequency-weighted size.
double q_rul_freq(const TupleSet& meaning, double rule_wsc, const TupleSet& up,
                  const TupleSet& up0, const FrequencyTable& freq, double wo_rule);

/// Mean log frequency over the rule's meaning; 0 for an empty meaning.
double q_freq(const TupleSet& meaning, const FrequencyTable& freq);

// Positive-only compression metric. The normalization constant is 1 and
// theory size is measured in WSC units.

/// log2 of f_m(H) = 2^-|H| (1 - g(H))^m. -infinity when g = 1 and m > 0.
double fm_log2(double theory_size, double generality, std::size_t m);
double fm(double theory_size, double generality, std::size_t m);

/// log2(f_m(H) / f_m(E)).
double pcomp(double h_size, double h_generality, double e_size, double e_generality,
             std::size_t m);
/// |E| - |H| + m log2(1 - g(H)).
double pcomp_approx(double e_size, double h_size, double h_generality, std::size_t m);

/// Extrapolated f_m when adding a rule of size `rule_size` that newly implies
/// p of the m examples and raises generality by delta_g:
///   2^(-(m/p)|C|) * (1 - (m/p) delta_g)^m.
/// p = 0 yields 0; a non-positive base yields 0.
double q_rul_ilp(double rule_size, std::size_t m, std::size_t p, double delta_g);
/// log2 of q_rul_ilp; -infinity where q_rul_ilp is 0.
double q_rul_ilp_log2(double rule_size, std::size_t m, std::size_t p, double delta_g);

/// Extrapolated quality of `rule` given the rules chosen so far:
/// p counts examples in up0 implied by the rule and not by rules_so_far,
/// delta_g is the generality gained over U x R x Op.
double q_rul_ilp(const Universe& universe, const Rule& rule, std::span<const Rule> rules_so_far,
                 const TupleSet& up0, const QualityConfig& cfg);

}  // namespace abacmine
