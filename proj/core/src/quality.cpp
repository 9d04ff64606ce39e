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

#include "abacmine/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abacmine/semantics.hpp"

namespace abacmine {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

QualityConfig QualityConfig::for_completeness(double completeness) {
  QualityConfig cfg;
  cfg.wo = std::max(0.0, 50.0 * completeness - 15.0);
  cfg.wo_rule = cfg.wo / 10.0;
  return cfg;
}

double q_pol(double policy_wsc, const TupleSet& policy_meaning, const TupleSet& up0,
             std::size_t user_count, const FrequencyTable& freq, const QualityConfig& cfg) {
  double q = policy_wsc;
  if (user_count > 0)
    q += cfg.wo * static_cast<double>(policy_meaning.difference_count(up0)) /
         static_cast<double>(user_count);
  if (cfg.wu > 0) q += cfg.wu * freq.weighted_size(up0 - policy_meaning);
  return q;
}

double q_pol(const Policy& policy, const LogSummary& summary, const QualityConfig& cfg) {
  const Universe& u = *policy.universe;
  const FrequencyTable freq(u, summary);
  return q_pol(wsc(policy.rules, cfg.wsc), policy_meaning(u, policy.rules), summary.support(u),
               u.user_count(), freq, cfg);
}

namespace {

double over_penalty(const TupleSet& meaning, const TupleSet& up0, double wo_rule) {
  const double n = static_cast<double>(meaning.count());
  return 1.0 - wo_rule * static_cast<double>(meaning.difference_count(up0)) / n;
}

double size_ratio(double covered, double rule_wsc) {
  if (covered == 0) return 0.0;
  if (rule_wsc <= 0) return std::numeric_limits<double>::infinity();
  return covered / rule_wsc;
}

}  // namespace

double q_rul(const TupleSet& meaning, double rule_wsc, const TupleSet& up, const TupleSet& up0,
             double wo_rule) {
  if (meaning.none()) return 0.0;
  const double covered = static_cast<double>(meaning.intersect_count(up));
  if (covered == 0) return 0.0;
  return size_ratio(covered, rule_wsc) * over_penalty(meaning, up0, wo_rule);
}

double q_rul(const Universe& universe, const Rule& rule, const TupleSet& up,
             const TupleSet& up0, const QualityConfig& cfg) {
  return q_rul(rule_meaning(universe, rule), wsc(rule, cfg.wsc), up, up0, cfg.wo_rule);
}

double q_rul_freq(const TupleSet& meaning, double rule_wsc, const TupleSet& up,
                  const TupleSet& up0, const FrequencyTable& freq, double wo_rule) {
  if (meaning.none()) return 0.0;
  const double covered = freq.weighted_size(meaning & up);
  if (covered == 0) return 0.0;
  return size_ratio(covered, rule_wsc) * over_penalty(meaning, up0, wo_rule);
}

double q_freq(const TupleSet& meaning, const FrequencyTable& freq) {
  const std::size_t n = meaning.count();
  if (n == 0) return 0.0;
  return freq.weighted_size(meaning) / static_cast<double>(n);
}

double fm_log2(double theory_size, double generality, std::size_t m) {
  if (m == 0) return -theory_size;
  const double base = 1.0 - generality;
  if (base <= 0) return kNegInf;
  return -theory_size + static_cast<double>(m) * std::log2(base);
}

double fm(double theory_size, double generality, std::size_t m) {
  return std::exp2(fm_log2(theory_size, generality, m));
}

double pcomp(double h_size, double h_generality, double e_size, double e_generality,
             std::size_t m) {
  return fm_log2(h_size, h_generality, m) - fm_log2(e_size, e_generality, m);
}

double pcomp_approx(double e_size, double h_size, double h_generality, std::size_t m) {
  const double base = 1.0 - h_generality;
  if (m > 0 && base <= 0) return kNegInf;
  return e_size - h_size + (m == 0 ? 0.0 : static_cast<double>(m) * std::log2(base));
}

double q_rul_ilp_log2(double rule_size, std::size_t m, std::size_t p, double delta_g) {
  if (p == 0) return kNegInf;
  const double scale = static_cast<double>(m) / static_cast<double>(p);
  const double base = 1.0 - scale * delta_g;
  if (m > 0 && base <= 0) return kNegInf;
  return -scale * rule_size + (m == 0 ? 0.0 : static_cast<double>(m) * std::log2(base));
}

double q_rul_ilp(double rule_size, std::size_t m, std::size_t p, double delta_g) {
  return std::exp2(q_rul_ilp_log2(rule_size, m, p, delta_g));
}

double q_rul_ilp(const Universe& universe, const Rule& rule, std::span<const Rule> rules_so_far,
                 const TupleSet& up0, const QualityConfig& cfg) {
  const TupleSet before = policy_meaning(universe, rules_so_far);
  const TupleSet gained = rule_meaning(universe, rule) - before;
  const std::size_t p = gained.intersect_count(up0);
  const double delta_g =
      static_cast<double>(gained.count()) / static_cast<double>(universe.tuple_count());
  return q_rul_ilp(wsc(rule, cfg.wsc), up0.count(), p, delta_g);
}

}  // namespace abacmine
