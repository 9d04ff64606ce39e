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

#include <cmath>

#include "abacmine/error.hpp"

namespace abacmine {

LogSummary::LogSummary(std::map<UPTuple, double> entries) : entries_(std::move(entries)) {
  double total = 0;
  for (const auto& [t, f] : entries_) {
    if (!(f > 0.0) || f > 1.0 + kTolerance)
      throw DataError("log summary frequency out of range (0, 1]: " + std::to_string(f));
    total += f;
  }
  if (!entries_.empty() && std::abs(total - 1.0) > kTolerance)
    throw DataError("log summary frequencies sum to " + std::to_string(total) + ", not 1");
}

LogSummary LogSummary::normalize(const std::map<UPTuple, double>& weights) {
  double total = 0;
  for (const auto& [t, w] : weights) {
    if (w < 0) throw DataError("negative weight in log summary");
    total += w;
  }
  std::map<UPTuple, double> out;
  if (total <= 0) return LogSummary{};
  for (const auto& [t, w] : weights)
    if (w > 0) out.emplace(t, w / total);
  return LogSummary(std::move(out));
}

double LogSummary::frequency(const UPTuple& t) const {
  auto it = entries_.find(t);
  return it == entries_.end() ? 0.0 : it->second;
}

TupleSet LogSummary::support(const Universe& universe) const {
  TupleSet s = universe.empty_set();
  for (const auto& [t, f] : entries_) s.set(universe.index(t));
  return s;
}

FrequencyTable::FrequencyTable(const Universe& universe, const LogSummary& summary)
    : freq_(universe.tuple_count(), 0.0) {
  for (const auto& [t, f] : summary.entries()) freq_[universe.index(t)] = f;
}

double FrequencyTable::weighted_size(const TupleSet& s) const {
  double total = 0;
  s.for_each([&](std::size_t i) { total += freq_[i]; });
  return total;
}

TupleSet up_from_log(const Universe& universe, std::span<const LogEntry> log) {
  TupleSet s = universe.empty_set();
  for (const auto& e : log) s.set(universe.index(e.tuple));
  return s;
}

LogSummary summarize(std::span<const LogEntry> log) {
  if (log.empty()) throw DataError("cannot summarize an empty log");
  std::map<UPTuple, std::size_t> counts;
  for (const auto& e : log) ++counts[e.tuple];
  std::map<UPTuple, double> freq;
  const double n = static_cast<double>(log.size());
  for (const auto& [t, c] : counts) freq.emplace(t, static_cast<double>(c) / n);
  return LogSummary(std::move(freq));
}

double freq_weighted_size(const TupleSet& s, const FrequencyTable& f) {
  return f.weighted_size(s);
}

double completeness(const TupleSet& support, const TupleSet& policy_meaning) {
  const std::size_t n = policy_meaning.count();
  if (n == 0) throw DataError("completeness of an empty policy meaning is undefined");
  return static_cast<double>(support.intersect_count(policy_meaning)) / static_cast<double>(n);
}

}  // namespace abacmine
