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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "abacmine/attributes.hpp"
#include "abacmine/bitset.hpp"

namespace abacmine {

/// One operation log entry. The timestamp is carried for file fidelity and
/// never interpreted.
struct LogEntry {
  UPTuple tuple;
  std::string timestamp;
};

/// User-permission tuples with relative frequencies summing to 1.
class LogSummary {
 public:
  static constexpr double kTolerance = 1e-9;

  LogSummary() = default;
  /// Throws DataError unless every frequency is in (0, 1] and they sum to 1.
  explicit LogSummary(std::map<UPTuple, double> entries);
  /// Scales positive weights to sum to 1; zero weights are dropped.
  static LogSummary normalize(const std::map<UPTuple, double>& weights);

  const std::map<UPTuple, double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// 0 for tuples absent from the summary.
  double frequency(const UPTuple& t) const;

  /// UP(L) as a tuple set over the universe.
  TupleSet support(const Universe& universe) const;

  friend bool operator==(const LogSummary&, const LogSummary&) = default;

 private:
  std::map<UPTuple, double> entries_;
};

/// Relative frequency indexed by tuple number, for fast weighted sizes.
class FrequencyTable {
 public:
  FrequencyTable(const Universe& universe, const LogSummary& summary);

  double operator[](std::size_t tuple_index) const { return freq_[tuple_index]; }
  /// |S|_L: sum of frequencies of members of S.
  double weighted_size(const TupleSet& s) const;

 private:
  std::vector<double> freq_;
};

/// Distinct (u, r, o) projections of the entries.
TupleSet up_from_log(const Universe& universe, std::span<const LogEntry> log);

/// Occurrence counts divided by |L|. Throws DataError on an empty log.
LogSummary summarize(std::span<const LogEntry> log);

double freq_weighted_size(const TupleSet& s, const FrequencyTable& f);

/// |support ∩ meaning| / |meaning|: the fraction of the policy's tuples
/// present in the log. Throws DataError if the meaning is empty.
double completeness(const TupleSet& support, const TupleSet& policy_meaning);

}  // namespace abacmine
