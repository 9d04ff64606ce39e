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

#include <filesystem>
#include <initializer_list>
#include <map>
#include <memory>
#include <string>

#include "abacmine/io.hpp"
#include "abacmine/log.hpp"
#include "abacmine/policy_text.hpp"

namespace abacmine::testing {

inline std::filesystem::path data_dir() { return ABACMINE_DATA_DIR; }

struct Fixture {
  std::shared_ptr<const Universe> universe;
  std::vector<Rule> policy;
  LogSummary summary;
};

inline Fixture load_fixture(const std::string& name) {
  const auto dir = data_dir() / name;
  Fixture f;
  f.universe = load_universe(dir / "schema.json", dir / "attrs.json");
  if (std::filesystem::exists(dir / "policy.txt")) f.policy = load_policy(*f.universe, dir / "policy.txt");
  if (std::filesystem::exists(dir / "log.csv"))
    f.summary = summarize(parse_log(*f.universe, read_file(dir / "log.csv")));
  return f;
}

inline Rule rule(const Universe& u, const std::string& text) { return parse_rule(u, text); }

inline std::shared_ptr<const Universe> universe_from_json(std::string_view schema,
                                                          std::string_view attrs) {
  auto s = parse_schema(schema);
  return std::make_shared<const Universe>(parse_attribute_data(s.schema, attrs), s.operations);
}

inline LogSummary summary_of(const Universe& u,
                             std::initializer_list<std::pair<const char*, double>> entries) {
  std::map<UPTuple, double> w;
  for (const auto& [text, weight] : entries) {
    std::string line = text;
    const auto a = line.find(','), b = line.find(',', a + 1);
    w[u.tuple(line.substr(0, a), line.substr(a + 1, b - a - 1), line.substr(b + 1))] = weight;
  }
  return LogSummary::normalize(w);
}

}  // namespace abacmine::testing
