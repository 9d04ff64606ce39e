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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abacmine/attributes.hpp"
#include "abacmine/log.hpp"
#include "abacmine/policy.hpp"

namespace abacmine {

// Schema file (JSON):
//   {"user":     {"single": [...], "multi": [...]},
//    "resource": {"single": [...], "multi": [...]},
//    "operations": [...]}
// Attribute data file (JSON):
//   {"users":     [{"id": "u1", "attrs": {"dept": "cs", "crs": ["a", "b"]}}],
//    "resources": [...]}
// A null or missing attribute is bottom. uid and rid come from "id".
// Log file: `user,resource,op,timestamp` per line.
// Summary file: `user,resource,op,freq` per line.
// Blank lines and lines starting with `#` are ignored in CSV files.

struct SchemaFile {
  Schema schema;
  std::vector<std::string> operations;
};

SchemaFile parse_schema(std::string_view json);
std::string format_schema(const Schema& schema, std::span<const std::string> operations);

AttributeData parse_attribute_data(const Schema& schema, std::string_view json);
std::string format_attribute_data(const AttributeData& data);

std::vector<LogEntry> parse_log(const Universe& universe, std::string_view text);
std::string format_log(const Universe& universe, std::span<const LogEntry> log);

LogSummary parse_summary(const Universe& universe, std::string_view text);
/// Frequencies are printed with 17 significant digits, so they round-trip.
std::string format_summary(const Universe& universe, const LogSummary& summary);

/// Throws DataError if the file cannot be read.
std::string read_file(const std::filesystem::path& path);
/// Creates parent directories; throws DataError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

std::shared_ptr<const Universe> load_universe(const std::filesystem::path& schema_path,
                                              const std::filesystem::path& data_path);
std::vector<Rule> load_policy(const Universe& universe, const std::filesystem::path& path);

}  // namespace abacmine
