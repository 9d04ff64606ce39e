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

#include "abacmine/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "abacmine/error.hpp"
#include "abacmine/policy_text.hpp"

namespace abacmine {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed ") + what + ": " + e.what());
  }
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const json& arr = j.at(key);
  if (!arr.is_array()) throw DataError(std::string("'") + key + "' must be an array");
  for (const auto& v : arr) {
    if (!v.is_string()) throw DataError(std::string("'") + key + "' must list strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

const json& object_at(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_object())
    throw DataError(std::string("missing object '") + key + "'");
  return j.at(key);
}

void drop_id(std::vector<std::string>& v, std::string_view id) {
  std::erase(v, std::string(id));
}

}  // namespace

SchemaFile parse_schema(std::string_view text) {
  const json j = parse_json(text, "schema");
  const json& u = object_at(j, "user");
  const json& r = object_at(j, "resource");
  auto us = string_list(u, "single");
  auto um = string_list(u, "multi");
  auto rs = string_list(r, "single");
  auto rm = string_list(r, "multi");
  drop_id(us, kUidAttr);
  drop_id(rs, kRidAttr);
  SchemaFile out{Schema(us, um, rs, rm), string_list(j, "operations")};
  if (out.operations.empty()) throw DataError("schema declares no operations");
  return out;
}

std::string format_schema(const Schema& schema, std::span<const std::string> operations) {
  json j;
  for (Side side : {Side::kUser, Side::kResource}) {
    json single = json::array(), multi = json::array();
    for (const auto& a : schema.attributes(side)) {
      if (a.name == (side == Side::kUser ? kUidAttr : kRidAttr)) continue;
      (a.multi ? multi : single).push_back(a.name);
    }
    j[side == Side::kUser ? "user" : "resource"] = {{"single", single}, {"multi", multi}};
  }
  j["operations"] = std::vector<std::string>(operations.begin(), operations.end());
  return j.dump(2) + "\n";
}

namespace {

std::vector<Entity> parse_entities(const json& arr, const char* what) {
  if (!arr.is_array()) throw DataError(std::string("'") + what + "' must be an array");
  std::vector<Entity> out;
  for (const auto& e : arr) {
    if (!e.is_object() || !e.contains("id") || !e.at("id").is_string())
      throw DataError(std::string("every entry of '") + what + "' needs a string id");
    Entity ent;
    ent.id = e.at("id").get<std::string>();
    if (e.contains("attrs")) {
      const json& attrs = e.at("attrs");
      if (!attrs.is_object()) throw DataError("'attrs' of '" + ent.id + "' must be an object");
      for (const auto& [name, v] : attrs.items()) {
        if (v.is_null()) {
          ent.attrs[name] = AttributeValue::bottom();
        } else if (v.is_string()) {
          ent.attrs[name] = AttributeValue::atom(v.get<std::string>());
        } else if (v.is_array()) {
          AtomSet s;
          for (const auto& x : v) {
            if (!x.is_string())
              throw DataError("set value of '" + name + "' for '" + ent.id + "' must list strings");
            s.push_back(x.get<std::string>());
          }
          ent.attrs[name] = AttributeValue::set(std::move(s));
        } else {
          throw DataError("value of '" + name + "' for '" + ent.id +
                          "' must be a string, an array or null");
        }
      }
    }
    out.push_back(std::move(ent));
  }
  return out;
}

json format_entities(const AttributeData& data, Side side) {
  json arr = json::array();
  const Schema& s = data.schema();
  const std::size_t id_attr = s.id_attribute(side);
  for (std::size_t e = 0; e < data.count(side); ++e) {
    json attrs = json::object();
    for (std::size_t a = 0; a < s.size(side); ++a) {
      if (a == id_attr) continue;
      const AttributeValue& v = data.value(side, e, a);
      if (v.is_bottom()) {
        attrs[s.attribute(side, a).name] = nullptr;
      } else if (v.is_atom()) {
        attrs[s.attribute(side, a).name] = v.as_atom();
      } else {
        attrs[s.attribute(side, a).name] = v.as_set();
      }
    }
    arr.push_back({{"id", data.id(side, e)}, {"attrs", attrs}});
  }
  return arr;
}

}  // namespace

AttributeData parse_attribute_data(const Schema& schema, std::string_view text) {
  const json j = parse_json(text, "attribute data");
  if (!j.is_object()) throw DataError("attribute data must be an object");
  auto users = parse_entities(j.value("users", json::array()), "users");
  auto resources = parse_entities(j.value("resources", json::array()), "resources");
  return AttributeData(schema, std::move(users), std::move(resources));
}

std::string format_attribute_data(const AttributeData& data) {
  json j;
  j["users"] = format_entities(data, Side::kUser);
  j["resources"] = format_entities(data, Side::kResource);
  return j.dump(2) + "\n";
}

namespace {

struct CsvLine {
  int number;
  std::vector<std::string> fields;
};

std::vector<CsvLine> csv_lines(std::string_view text, std::size_t fields) {
  std::vector<CsvLine> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    CsvLine l{n, {}};
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      std::string f = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                    : comma - start);
      const auto b = f.find_first_not_of(" \t");
      const auto e = f.find_last_not_of(" \t");
      l.fields.push_back(b == std::string::npos ? "" : f.substr(b, e - b + 1));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (l.fields.size() != fields)
      throw ParseError("expected " + std::to_string(fields) + " comma-separated fields", n, 1);
    out.push_back(std::move(l));
  }
  return out;
}

UPTuple tuple_at(const Universe& u, const CsvLine& l) {
  auto user = u.data().find(Side::kUser, l.fields[0]);
  if (!user) throw ParseError("unknown user '" + l.fields[0] + "'", l.number, 1);
  auto res = u.data().find(Side::kResource, l.fields[1]);
  if (!res) throw ParseError("unknown resource '" + l.fields[1] + "'", l.number, 1);
  auto op = u.find_op(l.fields[2]);
  if (!op) throw ParseError("unknown operation '" + l.fields[2] + "'", l.number, 1);
  return {static_cast<std::uint32_t>(*user), static_cast<std::uint32_t>(*res),
          static_cast<std::uint32_t>(*op)};
}

}  // namespace

std::vector<LogEntry> parse_log(const Universe& universe, std::string_view text) {
  std::vector<LogEntry> out;
  for (const auto& l : csv_lines(text, 4)) out.push_back({tuple_at(universe, l), l.fields[3]});
  return out;
}

std::string format_log(const Universe& universe, std::span<const LogEntry> log) {
  std::string out;
  for (const auto& e : log) out += universe.describe(e.tuple) + "," + e.timestamp + "\n";
  return out;
}

LogSummary parse_summary(const Universe& universe, std::string_view text) {
  std::map<UPTuple, double> entries;
  for (const auto& l : csv_lines(text, 4)) {
    const UPTuple t = tuple_at(universe, l);
    double f = 0;
    const std::string& s = l.fields[3];
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), f);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ParseError("malformed frequency '" + s + "'", l.number, 1);
    if (!entries.emplace(t, f).second)
      throw ParseError("duplicate tuple " + universe.describe(t), l.number, 1);
  }
  return LogSummary(std::move(entries));
}

std::string format_summary(const Universe& universe, const LogSummary& summary) {
  std::string out;
  char buf[64];
  for (const auto& [t, f] : summary.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", f);
    out += universe.describe(t) + "," + buf + "\n";
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

std::shared_ptr<const Universe> load_universe(const std::filesystem::path& schema_path,
                                              const std::filesystem::path& data_path) {
  SchemaFile sf = parse_schema(read_file(schema_path));
  AttributeData data = parse_attribute_data(sf.schema, read_file(data_path));
  return std::make_shared<const Universe>(std::move(data), std::move(sf.operations));
}

std::vector<Rule> load_policy(const Universe& universe, const std::filesystem::path& path) {
  return parse_policy(universe, read_file(path));
}

}  // namespace abacmine
