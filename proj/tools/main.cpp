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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abacmine/atm.hpp"
#include "abacmine/error.hpp"
#include "abacmine/io.hpp"
#include "abacmine/miner.hpp"
#include "abacmine/policy_text.hpp"
#include "abacmine/quality.hpp"
#include "abacmine/similarity.hpp"
#include "abacmine/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace abacmine::cli {
namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kInternal = 3;

// Adds the file name to parse and schema errors raised while reading `path`.
template <typename F>
auto with_path(const fs::path& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw DataError(path.string() + ":" + e.what());
  } catch (const SchemaError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv) {
    doc_["command"] = std::move(command);
    doc_["argv"] = argv;
    doc_["rng"] = "mt19937_64";
    doc_["config"] = json::object();
    doc_["seeds"] = json::object();
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
  }

  json& config() { return doc_["config"]; }
  void seed(const std::string& name, std::uint64_t v) { doc_["seeds"][name] = v; }

  std::string read(const fs::path& path) {
    std::string text = read_file(path);
    doc_["inputs"].push_back({{"path", path.string()}, {"fnv1a64", hex(fnv1a(text))}});
    return text;
  }

  void write(const fs::path& path, std::string_view text) {
    write_file(path, text);
    doc_["outputs"].push_back({{"path", path.string()}, {"fnv1a64", hex(fnv1a(text))}});
  }

  void finish(const fs::path& dir, double seconds) {
    doc_["timing"] = {{"seconds", seconds}};
    write_file(dir / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
};

struct UniverseArgs {
  std::string dataset;
  std::string schema;
  std::string attrs;

  void add(CLI::App* app) {
    app->add_option("--dataset", dataset, "Directory holding schema.json and attrs.json");
    app->add_option("--schema", schema, "Schema file (JSON)");
    app->add_option("--attrs", attrs, "Attribute data file (JSON)");
  }

  std::shared_ptr<const Universe> load(Manifest& m) const {
    fs::path s = schema, a = attrs;
    if (s.empty() && !dataset.empty()) s = fs::path(dataset) / "schema.json";
    if (a.empty() && !dataset.empty()) a = fs::path(dataset) / "attrs.json";
    if (s.empty() || a.empty()) throw CLI::RequiredError("--schema and --attrs (or --dataset)");
    SchemaFile sf = with_path(s, [&] { return parse_schema(m.read(s)); });
    AttributeData data = with_path(a, [&] { return parse_attribute_data(sf.schema, m.read(a)); });
    return std::make_shared<const Universe>(std::move(data), std::move(sf.operations));
  }
};

std::vector<Rule> read_policy(Manifest& m, const Universe& u, const fs::path& path) {
  return with_path(path, [&] { return parse_policy(u, m.read(path)); });
}

struct MineArgs {
  UniverseArgs universe;
  std::string log;
  std::string summary;
  std::string out;
  std::string algo = "seeded";
  std::string metric = "qrul";
  std::optional<double> wo;
  std::optional<double> wo_rule;
  std::optional<double> completeness;
  std::optional<double> noise_tau;
  std::string noise_metric = "qrulfreq";
  std::uint64_t seed = 1;
  std::size_t k = 0;
  std::size_t max_iter = AnnealConfig{}.max_iter;
  double t0 = AnnealConfig{}.t0;
  double gamma = AnnealConfig{}.gamma;
  std::size_t epsilon = AnnealConfig{}.epsilon;
  std::size_t author_cap = kDefaultAuthorCap;
};

QualityConfig quality_of(const MineArgs& a) {
  QualityConfig q = a.completeness ? QualityConfig::for_completeness(*a.completeness) : QualityConfig{};
  if (a.wo) q.wo = *a.wo;
  if (a.wo_rule) q.wo_rule = *a.wo_rule;
  return q;
}

int cmd_mine(const MineArgs& a, const std::vector<std::string>& argv) {
  const auto start = std::chrono::steady_clock::now();
  Manifest m("mine", argv);
  auto u = a.universe.load(m);
  LogSummary summary;
  if (!a.log.empty() == !a.summary.empty()) throw CLI::ValidationError("exactly one of --log and --summary is required");
  if (!a.log.empty()) {
    summary = summarize(with_path(a.log, [&] { return parse_log(*u, m.read(a.log)); }));
  } else {
    summary = with_path(a.summary, [&] { return parse_summary(*u, m.read(a.summary)); });
  }
  const QualityConfig quality = quality_of(a);
  json& cfg = m.config();
  cfg["algo"] = a.algo;
  cfg["wo"] = quality.wo;
  cfg["wo_rule"] = quality.wo_rule;
  if (a.completeness) cfg["completeness_estimate"] = *a.completeness;

  std::vector<Rule> rules;
  std::optional<NoiseReport> noise;
  std::map<std::string, std::string> extra;
  if (a.algo == "seeded") {
    MiningConfig mc;
    mc.quality = quality;
    mc.metric = a.metric == "qrulfreq"  ? RuleMetric::kQrulFreq
                : a.metric == "qrulilp" ? RuleMetric::kQrulIlp
                                        : RuleMetric::kQrul;
    cfg["metric"] = a.metric;
    if (a.noise_tau) {
      mc.noise = NoiseConfig{a.noise_metric == "qfreq" ? NoiseMetric::kQfreq : NoiseMetric::kQrulFreq,
                             *a.noise_tau};
      cfg["noise_metric"] = a.noise_metric;
      cfg["noise_tau"] = *a.noise_tau;
    }
    auto res = mine_policy(u, summary, mc);
    rules = std::move(res.rules);
    noise = std::move(res.noise);
  } else {
    AtmConfig ac;
    ac.quality = quality;
    ac.k = a.k;
    ac.author_cap = a.author_cap;
    ac.anneal.max_iter = a.max_iter;
    ac.anneal.t0 = a.t0;
    ac.anneal.gamma = a.gamma;
    ac.anneal.epsilon = a.epsilon;
    ac.anneal.seed = a.seed;
    ac.gibbs.seed = a.seed;
    cfg["k"] = a.k;
    cfg["author_cap"] = a.author_cap;
    cfg["gibbs"] = {{"iterations", ac.gibbs.iterations}, {"alpha", ac.gibbs.alpha}, {"beta", ac.gibbs.beta}};
    cfg["anneal"] = {{"max_iter", a.max_iter}, {"t0", a.t0}, {"gamma", a.gamma}, {"epsilon", a.epsilon}};
    m.seed("gibbs", a.seed);
    m.seed("anneal", a.seed);
    auto res = mine_atm(u, summary, ac);
    rules = std::move(res.rules);
    extra["k"] = std::to_string(res.k);
    extra["authors"] = std::to_string(res.authors.size());
    m.write(fs::path(a.out) / "model.txt", format_model(res.model));
  }

  const fs::path dir = a.out;
  m.write(dir / "policy.txt", format_policy(*u, rules));
  const TupleSet up0 = summary.support(*u);
  const TupleSet meaning = policy_meaning(*u, rules);
  std::string report;
  report += "rules=" + std::to_string(rules.size()) + "\n";
  report += "wsc=" + full(wsc(rules, quality.wsc)) + "\n";
  report += "qPol=" + full(q_pol(Policy{u, rules}, summary, quality)) + "\n";
  report += "up0=" + std::to_string(up0.count()) + "\n";
  report += "covered=" + std::to_string((meaning & up0).count()) + "\n";
  report += "overAssigned=" + std::to_string(meaning.difference_count(up0)) + "\n";
  for (const auto& [k, v] : extra) report += k + "=" + v + "\n";
  if (noise) {
    report += "suspected=" + std::to_string(noise->suspected.size()) + "\n";
    std::string csv;
    for (const auto& t : noise->suspected) {
      csv += u->data().id(Side::kUser, t.user) + "," + u->data().id(Side::kResource, t.resource) + "," +
             u->operations()[t.op] + "\n";
    }
    m.write(dir / "noise.csv", csv);
  }
  m.write(dir / "report.txt", report);
  std::cout << report;
  m.finish(dir, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return 0;
}

struct SynthArgs {
  SynthPolicyConfig cfg;
  std::string out;
};

int cmd_synth(const SynthArgs& a, const std::vector<std::string>& argv) {
  const auto start = std::chrono::steady_clock::now();
  Manifest m("synth", argv);
  m.seed("policy", a.cfg.seed);
  m.config() = {{"nrule", a.cfg.n_rules},
                {"users_per_rule", a.cfg.users_per_rule},
                {"resources_per_rule", a.cfg.resources_per_rule},
                {"values", a.cfg.values},
                {"operations", a.cfg.operations}};
  const Policy p = gen_synthetic_policy(a.cfg);
  const fs::path dir = a.out;
  m.write(dir / "schema.json", format_schema(p.universe->schema(), p.universe->operations()));
  m.write(dir / "attrs.json", format_attribute_data(p.universe->data()));
  m.write(dir / "policy.txt", format_policy(*p.universe, p.rules));
  m.finish(dir, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return 0;
}

struct GenLogArgs {
  UniverseArgs universe;
  std::string policy;
  std::string out;
  double completeness = 1.0;
  std::uint64_t seed = 1;
  std::string format = "summary";
  std::size_t entries = 0;
};

int cmd_genlog(const GenLogArgs& a, const std::vector<std::string>& argv) {
  const auto start = std::chrono::steady_clock::now();
  Manifest m("genlog", argv);
  auto u = a.universe.load(m);
  const Policy p{u, read_policy(m, *u, a.policy)};
  m.seed("generator", a.seed);
  m.config() = {{"completeness", a.completeness}, {"format", a.format}, {"entries", a.entries}};
  Rng rng(a.seed);
  const GenDistributions d = make_distributions(p, {}, rng);
  const fs::path dir = a.out;
  if (a.format == "log") {
    const auto log = a.entries > 0 ? gen_log_entries(p, d, a.entries, rng)
                                   : gen_log(p, d, a.completeness, rng);
    m.write(dir / "log.csv", format_log(*u, log));
  } else {
    m.write(dir / "summary.csv", format_summary(*u, gen_log_summary(p, d, a.completeness, rng)));
  }
  m.finish(dir, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return 0;
}

struct EvalArgs {
  UniverseArgs universe;
  std::string original;
  std::string mined;
  std::string out;
};

int cmd_eval(const EvalArgs& a, const std::vector<std::string>& argv) {
  const auto start = std::chrono::steady_clock::now();
  Manifest m("eval", argv);
  auto u = a.universe.load(m);
  const Policy original{u, read_policy(m, *u, a.original)};
  const Policy mined{u, read_policy(m, *u, a.mined)};
  const SimilarityReport r = compare_policies(original, mined);
  const std::string report = "synSim=" + fixed3(r.syn_sim) + "\nsemSim=" + fixed3(r.sem_sim) +
                             "\noverFrac=" + fixed3(r.over_frac) + "\nunderFrac=" + fixed3(r.under_frac) + "\n";
  std::cout << report;
  if (!a.out.empty()) {
    m.write(fs::path(a.out) / "report.txt", report);
    m.finish(a.out, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return 0;
}

int run(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Mine ABAC policies from access logs"};
  app.require_subcommand(1);

  MineArgs mine;
  auto* mc = app.add_subcommand("mine", "Mine a policy from a log or log summary");
  mine.universe.add(mc);
  mc->add_option("--log", mine.log, "Log file: user,resource,op,timestamp");
  mc->add_option("--summary", mine.summary, "Summary file: user,resource,op,freq");
  mc->add_option("--out", mine.out, "Output directory")->required();
  mc->add_option("--algo", mine.algo)->check(CLI::IsMember({"seeded", "atm"}));
  mc->add_option("--metric", mine.metric)->check(CLI::IsMember({"qrul", "qrulfreq", "qrulilp"}));
  mc->add_option("--wo", mine.wo, "Policy over-assignment weight")->check(CLI::NonNegativeNumber);
  mc->add_option("--wo-rule", mine.wo_rule, "Rule over-assignment weight")->check(CLI::NonNegativeNumber);
  mc->add_option("--completeness-estimate", mine.completeness, "Sets wo = max(0, 50c - 15) and wo-rule = wo / 10")
      ->check(CLI::Range(0.0, 1.0));
  mc->add_option("--noise-tau", mine.noise_tau, "Drop selected rules scoring below tau");
  mc->add_option("--noise-metric", mine.noise_metric)->check(CLI::IsMember({"qrulfreq", "qfreq"}));
  mc->add_option("--seed", mine.seed, "Seed for Gibbs sampling and annealing");
  mc->add_option("--k", mine.k, "Topic count; 0 searches");
  mc->add_option("--max-iter", mine.max_iter)->check(CLI::PositiveNumber);
  mc->add_option("--t0", mine.t0)->check(CLI::PositiveNumber);
  mc->add_option("--gamma", mine.gamma)->check(CLI::Range(0.0, 1.0));
  mc->add_option("--epsilon", mine.epsilon);
  mc->add_option("--author-cap", mine.author_cap);

  SynthArgs synth;
  auto* sc = app.add_subcommand("synth", "Generate a synthetic policy with attribute data");
  sc->add_option("--nrule", synth.cfg.n_rules)->check(CLI::PositiveNumber);
  sc->add_option("--seed", synth.cfg.seed);
  sc->add_option("--users-per-rule", synth.cfg.users_per_rule)->check(CLI::PositiveNumber);
  sc->add_option("--resources-per-rule", synth.cfg.resources_per_rule)->check(CLI::PositiveNumber);
  sc->add_option("--values", synth.cfg.values)->check(CLI::PositiveNumber);
  sc->add_option("--operations", synth.cfg.operations)->check(CLI::PositiveNumber);
  sc->add_option("--out", synth.out, "Output directory")->required();

  GenLogArgs genlog;
  auto* gc = app.add_subcommand("genlog", "Generate a log or log summary from a policy");
  genlog.universe.add(gc);
  gc->add_option("--policy", genlog.policy)->required();
  gc->add_option("--completeness", genlog.completeness)->check(CLI::Range(0.0, 1.0));
  gc->add_option("--seed", genlog.seed);
  gc->add_option("--format", genlog.format)->check(CLI::IsMember({"summary", "log"}));
  gc->add_option("--entries", genlog.entries, "Exact log length (log format only)");
  gc->add_option("--out", genlog.out, "Output directory")->required();

  EvalArgs eval;
  auto* ec = app.add_subcommand("eval", "Compare a mined policy with the original");
  eval.universe.add(ec);
  ec->add_option("--original", eval.original)->required();
  ec->add_option("--mined", eval.mined)->required();
  ec->add_option("--out", eval.out, "Also write report.txt and manifest.json here");

  try {
    app.parse(argc, argv);
    if (mc->parsed()) return cmd_mine(mine, args);
    if (sc->parsed()) return cmd_synth(synth, args);
    if (gc->parsed()) return cmd_genlog(genlog, args);
    return cmd_eval(eval, args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "abacmine: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "abacmine: " << e.what() << "\n";
    return kData;
  } catch (const SchemaError& e) {
    std::cerr << "abacmine: " << e.what() << "\n";
    return kData;
  } catch (const InternalError& e) {
    std::cerr << "abacmine: internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "abacmine: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace
}  // namespace abacmine::cli

int main(int argc, char** argv) { return abacmine::cli::run(argc, argv); }
