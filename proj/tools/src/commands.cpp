// Copyright 2026 The GCD Authors.
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

#include "gcd_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "gcd/errors.hpp"
#include "gcd/eval.hpp"
#include "gcd/trace_io.hpp"
#include "gcd_cli/config.hpp"

namespace gcd::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int fail(std::ostream& log, int code, const std::string& message) {
  log << "error: " << message << '\n';
  return code;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for one corpus item under one run seed.
std::uint64_t item_seed(std::uint64_t run_seed, std::size_t index) {
  return splitmix64(run_seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config {} is not valid JSON: {}", path, e.what()));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + path.string());
}

struct ItemOutcome {
  GenerationResult result;
  std::exception_ptr error;
};

std::vector<ItemOutcome> run_items(const Backend& backend, const std::vector<CorpusItem>& items,
                                   const GenerationConfig& base, std::uint64_t run_seed, std::size_t threads) {
  std::vector<ItemOutcome> outcomes(items.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      GenerationConfig cfg = base;
      cfg.seed = item_seed(run_seed, i);
      try {
        outcomes[i].result = generate(backend, items[i].visual, items[i].prompt, cfg);
      } catch (...) {
        outcomes[i].error = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(threads, std::max<std::size_t>(1, items.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return outcomes;
}

}  // namespace

int cmd_generate(const GenerateArgs& args, std::ostream& log) {
  RunConfig config;
  std::vector<CorpusItem> items;
  std::unique_ptr<Backend> backend;
  try {
    json raw = read_json_file(args.config);
    if (args.method) raw["generation"]["method"] = *args.method;
    if (!args.seeds.empty()) raw["seeds"] = args.seeds;
    if (!args.corpus.empty()) raw["corpus"] = args.corpus;
    if (!args.out.empty()) raw["output"] = args.out;
    for (const std::string& o : args.overrides) apply_override(raw, o);
    config = run_config_from_json(raw);
    if (config.corpus.empty()) throw ConfigError("no corpus given (--corpus or \"corpus\")");
    if (config.output.empty()) throw ConfigError("no output directory given (--out or \"output\")");

    items = read_corpus(config.corpus);
    if (items.empty()) throw ConfigError("empty corpus");
    backend = make_backend(config);
    const std::size_t vocab = backend->descriptor().vocab_size;
    for (const CorpusItem& item : items) {
      if (item.prompt.empty()) throw ConfigError("item " + item.id + " has an empty prompt");
      for (const auto* list : {&item.visual, &item.prompt}) {
        for (TokenId id : *list) {
          if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
            throw ConfigError(fmt::format("item {} uses token {} outside vocabulary of size {}", item.id, id, vocab));
          }
        }
      }
    }
    std::error_code ec;
    fs::create_directories(config.output, ec);
    if (ec) throw IoError("cannot create output directory " + config.output + ": " + ec.message());
  } catch (const IoError& e) {
    return fail(log, kIoFailure, e.what());
  } catch (const ConfigError& e) {
    return fail(log, kConfigFailure, e.what());
  }

  const std::size_t threads = backend->descriptor().serialized_access ? 1 : config.threads;
  std::string generations;
  for (std::uint64_t seed : config.seeds) {
    spdlog::info("seed {}: generating {} items with method {}", seed, items.size(), to_string(config.generation.method));
    const std::vector<ItemOutcome> outcomes = run_items(*backend, items, config.generation, seed, threads);

    std::string traces;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (outcomes[i].error) {
        try {
          std::rethrow_exception(outcomes[i].error);
        } catch (const ConfigError& e) {
          return fail(log, kConfigFailure, fmt::format("item {}: {}", items[i].id, e.what()));
        } catch (const std::exception& e) {
          return fail(log, kBackendFailure, fmt::format("item {} (seed {}): {}", items[i].id, seed, e.what()));
        }
      }
      const GenerationResult& r = outcomes[i].result;
      for (const StepTrace& s : r.traces) traces += trace_to_json_line({items[i].id, seed, s}) + '\n';
      generations += generation_to_json_line({items[i].id, seed, r.tokens, r.termination}) + '\n';
      spdlog::debug("item {} seed {}: {} tokens, {}", items[i].id, seed, r.tokens.size(), to_string(r.termination));
    }
    try {
      write_text(fs::path(config.output) / fmt::format("traces_seed{}.jsonl", seed), traces);
    } catch (const IoError& e) {
      return fail(log, kIoFailure, e.what());
    }
  }
  try {
    write_text(fs::path(config.output) / "generations.jsonl", generations);
  } catch (const IoError& e) {
    return fail(log, kIoFailure, e.what());
  }
  spdlog::info("wrote {} seeds x {} items to {}", config.seeds.size(), items.size(), config.output);
  return kOk;
}

int cmd_eval(const EvalArgs& args, std::ostream& log) {
  if (args.kind != "chair" && args.kind != "pope") {
    return fail(log, kConfigFailure, "eval kind must be chair or pope, got " + args.kind);
  }
  RunConfig config;
  std::vector<CorpusItem> corpus;
  std::vector<GenerationRecord> generations;
  std::map<TokenId, std::string> names;
  try {
    if (args.config) config = load_run_config(*args.config);
    corpus = read_corpus(args.corpus);
    if (corpus.empty()) throw ConfigError("empty corpus");
    if (args.kind == "chair") names = load_vocab_map(config);
    try {
      generations = read_generations(args.generations);
    } catch (const ProtocolError& e) {
      throw ConfigError(e.what());
    } catch (const Error& e) {
      throw IoError(e.what());
    }
  } catch (const IoError& e) {
    return fail(log, kIoFailure, e.what());
  } catch (const ConfigError& e) {
    return fail(log, kConfigFailure, e.what());
  }
  if (generations.empty()) return fail(log, kConfigFailure, "no generations in " + args.generations);

  std::vector<std::uint64_t> seeds;
  std::map<std::uint64_t, std::map<std::string, const GenerationRecord*>> by_seed;
  for (const GenerationRecord& g : generations) {
    if (!by_seed.contains(g.seed)) seeds.push_back(g.seed);
    by_seed[g.seed][g.id] = &g;
  }
  std::set<std::string> corpus_ids;
  for (const CorpusItem& item : corpus) corpus_ids.insert(item.id);
  for (std::uint64_t seed : seeds) {
    std::vector<std::string> missing;
    std::vector<std::string> unknown;
    for (const CorpusItem& item : corpus) {
      if (!by_seed[seed].contains(item.id)) missing.push_back(item.id);
    }
    for (const auto& [id, _] : by_seed[seed]) {
      if (!corpus_ids.contains(id)) unknown.push_back(id);
    }
    if (!missing.empty() || !unknown.empty()) {
      return fail(log, kConfigFailure,
                  fmt::format("id mismatch for seed {}: missing ids [{}]; ids not in corpus [{}]", seed,
                              fmt::join(missing, ", "), fmt::join(unknown, ", ")));
    }
  }

  const auto [object_lo, object_hi] = object_range(config);
  std::map<std::string, std::map<std::uint64_t, double>> values;
  try {
    for (std::uint64_t seed : seeds) {
      if (args.kind == "chair") {
        std::vector<CaptionRecord> records;
        for (const CorpusItem& item : corpus) {
          const GenerationRecord& g = *by_seed[seed][item.id];
          records.push_back({item.id, extract_mentions(g.tokens, object_lo, object_hi, names),
                             {item.gt_objects.begin(), item.gt_objects.end()}});
        }
        const ChairScores s = chair_scores(records);
        values["C_S"][seed] = s.sentence;
        values["C_I"][seed] = s.instance;
        values["recall"][seed] = s.recall;
      } else {
        std::vector<PopeItem> pope;
        for (const CorpusItem& item : corpus) {
          if (!item.gold_yes) throw std::invalid_argument("item " + item.id + " has no gold answer");
          const GenerationRecord& g = *by_seed[seed][item.id];
          pope.push_back({item.id, item.question_object, *item.gold_yes, pope_answer(g.tokens, config.pope.yes)});
        }
        const PopeScores s = pope_scores(pope);
        values["accuracy"][seed] = s.accuracy;
        values["precision"][seed] = s.precision;
        values["recall"][seed] = s.recall;
        values["f1"][seed] = s.f1;
      }
    }
  } catch (const std::invalid_argument& e) {
    return fail(log, kConfigFailure, e.what());
  }

  json report = {{"metric", args.kind}, {"seeds", seeds}};
  for (const auto& [name, per_seed] : values) {
    json entry = {{"per_seed", json::object()}};
    double sum = 0.0;
    for (const auto& [seed, v] : per_seed) {
      entry["per_seed"][std::to_string(seed)] = v;
      sum += v;
    }
    entry["mean"] = sum / static_cast<double>(per_seed.size());
    report[name] = std::move(entry);
  }
  try {
    const fs::path out(args.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_text(out, report.dump(2) + '\n');
  } catch (const std::exception& e) {
    return fail(log, kIoFailure, e.what());
  }
  return kOk;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& log) {
  if (args.kind != "dependency") return fail(log, kConfigFailure, "analyze supports only \"dependency\"");
  if (args.traces.empty()) return fail(log, kConfigFailure, "no trace files given");

  std::vector<std::pair<std::string, std::uint64_t>> order;
  std::map<std::pair<std::string, std::uint64_t>, std::vector<StepTrace>> groups;
  try {
    for (const std::string& path : args.traces) {
      for (TraceRecord& r : read_traces(path)) {
        auto key = std::make_pair(r.item, r.seed);
        if (!groups.contains(key)) order.push_back(key);
        groups[key].push_back(std::move(r.trace));
      }
    }
  } catch (const ProtocolError& e) {
    return fail(log, kConfigFailure, e.what());
  } catch (const Error& e) {
    return fail(log, kIoFailure, e.what());
  }
  if (groups.empty()) return fail(log, kConfigFailure, "trace files hold no steps");

  std::vector<std::pair<DependencyMetric, DependencyCurve>> outputs;
  try {
    for (DependencyMetric metric :
         {DependencyMetric::kVisual, DependencyMetric::kVisuotextual, DependencyMetric::kHallucinatedJsd}) {
      std::vector<DependencyCurve> curves;
      for (const auto& key : order) curves.push_back(dependency_curve(groups[key], metric));
      outputs.emplace_back(metric, average_curves(curves));
    }
  } catch (const MetricUnavailable& e) {
    return fail(log, kConfigFailure, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(log, kConfigFailure, e.what());
  }

  try {
    fs::create_directories(args.out);
    for (const auto& [metric, curve] : outputs) {
      write_curve_csv(fs::path(args.out) / fmt::format("{}.csv", to_string(metric)), curve);
    }
  } catch (const std::exception& e) {
    return fail(log, kIoFailure, e.what());
  }
  return kOk;
}

int cmd_synth(const SynthArgs& args, std::ostream& log) {
  RunConfig config;
  config.backend.source = BackendSource::kSynthetic;
  config.backend.synthetic.items = args.items;
  try {
    json raw = run_config_to_json(config);
    for (const std::string& o : args.overrides) apply_override(raw, o);
    config = run_config_from_json(raw);
  } catch (const ConfigError& e) {
    return fail(log, kConfigFailure, e.what());
  }
  config.corpus = (fs::path(args.out) / "corpus.jsonl").string();

  std::string corpus;
  try {
    const SyntheticWorld world = make_synthetic_world(config.backend.synthetic);
    for (const SyntheticItem& item : world.items) {
      corpus += corpus_item_to_json_line({item.id, item.visual, item.prompt, item.objects, std::nullopt, ""}) + '\n';
    }
  } catch (const ConfigError& e) {
    return fail(log, kConfigFailure, e.what());
  }
  try {
    fs::create_directories(args.out);
    write_text(fs::path(args.out) / "config.json", run_config_to_json(config).dump(2) + '\n');
    write_text(fs::path(args.out) / "corpus.jsonl", corpus);
  } catch (const std::exception& e) {
    return fail(log, kIoFailure, e.what());
  }
  return kOk;
}

}  // namespace gcd::cli
