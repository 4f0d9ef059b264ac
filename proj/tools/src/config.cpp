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

#include "gcd_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "gcd/errors.hpp"
#include "gcd/fixture_backend.hpp"
#include "gcd/remote_backend.hpp"

namespace gcd::cli {
namespace {

using nlohmann::json;

/// Typed access to one JSON object that remembers which keys were read.
class Fields {
 public:
  Fields(const json& j, std::string where, std::initializer_list<const char*> allowed) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + " must be a JSON object");
    std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
      if (!known.contains(key)) throw ConfigError(fmt::format("unknown key \"{}\" in {}", key, where_));
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void read(const char* key, T& out) const {
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("{}.{} has the wrong type", where_, key));
    }
  }

  template <typename T>
  void read_optional(const char* key, std::optional<T>& out) const {
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    T value{};
    read(key, value);
    out = value;
  }

  const json& at(const char* key) const { return j_.at(key); }

 private:
  const json& j_;
  std::string where_;
};

void read_generation(const json& j, GenerationConfig& g) {
  const Fields f(j, "generation",
                 {"method", "alpha", "gamma", "retention_policy", "beta0", "beta1", "mu", "visual_fraction",
                  "plausibility_beta", "top_p", "temperature", "max_new_tokens", "time_offset", "seed",
                  "attention_layer", "dependency_probe", "trace_top_k", "parallel_passes"});
  if (f.has("method")) {
    std::string name;
    f.read("method", name);
    g.method = method_from_string(name);
  }
  if (f.has("retention_policy")) {
    std::string name;
    f.read("retention_policy", name);
    g.retention.kind = retention_kind_from_string(name);
  }
  f.read("alpha", g.alpha);
  f.read("gamma", g.gamma);
  f.read("beta0", g.retention.beta0);
  f.read("beta1", g.retention.beta1);
  f.read("mu", g.retention.mu);
  f.read("visual_fraction", g.visual_fraction);
  f.read("plausibility_beta", g.plausibility_beta);
  f.read_optional("top_p", g.top_p);
  f.read("temperature", g.temperature);
  f.read("max_new_tokens", g.max_new_tokens);
  f.read("time_offset", g.time_offset);
  f.read("seed", g.seed);
  f.read("attention_layer", g.attention_layer);
  f.read("dependency_probe", g.dependency_probe);
  f.read("trace_top_k", g.trace_top_k);
  f.read("parallel_passes", g.parallel_passes);
  validate_config(g);
}

json generation_to_json(const GenerationConfig& g) {
  return {{"method", std::string(to_string(g.method))},
          {"alpha", g.alpha},
          {"gamma", g.gamma},
          {"retention_policy", std::string(to_string(g.retention.kind))},
          {"beta0", g.retention.beta0},
          {"beta1", g.retention.beta1},
          {"mu", g.retention.mu},
          {"visual_fraction", g.visual_fraction},
          {"plausibility_beta", g.plausibility_beta},
          {"top_p", g.top_p ? json(*g.top_p) : json(nullptr)},
          {"temperature", g.temperature},
          {"max_new_tokens", g.max_new_tokens},
          {"time_offset", g.time_offset},
          {"seed", g.seed},
          {"attention_layer", g.attention_layer},
          {"dependency_probe", g.dependency_probe},
          {"trace_top_k", g.trace_top_k},
          {"parallel_passes", g.parallel_passes}};
}

void read_synthetic(const json& j, SyntheticOptions& o) {
  const Fields f(j, "backend.synthetic",
                 {"vocab_size", "object_count", "items", "min_objects", "max_objects", "decoy_patches",
                  "cooccurrence_bias", "prior_bias", "generic_objects", "filler_chain_bias", "eos_bias", "noise",
                  "g_hi", "w0", "kappa", "head_count", "seed"});
  f.read("vocab_size", o.vocab_size);
  f.read("object_count", o.object_count);
  f.read("items", o.items);
  f.read("min_objects", o.min_objects);
  f.read("max_objects", o.max_objects);
  f.read("decoy_patches", o.decoy_patches);
  f.read("cooccurrence_bias", o.cooccurrence_bias);
  f.read("prior_bias", o.prior_bias);
  f.read("generic_objects", o.generic_objects);
  f.read("filler_chain_bias", o.filler_chain_bias);
  f.read("eos_bias", o.eos_bias);
  f.read("noise", o.noise);
  f.read("g_hi", o.g_hi);
  f.read("w0", o.w0);
  f.read("kappa", o.kappa);
  f.read("head_count", o.head_count);
  f.read("seed", o.seed);
}

json synthetic_to_json(const SyntheticOptions& o) {
  return {{"vocab_size", o.vocab_size},
          {"object_count", o.object_count},
          {"items", o.items},
          {"min_objects", o.min_objects},
          {"max_objects", o.max_objects},
          {"decoy_patches", o.decoy_patches},
          {"cooccurrence_bias", o.cooccurrence_bias},
          {"prior_bias", o.prior_bias},
          {"generic_objects", o.generic_objects},
          {"filler_chain_bias", o.filler_chain_bias},
          {"eos_bias", o.eos_bias},
          {"noise", o.noise},
          {"g_hi", o.g_hi},
          {"w0", o.w0},
          {"kappa", o.kappa},
          {"head_count", o.head_count},
          {"seed", o.seed}};
}

BackendSource source_from_string(const std::string& kind) {
  if (kind == "biased_mixture") return BackendSource::kBiasedMixture;
  if (kind == "synthetic") return BackendSource::kSynthetic;
  if (kind == "fixture") return BackendSource::kFixture;
  if (kind == "remote") return BackendSource::kRemote;
  throw ConfigError("unknown backend kind \"" + kind + "\"");
}

std::string source_to_string(BackendSource s) {
  switch (s) {
    case BackendSource::kBiasedMixture:
      return "biased_mixture";
    case BackendSource::kSynthetic:
      return "synthetic";
    case BackendSource::kFixture:
      return "fixture";
    case BackendSource::kRemote:
      return "remote";
  }
  return "unknown";
}

void read_backend(const json& j, BackendSpec& b) {
  const Fields f(j, "backend",
                 {"kind", "vocab_size", "head_count", "attention_layer", "object_range", "g_hi", "w0", "kappa",
                  "head_delta", "eos_logit", "bias_noise", "seed", "bias_entries", "synthetic", "path", "endpoint",
                  "timeout_ms"});
  std::string kind = "biased_mixture";
  f.read("kind", kind);
  b.source = source_from_string(kind);

  BiasedMixtureParams& p = b.mixture;
  f.read("vocab_size", p.vocab_size);
  f.read("head_count", p.head_count);
  f.read("attention_layer", p.attention_layer);
  if (f.has("object_range")) {
    std::vector<TokenId> range;
    f.read("object_range", range);
    if (range.size() != 2) throw ConfigError("backend.object_range must be [lo, hi]");
    p.object_lo = range[0];
    p.object_hi = range[1];
  }
  f.read("g_hi", p.g_hi);
  f.read("w0", p.w0);
  f.read("kappa", p.kappa);
  f.read("head_delta", p.head_delta);
  f.read_optional("eos_logit", p.eos_logit);
  f.read("bias_noise", p.bias_noise);
  f.read("seed", p.seed);
  if (f.has("bias_entries")) {
    const json& entries = f.at("bias_entries");
    if (!entries.is_array()) throw ConfigError("backend.bias_entries must be a list of [prev, next, value]");
    p.bias.clear();
    for (const json& e : entries) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
          !e[2].is_number()) {
        throw ConfigError("backend.bias_entries must be a list of [prev, next, value]");
      }
      const auto prev = e[0].get<TokenId>();
      const auto next = e[1].get<TokenId>();
      if (prev < 0 || next < 0 || static_cast<std::size_t>(prev) >= p.vocab_size ||
          static_cast<std::size_t>(next) >= p.vocab_size) {
        throw ConfigError("backend.bias_entries id outside the vocabulary");
      }
      p.set_bias(prev, next, e[2].get<double>());
    }
  }
  if (f.has("synthetic")) read_synthetic(f.at("synthetic"), b.synthetic);
  f.read("path", b.fixture_path);
  f.read("endpoint", b.endpoint);
  f.read("timeout_ms", b.timeout_ms);
  b.vocab_size = p.vocab_size;
  b.head_count = p.head_count;

  if (b.source == BackendSource::kFixture && b.fixture_path.empty()) throw ConfigError("fixture backend needs \"path\"");
  if (b.source == BackendSource::kRemote && b.endpoint.empty()) throw ConfigError("remote backend needs \"endpoint\"");
  if (b.timeout_ms <= 0) throw ConfigError("backend.timeout_ms must be positive");
}

json backend_to_json(const BackendSpec& b) {
  const BiasedMixtureParams& p = b.mixture;
  json entries = json::array();
  for (std::size_t prev = 0; prev < p.vocab_size && !p.bias.empty(); ++prev) {
    for (std::size_t next = 0; next < p.vocab_size; ++next) {
      const double v = p.bias[prev * p.vocab_size + next];
      if (v != 0.0) entries.push_back({prev, next, v});
    }
  }
  return {{"kind", source_to_string(b.source)},
          {"vocab_size", p.vocab_size},
          {"head_count", p.head_count},
          {"attention_layer", p.attention_layer},
          {"object_range", {p.object_lo, p.object_hi}},
          {"g_hi", p.g_hi},
          {"w0", p.w0},
          {"kappa", p.kappa},
          {"head_delta", p.head_delta},
          {"eos_logit", p.eos_logit ? json(*p.eos_logit) : json(nullptr)},
          {"bias_noise", p.bias_noise},
          {"seed", p.seed},
          {"bias_entries", std::move(entries)},
          {"synthetic", synthetic_to_json(b.synthetic)},
          {"path", b.fixture_path},
          {"endpoint", b.endpoint},
          {"timeout_ms", b.timeout_ms}};
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  const Fields f(j, "config", {"generation", "backend", "corpus", "output", "vocab_map", "seeds", "pope", "threads"});
  if (f.has("generation")) read_generation(f.at("generation"), c.generation);
  if (f.has("backend")) read_backend(f.at("backend"), c.backend);
  f.read("corpus", c.corpus);
  f.read("output", c.output);
  f.read("vocab_map", c.vocab_map);
  f.read("seeds", c.seeds);
  f.read("threads", c.threads);
  if (f.has("pope")) {
    const Fields pope(f.at("pope"), "pope", {"yes_token", "no_token"});
    pope.read("yes_token", c.pope.yes);
    pope.read("no_token", c.pope.no);
  }
  if (c.seeds.empty()) throw ConfigError("seeds must list at least one seed");
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  return c;
}

json run_config_to_json(const RunConfig& c) {
  return {{"generation", generation_to_json(c.generation)},
          {"backend", backend_to_json(c.backend)},
          {"corpus", c.corpus},
          {"output", c.output},
          {"vocab_map", c.vocab_map},
          {"seeds", c.seeds},
          {"pope", {{"yes_token", c.pope.yes}, {"no_token", c.pope.no}}},
          {"threads", c.threads}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config {} is not valid JSON: {}", path.string(), e.what()));
  }
  return run_config_from_json(j);
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &config;
  std::stringstream path(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(path, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("override path " + key + " crosses a non-object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  (*node)[parts.back()] = std::move(value);
}

std::pair<TokenId, TokenId> object_range(const RunConfig& config) {
  if (config.backend.source == BackendSource::kSynthetic) {
    const auto& s = config.backend.synthetic;
    return {2, static_cast<TokenId>(2 + s.object_count)};
  }
  return {config.backend.mixture.object_lo, config.backend.mixture.object_hi};
}

std::unique_ptr<Backend> make_backend(const RunConfig& config) {
  const BackendSpec& b = config.backend;
  switch (b.source) {
    case BackendSource::kBiasedMixture:
      return std::make_unique<BiasedMixtureBackend>(b.mixture);
    case BackendSource::kSynthetic: {
      BiasedMixtureParams params = make_synthetic_world(b.synthetic).params;
      params.attention_layer = b.mixture.attention_layer;
      return std::make_unique<BiasedMixtureBackend>(std::move(params));
    }
    case BackendSource::kFixture:
      try {
        return std::make_unique<FixtureBackend>(FixtureBackend::from_file(b.fixture_path, b.mixture.attention_layer));
      } catch (const ProtocolError& e) {
        throw ConfigError(e.what());
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw IoError(e.what());
      }
    case BackendSource::kRemote: {
      RemoteOptions options;
      options.endpoint = b.endpoint;
      options.vocab_size = b.vocab_size;
      options.head_count = b.head_count;
      options.attention_layer = b.mixture.attention_layer;
      options.timeout = std::chrono::milliseconds(b.timeout_ms);
      return std::make_unique<RemoteBackend>(options);
    }
  }
  throw ConfigError("unsupported backend");
}

std::map<TokenId, std::string> load_vocab_map(const RunConfig& config) {
  if (config.vocab_map.empty()) {
    if (config.backend.source == BackendSource::kSynthetic) return make_synthetic_world(config.backend.synthetic).names;
    return {};
  }
  std::ifstream in(config.vocab_map);
  if (!in) throw IoError("cannot read vocab map " + config.vocab_map);
  std::map<TokenId, std::string> names;
  try {
    const json j = json::parse(in);
    if (!j.is_object()) throw ConfigError("vocab map must be an object of id -> name");
    for (const auto& [key, value] : j.items()) names[static_cast<TokenId>(std::stoi(key))] = value.get<std::string>();
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("vocab map {}: {}", config.vocab_map, e.what()));
  }
  return names;
}

std::vector<CorpusItem> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus " + path.string());
  std::vector<CorpusItem> items;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = fmt::format("{}:{}", path.string(), line_no);
    try {
      const json j = json::parse(line);
      const Fields f(j, where, {"id", "visual_tokens", "prompt_tokens", "gt_objects", "gold", "question_object"});
      CorpusItem item;
      if (!f.has("id")) throw ConfigError(where + ": missing id");
      f.read("id", item.id);
      f.read("visual_tokens", item.visual);
      f.read("prompt_tokens", item.prompt);
      f.read("gt_objects", item.gt_objects);
      f.read("question_object", item.question_object);
      if (f.has("gold")) {
        std::string gold;
        f.read("gold", gold);
        if (gold != "yes" && gold != "no") throw ConfigError(where + ": gold must be \"yes\" or \"no\"");
        item.gold_yes = gold == "yes";
      }
      if (!seen.insert(item.id).second) throw ConfigError(fmt::format("{}: duplicate id \"{}\"", where, item.id));
      items.push_back(std::move(item));
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("{}: {}", where, e.what()));
    }
  }
  return items;
}

std::string corpus_item_to_json_line(const CorpusItem& item) {
  json j = {{"id", item.id}, {"visual_tokens", item.visual}, {"prompt_tokens", item.prompt}};
  if (!item.gt_objects.empty()) j["gt_objects"] = item.gt_objects;
  if (item.gold_yes) {
    j["gold"] = *item.gold_yes ? "yes" : "no";
    j["question_object"] = item.question_object;
  }
  return j.dump();
}

}  // namespace gcd::cli
