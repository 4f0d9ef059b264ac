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
#pragma once

// Run configuration and corpus files for the gcd tool.
//
// The JSON config is canonical; CLI flags override individual keys. Every
// object rejects unknown keys so a misspelled hyperparameter fails loudly.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcd/backend.hpp"
#include "gcd/biased_mixture.hpp"
#include "gcd/engine.hpp"
#include "gcd/errors.hpp"
#include "gcd/synthetic.hpp"

namespace gcd::cli {

enum class BackendSource { kBiasedMixture, kSynthetic, kFixture, kRemote };

struct BackendSpec {
  BackendSource source = BackendSource::kBiasedMixture;
  /// biased_mixture: used as given. synthetic: replaced by the generated world.
  BiasedMixtureParams mixture{};
  SyntheticOptions synthetic{};
  std::string fixture_path;
  std::string endpoint;
  std::size_t vocab_size = 0;
  std::size_t head_count = 1;
  int timeout_ms = 30000;
};

struct PopeTokens {
  TokenId yes = 12;
  TokenId no = 13;
};

struct RunConfig {
  GenerationConfig generation{};
  BackendSpec backend{};
  std::string corpus;
  std::string output;
  std::string vocab_map;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  PopeTokens pope{};
  std::size_t threads = 1;
};

/// Throws ConfigError for unknown keys, wrong types or invalid values.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& config);

/// Reads and parses a config file. Throws IoError when unreadable and
/// ConfigError when malformed.
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies "key=value" overrides to a config JSON; the key is a dotted path
/// ("generation.alpha") and the value is parsed as JSON, falling back to a
/// plain string.
void apply_override(nlohmann::json& config, const std::string& assignment);

class IoError : public Error {
 public:
  using Error::Error;
};

/// Object id range the config's backend treats as object mentions.
std::pair<TokenId, TokenId> object_range(const RunConfig& config);

/// Builds the backend the config describes. For the synthetic source the
/// generated world's parameters are used.
std::unique_ptr<Backend> make_backend(const RunConfig& config);

/// id -> object name. Empty when config.vocab_map is empty; the synthetic
/// source falls back to its generated names.
std::map<TokenId, std::string> load_vocab_map(const RunConfig& config);

struct CorpusItem {
  std::string id;
  std::vector<TokenId> visual;
  std::vector<TokenId> prompt;
  std::vector<std::string> gt_objects;
  std::optional<bool> gold_yes;
  std::string question_object;
};

/// Reads corpus JSONL; rejects duplicate ids ("duplicate id ...") and
/// malformed lines with ConfigError. Throws IoError when unreadable.
std::vector<CorpusItem> read_corpus(const std::filesystem::path& path);
std::string corpus_item_to_json_line(const CorpusItem& item);

}  // namespace gcd::cli
