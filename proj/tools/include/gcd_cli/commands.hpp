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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gcd::cli {

enum ExitCode : int { kOk = 0, kConfigFailure = 1, kIoFailure = 2, kBackendFailure = 3 };

struct GenerateArgs {
  std::string config;
  std::optional<std::string> method;
  std::vector<std::uint64_t> seeds;
  std::string corpus;
  std::string out;
  /// "dotted.key=value" config overrides.
  std::vector<std::string> overrides;
};

/// Writes traces_seed<N>.jsonl per seed and generations.jsonl into args.out.
int cmd_generate(const GenerateArgs& args, std::ostream& log);

struct EvalArgs {
  std::string kind;  // "chair" | "pope"
  std::string generations;
  std::string corpus;
  std::string out;
  std::optional<std::string> config;
};

/// Writes a report JSON: per metric, the value per seed and the mean.
int cmd_eval(const EvalArgs& args, std::ostream& log);

struct AnalyzeArgs {
  std::string kind = "dependency";
  std::vector<std::string> traces;
  std::string out;
};

/// Writes vd.csv, vtd.csv and jsd.csv (per-step means over items) into args.out.
int cmd_analyze(const AnalyzeArgs& args, std::ostream& log);

struct SynthArgs {
  std::string out;
  std::vector<std::string> overrides;
  std::size_t items = 100;
};

/// Writes config.json and corpus.jsonl for the synthetic captioning world.
int cmd_synth(const SynthArgs& args, std::ostream& log);

}  // namespace gcd::cli
