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

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gcd/errors.hpp"
#include "gcd/forward_server.hpp"
#include "gcd_cli/commands.hpp"
#include "gcd_cli/config.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("gcd");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("GCD_LOG");
  const std::string name = level ? level : "error";
  if (name == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (name == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::err);
  }
}

int serve(const std::string& config_path, const std::string& host, int port) {
  using namespace gcd;
  try {
    const cli::RunConfig config = cli::load_run_config(config_path);
    const auto backend = cli::make_backend(config);
    ForwardServer server(*backend);
    spdlog::info("serving {} backend on {}:{}", to_string(backend->descriptor().kind), host, port);
    server.listen(host, port);
  } catch (const cli::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kIoFailure;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kBackendFailure;
  }
  return cli::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Generalized contrastive decoding toolkit"};
  app.require_subcommand(1);

  gcd::cli::GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Run generations over a corpus");
  generate->add_option("--config", gen.config, "Run config JSON")->required();
  generate->add_option("--method", gen.method, "baseline | m3id | sid | crops");
  generate->add_option("--seed", gen.seeds, "Seed(s); overrides the config list");
  generate->add_option("--corpus", gen.corpus, "Corpus JSONL");
  generate->add_option("--out", gen.out, "Output directory");
  generate->add_option("--set", gen.overrides, "Override a config key, e.g. generation.alpha=0.5");

  gcd::cli::EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score generations (chair | pope)");
  eval_cmd->add_option("kind", eval.kind, "chair | pope")->required()->check(CLI::IsMember({"chair", "pope"}));
  eval_cmd->add_option("--generations", eval.generations, "generations.jsonl")->required();
  eval_cmd->add_option("--corpus", eval.corpus, "Corpus JSONL")->required();
  eval_cmd->add_option("--out", eval.out, "Report JSON path")->required();
  eval_cmd->add_option("--config", eval.config, "Run config (object range, vocab map, POPE tokens)");

  gcd::cli::AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Dependency curves from traces");
  analyze_cmd->add_option("kind", analyze.kind, "dependency")->required()->check(CLI::IsMember({"dependency"}));
  analyze_cmd->add_option("--traces", analyze.traces, "Trace JSONL file(s)")->required();
  analyze_cmd->add_option("--out", analyze.out, "Output directory")->required();

  gcd::cli::SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic captioning config and corpus");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--items", synth.items, "Corpus size");
  synth_cmd->add_option("--set", synth.overrides, "Override a config key");

  std::string serve_config;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Expose the configured backend over the forward protocol");
  serve_cmd->add_option("--config", serve_config, "Run config JSON")->required();
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gcd::cli::kConfigFailure;
  }

  if (*generate) return gcd::cli::cmd_generate(gen, std::cerr);
  if (*eval_cmd) return gcd::cli::cmd_eval(eval, std::cerr);
  if (*analyze_cmd) return gcd::cli::cmd_analyze(analyze, std::cerr);
  if (*synth_cmd) return gcd::cli::cmd_synth(synth, std::cerr);
  if (*serve_cmd) return serve(serve_config, host, port);
  return gcd::cli::kConfigFailure;
}
