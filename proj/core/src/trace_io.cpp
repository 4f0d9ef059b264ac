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

#include "gcd/trace_io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "gcd/errors.hpp"

namespace gcd {
namespace {

using nlohmann::json;

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : "null"; }

template <typename T>
std::string int_list(const std::vector<T>& values) {
  return fmt::format("[{}]", fmt::join(values, ","));
}

std::string entries_json(const TopEntries& entries) {
  std::string out = "[";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ',';
    out += fmt::format("[{},{}]", entries[i].first, format_real(entries[i].second));
  }
  out += ']';
  return out;
}

std::optional<double> optional_real_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

TopEntries entries_from(const json& j, const char* key) {
  TopEntries out;
  if (!j.contains(key)) return out;
  for (const json& e : j[key]) out.emplace_back(e.at(0).get<TokenId>(), e.at(1).get<double>());
  return out;
}

Termination termination_from(const std::string& name) {
  if (name == "eos") return Termination::kEos;
  if (name == "max_length") return Termination::kMaxLength;
  throw ProtocolError("unknown termination \"" + name + "\"");
}

template <typename Record, typename Parse>
std::vector<Record> read_lines(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const std::exception& e) {
      throw ProtocolError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return out;
}

}  // namespace

std::string format_real(double value) {
  if (!std::isfinite(value)) return "null";
  return fmt::format("{:.17g}", value);
}

std::string trace_to_json_line(const TraceRecord& r) {
  const StepTrace& s = r.trace;
  return fmt::format(
      "{{\"item\":{},\"seed\":{},\"step\":{},\"token\":{},\"alpha2\":{},\"eta\":{},\"kept_text_positions\":{},"
      "\"pruned_text_tokens\":{},\"kept_visual_positions\":{},\"p_orig\":{},\"p_vis_hal\":{},\"p_vis_txt_hal\":{},"
      "\"vd\":{},\"vtd\":{},\"jsd_hal\":{}}}",
      json(r.item).dump(), r.seed, s.step, s.token, optional_real(s.alpha2),
      s.eta ? std::to_string(*s.eta) : std::string("null"), int_list(s.kept_text_positions),
      int_list(s.pruned_text_tokens), int_list(s.kept_visual_positions), entries_json(s.p_orig),
      entries_json(s.p_vis_hal), entries_json(s.p_vis_txt_hal), optional_real(s.vd), optional_real(s.vtd),
      optional_real(s.jsd_hal));
}

TraceRecord trace_from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    TraceRecord r;
    r.item = j.at("item").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    StepTrace& s = r.trace;
    s.step = j.at("step").get<std::size_t>();
    s.token = j.at("token").get<TokenId>();
    s.alpha2 = optional_real_from(j, "alpha2");
    if (j.contains("eta") && !j["eta"].is_null()) s.eta = j["eta"].get<std::size_t>();
    s.kept_text_positions = j.value("kept_text_positions", std::vector<std::size_t>{});
    s.pruned_text_tokens = j.value("pruned_text_tokens", std::vector<TokenId>{});
    s.kept_visual_positions = j.value("kept_visual_positions", std::vector<std::size_t>{});
    s.p_orig = entries_from(j, "p_orig");
    s.p_vis_hal = entries_from(j, "p_vis_hal");
    s.p_vis_txt_hal = entries_from(j, "p_vis_txt_hal");
    s.vd = optional_real_from(j, "vd");
    s.vtd = optional_real_from(j, "vtd");
    s.jsd_hal = optional_real_from(j, "jsd_hal");
    return r;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed trace line: ") + e.what());
  }
}

std::vector<TraceRecord> read_traces(const std::filesystem::path& path) {
  return read_lines<TraceRecord>(path, trace_from_json_line);
}

std::string generation_to_json_line(const GenerationRecord& r) {
  return fmt::format("{{\"id\":{},\"seed\":{},\"tokens\":{},\"termination\":\"{}\"}}", json(r.id).dump(), r.seed,
                     int_list(r.tokens), to_string(r.termination));
}

GenerationRecord generation_from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    GenerationRecord r;
    r.id = j.at("id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.tokens = j.at("tokens").get<std::vector<TokenId>>();
    r.termination = termination_from(j.at("termination").get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed generation line: ") + e.what());
  }
}

std::vector<GenerationRecord> read_generations(const std::filesystem::path& path) {
  return read_lines<GenerationRecord>(path, generation_from_json_line);
}

}  // namespace gcd
