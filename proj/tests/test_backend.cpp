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

#include <gtest/gtest.h>
#include <httplib.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <thread>

#include "gcd/biased_mixture.hpp"
#include "gcd/errors.hpp"
#include "gcd/fixture_backend.hpp"
#include "gcd/forward_server.hpp"
#include "gcd/remote_backend.hpp"
#include "gcd/wire.hpp"
#include "scenarios.hpp"

namespace gcd {
namespace {

using namespace std::chrono_literals;

TokenSequence sample_sequence() {
  const std::vector<TokenId> v{2, 4}, x{0, 5}, y{3};
  return TokenSequence::from_segments(v, x, y);
}

TEST(Sequence, SegmentsAndPositions) {
  const auto seq = sample_sequence();
  EXPECT_EQ(seq.size(), 5u);
  EXPECT_EQ(seq.count(Segment::kVisual), 2u);
  EXPECT_EQ(seq.positions(Segment::kPrompt), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(seq.text_positions(), (std::vector<std::size_t>{2, 3, 4}));
  EXPECT_EQ(seq.back().segment, Segment::kGenerated);
}

TEST(Sequence, RejectsBadOrder) {
  EXPECT_THROW(TokenSequence({{0, Segment::kPrompt}, {2, Segment::kVisual}}), std::invalid_argument);
  EXPECT_THROW(TokenSequence({{2, Segment::kVisual}}), std::invalid_argument);
  EXPECT_THROW(segment_from_string("audio"), ProtocolError);
  EXPECT_EQ(segment_from_string(to_string(Segment::kGenerated)), Segment::kGenerated);
}

TEST(BiasedMixture, LogitsFollowConstruction) {
  auto params = testing::rescue_params();
  const std::vector<TokenId> v{2}, x{0, 5};
  const auto at_start = biased_mixture_logits(TokenSequence::from_segments(v, x, {}), params);
  EXPECT_DOUBLE_EQ(at_start[2], 2.0);
  EXPECT_DOUBLE_EQ(at_start[3], 0.0);
  const std::vector<TokenId> y{2};
  const auto after = biased_mixture_logits(TokenSequence::from_segments(v, x, y), params);
  EXPECT_DOUBLE_EQ(after[2], 2.0 * std::exp(-0.5));
  EXPECT_DOUBLE_EQ(after[3], 1.5);
  EXPECT_DOUBLE_EQ(visual_weight(params, 2), std::exp(-1.0));
}

TEST(BiasedMixture, AttentionHeadsAndNormalization) {
  // Two text keys at positions 0 and 1 of a length-2 sequence: bases 1 and 1.5.
  BiasedMixtureParams p;
  p.vocab_size = 8;
  p.head_count = 2;
  p.head_delta = 0.1;
  const std::vector<TokenId> x{0, 5};
  const auto rows = biased_mixture_attention(TokenSequence::from_segments({}, x, {}), p);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0][0], 0.4, 1e-15);
  EXPECT_NEAR(rows[0][1], 0.6, 1e-15);
  const double b = std::pow(1.5, 1.1);
  EXPECT_NEAR(rows[1][1], b / (1 + b), 1e-15);
  for (const auto& row : rows) {
    double s = 0;
    for (double v : row) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(BiasedMixture, ValidatesInputs) {
  const BiasedMixtureBackend backend(testing::rescue_params());
  const std::vector<TokenId> bad{0, 99};
  EXPECT_THROW(backend.forward(TokenSequence::from_segments({}, bad, {})), std::invalid_argument);
  BiasedMixtureParams p;
  p.vocab_size = 2;
  EXPECT_THROW(BiasedMixtureBackend{p}, ConfigError);
}

TEST(Validation, ForwardOutputShape) {
  BackendDescriptor d{4, 2, 2, BackendKind::kRemote, false};
  ForwardOutput good{{0, 0, 0, 0}, {{0.5, 0.5}, {1.0, 0.0}}};
  EXPECT_NO_THROW(validate_forward_output(d, 2, good));
  ForwardOutput short_logits{{0, 0, 0}, good.attention};
  EXPECT_THROW(validate_forward_output(d, 2, short_logits), ShapeMismatchError);
  ForwardOutput few_heads{good.logits, {{0.5, 0.5}}};
  EXPECT_THROW(validate_forward_output(d, 2, few_heads), ShapeMismatchError);
  ForwardOutput bad_row{good.logits, {{0.5, 0.6}, {1.0, 0.0}}};
  EXPECT_THROW(validate_forward_output(d, 2, bad_row), ProtocolError);
  ForwardOutput nan_logit{{0, std::nan(""), 0, 0}, good.attention};
  EXPECT_THROW(validate_forward_output(d, 2, nan_logit), ProtocolError);
}

TEST(Wire, RoundTripAndKey) {
  const auto seq = sample_sequence();
  EXPECT_EQ(wire::tokens_from_json(wire::tokens_to_json(seq)), seq);
  ForwardOutput out{{1.5, -std::numeric_limits<double>::infinity(), 0.25}, {{0.25, 0.75}}};
  EXPECT_EQ(wire::output_from_json(wire::output_to_json(out)), out);
  EXPECT_TRUE(wire::output_to_json(out)["logits"][1].is_null());
  EXPECT_EQ(wire::sequence_key(seq), wire::sha256_hex(wire::tokens_to_json(seq).dump()));
  EXPECT_EQ(wire::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_THROW(wire::output_from_json(nlohmann::json{{"logits", "x"}}), ProtocolError);
}

TEST(Fixture, RecordAndReplayGeneration) {
  const BiasedMixtureBackend live(testing::dependency_params());
  const RecordingBackend recorder(live);
  auto cfg = testing::greedy_crops(6);
  const auto first = generate(recorder, testing::dependency_visual(), testing::dependency_prompt(), cfg);

  const auto path = std::filesystem::temp_directory_path() / "gcd_fixture_test.jsonl";
  write_fixture(path, recorder.records());
  const auto replay = FixtureBackend::from_file(path);
  std::filesystem::remove(path);
  EXPECT_EQ(replay.size(), recorder.records().size());

  const auto second = generate(replay, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  EXPECT_EQ(second.tokens, first.tokens);
  const auto report = replay_trace(first, replay, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  EXPECT_TRUE(report.matches);

  const std::vector<TokenId> other{0, 6, 6};
  EXPECT_THROW(replay.forward(TokenSequence::from_segments({}, other, {})), FixtureMissError);
}

TEST(Fixture, RejectsEmptyRecordSet) {
  EXPECT_THROW(FixtureBackend(std::vector<FixtureRecord>{}), ConfigError);
}

// Serves one canned handler on an ephemeral port for the duration of a test.
class MockServer {
 public:
  explicit MockServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/forward", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RemoteOptions options_for(const std::string& endpoint, std::chrono::milliseconds timeout = 5000ms) {
  return RemoteOptions{endpoint, 8, 2, 2, timeout};
}

TEST(Remote, MatchesInProcessServer) {
  const BiasedMixtureBackend local(testing::dependency_params());
  ForwardServer server(local);
  server.start();
  const RemoteBackend remote(options_for(server.endpoint()));
  const auto seq = TokenSequence::from_segments(testing::dependency_visual(), testing::dependency_prompt(), {});
  EXPECT_EQ(remote.forward(seq), local.forward(seq));

  auto cfg = testing::greedy_crops(5);
  cfg.parallel_passes = true;
  const auto a = generate(remote, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  const auto b = generate(local, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  EXPECT_EQ(a.tokens, b.tokens);
  server.stop();
}

TEST(Remote, ServerRejectsBadRequests) {
  const BiasedMixtureBackend local(testing::dependency_params());
  ForwardServer server(local);
  const int port = server.start();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Post("/v1/forward", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  const std::vector<TokenId> x{0, 99};
  res = client.Post("/v1/forward", wire::forward_request(TokenSequence::from_segments({}, x, {}), 2).dump(),
                    "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  const std::vector<TokenId> ok{0, 5};
  res = client.Post("/v1/forward", wire::forward_request(TokenSequence::from_segments({}, ok, {}), 7).dump(),
                    "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  server.stop();
}

TEST(Remote, WrongLogitLengthIsShapeMismatch) {
  MockServer mock([](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"logits":[0,0,0],"attention":[[0.5,0.5],[0.5,0.5]]})", "application/json");
  });
  const RemoteBackend remote(options_for(mock.endpoint()));
  const std::vector<TokenId> x{0, 5};
  EXPECT_THROW(remote.forward(TokenSequence::from_segments({}, x, {})), ShapeMismatchError);
}

TEST(Remote, ServerErrorIsHttpStatus) {
  MockServer mock([](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content(R"({"error":"model crashed"})", "application/json");
  });
  const RemoteBackend remote(options_for(mock.endpoint()));
  const std::vector<TokenId> x{0, 5};
  try {
    remote.forward(TokenSequence::from_segments({}, x, {}));
    FAIL();
  } catch (const HttpStatusError& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_NE(std::string(e.what()).find("model crashed"), std::string::npos);
  }
}

TEST(Remote, MalformedJsonIsProtocolError) {
  MockServer mock([](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"logits\": [", "application/json");
  });
  const RemoteBackend remote(options_for(mock.endpoint()));
  const std::vector<TokenId> x{0, 5};
  EXPECT_THROW(remote.forward(TokenSequence::from_segments({}, x, {})), ProtocolError);
}

TEST(Remote, SlowServerTimesOut) {
  MockServer mock([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(600ms);
    res.set_content("{}", "application/json");
  });
  const RemoteBackend remote(options_for(mock.endpoint(), 150ms));
  const std::vector<TokenId> x{0, 5};
  EXPECT_THROW(remote.forward(TokenSequence::from_segments({}, x, {})), TimeoutError);
}

TEST(Remote, UnreachableIsTransportError) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  const RemoteBackend remote(options_for("http://127.0.0.1:" + std::to_string(port), 500ms));
  const std::vector<TokenId> x{0, 5};
  EXPECT_THROW(remote.forward(TokenSequence::from_segments({}, x, {})), TransportError);
}

TEST(Remote, RejectsBadEndpoint) {
  EXPECT_THROW(RemoteBackend(options_for("ftp://nowhere")), ConfigError);
  EXPECT_THROW(RemoteBackend(options_for("http://127.0.0.1:1", 0ms)), ConfigError);
}

}  // namespace
}  // namespace gcd
