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

#include <memory>
#include <string>

#include "gcd/backend.hpp"

namespace gcd {

/// Serves any Backend over the forward protocol on a background thread.
/// Used to expose the bundled backends to remote clients and as the
/// in-process peer in protocol tests.
class ForwardServer {
 public:
  explicit ForwardServer(const Backend& backend);
  ~ForwardServer();
  ForwardServer(const ForwardServer&) = delete;
  ForwardServer& operator=(const ForwardServer&) = delete;

  /// Binds to `host` on an ephemeral port (or `port` when non-zero), starts
  /// serving and returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread until stop() is called elsewhere.
  void listen(const std::string& host, int port);
  void stop();

  std::string endpoint() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gcd
