// Copyright 2026 The Coda Authors
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

// JSON-over-HTTP POST with bounded retries, shared by the model and
// embedding clients.

#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace coda {

struct HttpOptions {
  int retries = 3;  // attempts after the first
  int timeout_ms = 30000;
  int backoff_ms = 50;
};

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

/// Splits "http://host:port/path" into base and path, using `default_path`
/// when the URL has none.
inline Endpoint parse_endpoint(const std::string& url, const std::string& default_path) {
  const auto scheme = url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = url.find('/', host_start);
  Endpoint e;
  std::string base = slash == std::string::npos ? url : url.substr(0, slash);
  if (scheme == std::string::npos) base = "http://" + base;
  e.base = base;
  e.path = slash == std::string::npos || slash + 1 == url.size() ? default_path
                                                                : url.substr(slash);
  return e;
}

/// POSTs `body` and returns the parsed JSON reply. Transport failures and 5xx
/// replies are retried; anything else non-200 fails at once. Failures throw
/// `Err` carrying the last reason.
template <typename Err>
nlohmann::json post_json(const Endpoint& ep, const nlohmann::json& body, const HttpOptions& opts) {
  const std::string payload = body.dump();
  std::string reason;
  for (int attempt = 0; attempt <= opts.retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(opts.backoff_ms * attempt));
    httplib::Client client(ep.base);
    const auto timeout = std::chrono::milliseconds(opts.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(ep.path, payload, "application/json");
    if (!res) {
      reason = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw Err(std::string("unparseable reply from ") + ep.base + ep.path + ": " + e.what());
      }
    }
    reason = "HTTP " + std::to_string(res->status);
    if (res->status < 500) break;
  }
  throw Err(ep.base + ep.path + " failed: " + reason);
}

}  // namespace coda
