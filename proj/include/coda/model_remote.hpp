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

// Victim backends reached over the wire.
//   HTTP:  POST /predict {"snippets": [...]} -> {"probabilities": [[...], ...]}
//   stdio: the same objects, one per line, over a child process's pipes.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "coda/error.hpp"
#include "coda/http.hpp"
#include "coda/model.hpp"

extern char** environ;

namespace coda {

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(const std::string& url, HttpOptions opts = {})
      : url_(url), endpoint_(parse_endpoint(url, "/predict")), opts_(opts) {}

  std::vector<PredictionVector> predict(const std::vector<std::string>& snippets) override {
    nlohmann::json body;
    body["snippets"] = snippets;
    const nlohmann::json reply = post_json<ModelUnavailable>(endpoint_, body, opts_);
    return decode_probabilities(reply, snippets.size());
  }

  std::string fingerprint() const override { return "http:" + url_; }

 private:
  std::string url_;
  Endpoint endpoint_;
  HttpOptions opts_;
};

/// Runs `command` through /bin/sh once and keeps it for the campaign. A dead
/// or misbehaving child is restarted up to `retries` times per request.
class StdioBackend final : public Backend {
 public:
  explicit StdioBackend(std::string command, int retries = 2)
      : command_(std::move(command)), retries_(retries) {
    // A dead child must surface as EPIPE on write, not terminate us.
    ::signal(SIGPIPE, SIG_IGN);
    spawn();
  }

  ~StdioBackend() override { stop(); }

  StdioBackend(const StdioBackend&) = delete;
  StdioBackend& operator=(const StdioBackend&) = delete;

  std::vector<PredictionVector> predict(const std::vector<std::string>& snippets) override {
    nlohmann::json body;
    body["snippets"] = snippets;
    const std::string line = body.dump() + "\n";
    std::lock_guard<std::mutex> lock(mu_);
    std::string reason;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      if (pid_ <= 0) spawn();
      std::string reply;
      if (!write_all(line)) {
        reason = "write to victim failed";
      } else if (!read_line(reply)) {
        reason = "victim closed its output";
      } else {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(reply);
        } catch (const nlohmann::json::exception& e) {
          throw MalformedResponse(std::string("unparseable victim reply: ") + e.what());
        }
        return decode_probabilities(j, snippets.size());
      }
      stop();
    }
    throw ModelUnavailable("stdio victim '" + command_ + "': " + reason);
  }

  std::string fingerprint() const override { return "stdio:" + command_; }

  pid_t pid() const { return pid_; }

 private:
  std::string command_;
  int retries_;
  std::mutex mu_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;

  void spawn() {
    int in[2], out[2];
    if (::pipe(in) != 0) throw ModelUnavailable(std::string("pipe: ") + std::strerror(errno));
    if (::pipe(out) != 0) {
      ::close(in[0]);
      ::close(in[1]);
      throw ModelUnavailable(std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&fa, out[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&fa, in[1]);
    posix_spawn_file_actions_addclose(&fa, out[0]);
    std::string sh = "/bin/sh", flag = "-c", cmd = command_;
    char* argv[] = {sh.data(), flag.data(), cmd.data(), nullptr};
    pid_t pid = -1;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &fa, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&fa);
    ::close(in[0]);
    ::close(out[1]);
    if (rc != 0) {
      ::close(in[1]);
      ::close(out[0]);
      throw ModelUnavailable("cannot start '" + command_ + "': " + std::strerror(rc));
    }
    ::fcntl(in[1], F_SETFD, FD_CLOEXEC);
    ::fcntl(out[0], F_SETFD, FD_CLOEXEC);
    pid_ = pid;
    to_child_ = in[1];
    from_child_ = out[0];
    buffer_.clear();
  }

  void stop() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
      int status = 0;
      for (int i = 0; i < 100; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }

  bool write_all(const std::string& s) {
    std::size_t off = 0;
    while (off < s.size()) {
      const ssize_t n = ::write(to_child_, s.data() + off, s.size() - off);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      off += static_cast<std::size_t>(n);
    }
    return true;
  }

  bool read_line(std::string& line) {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      char chunk[4096];
      const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

}  // namespace coda
