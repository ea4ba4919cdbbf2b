// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/mllm_client.hpp"

// Eigen has to precede httplib.h, which pulls in macros that break its templates.
#include "dubkit/artifacts.hpp"
#include "dubkit/error.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <set>

#include <httplib.h>

namespace dubkit::correct {

std::string content_id(std::string_view template_id, std::string_view prompt,
                       std::string_view vocal_track) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // field separator
    h *= 0x100000001b3ULL;
  };
  feed(template_id);
  feed(prompt);
  feed(vocal_track);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MllmRequest make_request(const CorrectionRequest& req, std::string_view template_id,
                         const TemplateRegistry& registry) {
  MllmRequest out;
  out.clip_id = req.clip_id;
  out.template_id = std::string(template_id);
  out.prompt = render_prompt(req, template_id, registry);
  out.source = req;
  out.id = content_id(out.template_id, out.prompt, req.vocal_track);
  return out;
}

nlohmann::json request_payload(const MllmRequest& req) {
  return {{"id", req.id},
          {"clip_id", req.clip_id},
          {"template_id", req.template_id},
          {"prompt", req.prompt},
          {"vocal_track", req.source.vocal_track}};
}

// --- mock --------------------------------------------------------------------

MockMllmClient::MockMllmClient(std::filesystem::path fixture_dir) : fixture_dir_(std::move(fixture_dir)) {}

CorrectionResponse MockMllmClient::echo(const CorrectionRequest& req) {
  CorrectionResponse resp;
  resp.transcript = req.asr_transcript;
  std::set<std::string> seen;
  for (const auto& t : req.tuples) {
    if (seen.insert(t.speaker).second) resp.speakers.push_back({t.speaker, Gender::kUnknown, AgeGroup::kUnknown, {}});
  }
  resp.speaker_count = static_cast<int>(resp.speakers.size());
  resp.emotion = "neutral";
  return resp;
}

std::string MockMllmClient::complete(const MllmRequest& req) {
  if (!fixture_dir_.empty()) {
    const auto path = fixture_dir_ / (req.clip_id + ".txt");
    if (std::filesystem::exists(path)) return artifacts::read_file(path);
  }
  return render_response(echo(req.source));
}

// --- subprocess ----------------------------------------------------------------

namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

SubprocessMllmClient::SubprocessMllmClient(std::vector<std::string> argv, std::chrono::milliseconds timeout)
    : argv_(std::move(argv)), timeout_(timeout) {
  if (argv_.empty()) throw ConfigError("subprocess transport needs a command");
}

std::string SubprocessMllmClient::complete(const MllmRequest& req) {
  const std::string input = request_payload(req).dump() + "\n";
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw Error("mllm subprocess: pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error("mllm subprocess: pipe failed");
  }
  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error("mllm subprocess: fork failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  int wfd = in_pipe[1];
  int rfd = out_pipe[0];
  ::fcntl(wfd, F_SETFL, O_NONBLOCK);

  std::string output;
  std::size_t written = 0;
  bool timed_out = false;
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (rfd >= 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd fds[2];
    nfds_t n = 0;
    fds[n++] = {rfd, POLLIN, 0};
    if (wfd >= 0) fds[n++] = {wfd, POLLOUT, 0};
    const int rc = ::poll(fds, n, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = ::write(wfd, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();
      if (written == input.size()) close_fd(wfd);
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[4096];
      const ssize_t r = ::read(rfd, buf, sizeof buf);
      if (r > 0) {
        output.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        close_fd(rfd);
      }
    }
  }
  close_fd(wfd);
  close_fd(rfd);
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    throw Error("mllm subprocess timed out after " + std::to_string(timeout_.count()) + " ms");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error("mllm subprocess exited abnormally for " + req.clip_id);
  }
  return output;
}

// --- http ----------------------------------------------------------------------

HttpMllmClient::HttpMllmClient(std::string base_url, std::string path, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), path_(std::move(path)), timeout_(timeout) {
  if (base_url_.empty()) throw ConfigError("http transport needs a url");
}

std::string HttpMllmClient::complete(const MllmRequest& req) {
  httplib::Client cli(base_url_);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  const auto res = cli.Post(path_, request_payload(req).dump(), "application/json");
  if (!res) throw Error("mllm http: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error("mllm http: status " + std::to_string(res->status));
  return res->body;
}

// --- bounded -------------------------------------------------------------------

BoundedMllmClient::BoundedMllmClient(std::unique_ptr<MllmClient> inner, int max_parallel, int retries)
    : inner_(std::move(inner)), slots_(max_parallel), retries_(retries) {
  if (!inner_) throw ConfigError("bounded client needs a transport");
  if (max_parallel < 1 || max_parallel > kMaxParallel) {
    throw ConfigError("mllm max_parallel must be in [1, " + std::to_string(kMaxParallel) + "]");
  }
  if (retries < 0) throw ConfigError("mllm retries must be non-negative");
}

std::string BoundedMllmClient::complete(const MllmRequest& req) {
  {
    std::lock_guard lock(mu_);
    if (const auto it = cache_.find(req.id); it != cache_.end()) return it->second;
  }
  std::string last_error;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    slots_.acquire();
    try {
      {
        std::lock_guard lock(mu_);
        ++calls_;
      }
      std::string reply = inner_->complete(req);
      slots_.release();
      std::lock_guard lock(mu_);
      return cache_.emplace(req.id, std::move(reply)).first->second;
    } catch (const std::exception& e) {
      slots_.release();
      last_error = e.what();
    }
  }
  throw Error("mllm request " + req.id + " failed after " + std::to_string(retries_ + 1) +
              " attempts: " + last_error);
}

std::size_t BoundedMllmClient::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

}  // namespace dubkit::correct
