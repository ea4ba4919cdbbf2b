// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// MLLM transport contract. See docs/mllm-contract.md.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dubkit/correct.hpp"

namespace dubkit::correct {

struct MllmRequest {
  std::string id;  // content hash of everything below
  std::string clip_id;
  std::string template_id;
  std::string prompt;
  CorrectionRequest source;
};

/// FNV-1a 64 over the template id, prompt and vocal track path, as 16 hex digits.
std::string content_id(std::string_view template_id, std::string_view prompt,
                       std::string_view vocal_track);

MllmRequest make_request(const CorrectionRequest& req, std::string_view template_id,
                         const TemplateRegistry& registry);

/// Wire payload: {"id", "clip_id", "template_id", "prompt", "vocal_track"}.
nlohmann::json request_payload(const MllmRequest& req);

class MllmClient {
 public:
  virtual ~MllmClient() = default;
  /// Raw model reply. Throws dubkit::Error on transport failure or timeout.
  virtual std::string complete(const MllmRequest& req) = 0;
};

/// Deterministic stand-in for tests and dry runs. Replies with
/// `<fixture_dir>/<clip_id>.txt` when that file exists, otherwise with an
/// echo response: the ASR transcript unchanged, one speaker per diarization
/// label with unknown attributes, empty clues, neutral emotion.
class MockMllmClient final : public MllmClient {
 public:
  explicit MockMllmClient(std::filesystem::path fixture_dir = {});
  std::string complete(const MllmRequest& req) override;

  static CorrectionResponse echo(const CorrectionRequest& req);

 private:
  std::filesystem::path fixture_dir_;
};

/// Runs `argv` per request, writes the JSON payload to its stdin and takes
/// stdout as the reply. A non-zero exit status or timeout is an error.
class SubprocessMllmClient final : public MllmClient {
 public:
  SubprocessMllmClient(std::vector<std::string> argv, std::chrono::milliseconds timeout);
  std::string complete(const MllmRequest& req) override;

 private:
  std::vector<std::string> argv_;
  std::chrono::milliseconds timeout_;
};

/// POSTs the JSON payload to `base_url` + `path`; the response body is the reply.
class HttpMllmClient final : public MllmClient {
 public:
  HttpMllmClient(std::string base_url, std::string path, std::chrono::milliseconds timeout);
  std::string complete(const MllmRequest& req) override;

 private:
  std::string base_url_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

/// Caps in-flight calls across all threads, retries failures and memoizes
/// replies by request id, which makes retries and reruns idempotent.
class BoundedMllmClient final : public MllmClient {
 public:
  BoundedMllmClient(std::unique_ptr<MllmClient> inner, int max_parallel, int retries);
  std::string complete(const MllmRequest& req) override;

  std::size_t calls() const;  // transport calls actually issued

 private:
  static constexpr std::ptrdiff_t kMaxParallel = 256;

  std::unique_ptr<MllmClient> inner_;
  std::counting_semaphore<kMaxParallel> slots_;
  int retries_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> cache_;
  std::size_t calls_ = 0;
};

}  // namespace dubkit::correct
