// Copyright 2026 The BiasForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "biasforge/error.hpp"
#include "biasforge/filter_engine.hpp"
#include "biasforge/prompt_builder.hpp"
#include "biasforge/text_norm.hpp"

namespace biasforge {

inline constexpr std::string_view kApiKeyEnv = "BIASFORGE_API_KEY";

// Prepended to the hypothesis in the user message.
inline constexpr std::string_view kCorrectionInstruction =
    "Correct the following first-pass transcript. Keep every <sc> speaker "
    "change marker. Output only the corrected transcript.\n\nTranscript: ";

struct DecodeParams {
  double temperature = 0.0;
  std::optional<int> max_output_tokens;
};

struct CorrectionRequest {
  PromptText system_prompt;
  std::string user_text;  // first-pass SOT hypothesis
  std::string model_id;
  DecodeParams decode;

  void validate() const;
};

struct CorrectionResponse {
  std::string corrected_text;
  std::int64_t latency_ms = 0;
  int http_status = 0;  // 0 for the offline mock
  int attempts = 0;
};

struct EndpointConfig {
  std::string endpoint_url;
  std::string model_id;
  double timeout_s = 30.0;
  int max_retries = 3;
  int max_concurrency = 4;
  std::string api_key;
  // First retry delay; doubles on every further retry.
  std::chrono::milliseconds backoff_base{250};

  // Reads the keys endpoint_url, model_id, timeout_s, max_retries and
  // max_concurrency; anything absent keeps its default.
  static EndpointConfig from_json(const nlohmann::json& j);
  // Fills api_key from BIASFORGE_API_KEY when it is unset.
  void load_api_key_from_env();
};

class GatewayError : public Error {
 public:
  using Error::Error;
};
class AuthError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class TimeoutError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class MalformedResponseError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class TransportError : public GatewayError {
 public:
  TransportError(const std::string& what, int status = 0)
      : GatewayError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

std::string wrap_hypothesis(std::string_view hypothesis);

// Chat-completions request body.
nlohmann::json build_request_body(const CorrectionRequest& request);

// One chat-completions call with up to max_retries retries on transport
// failures, timeouts, 429 and 5xx. Authentication failures and malformed
// bodies are not retried.
CorrectionResponse correct_remote(const CorrectionRequest& request,
                                  const EndpointConfig& config);

struct CorrectionOutcome {
  std::string text;  // corrected text, or the input on failure
  bool corrected = false;
  std::string error;
  std::int64_t latency_ms = 0;
};

// Runs requests with at most config.max_concurrency in flight. Failures are
// recorded per item instead of aborting; results keep input order.
std::vector<CorrectionOutcome> correct_remote_batch(
    const std::vector<CorrectionRequest>& requests, const EndpointConfig& config);

struct MockParams {
  int d_max = 2;
  std::size_t max_span = 3;
};

// Offline surrogate for the LLM. Each segment of each rare run is matched to
// its nearest list entry; spans within d_max are replaced, longest span
// first, then lowest distance, without overlaps. Spans containing a word
// that is already a list word are left alone, which makes the operation
// idempotent.
CorrectionResponse correct_mock(std::string_view hypothesis,
                                const std::vector<std::string>& filtered_list,
                                const CommonWordSet& common,
                                const MockParams& params = {});

}  // namespace biasforge
