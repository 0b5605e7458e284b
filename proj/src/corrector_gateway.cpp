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

#include "biasforge/corrector_gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <unordered_set>

#include "httplib.h"

#include "biasforge/match_index.hpp"
#include "biasforge/parallel.hpp"
#include "biasforge/sot.hpp"

namespace biasforge {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start)
      .count();
}

struct Url {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("endpoint URL needs a scheme: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string extract_content(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedResponseError(std::string("response is not JSON: ") + e.what());
  }
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw MalformedResponseError("content is not a string");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw MalformedResponseError(std::string("unexpected response shape: ") + e.what());
  }
}

}  // namespace

void CorrectionRequest::validate() const {
  if (user_text.empty()) throw ValidationError("correction request has empty user text");
  if (decode.temperature < 0) throw ValidationError("temperature must be >= 0");
}

EndpointConfig EndpointConfig::from_json(const json& j) {
  EndpointConfig c;
  c.endpoint_url = j.value("endpoint_url", c.endpoint_url);
  c.model_id = j.value("model_id", c.model_id);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
  return c;
}

void EndpointConfig::load_api_key_from_env() {
  if (!api_key.empty()) return;
  if (const char* v = std::getenv(std::string(kApiKeyEnv).c_str())) api_key = v;
}

std::string wrap_hypothesis(std::string_view hypothesis) {
  std::string s(kCorrectionInstruction);
  s += hypothesis;
  return s;
}

json build_request_body(const CorrectionRequest& request) {
  json body = {
      {"model", request.model_id},
      {"messages",
       json::array({{{"role", "system"}, {"content", request.system_prompt.text}},
                    {{"role", "user"}, {"content", wrap_hypothesis(request.user_text)}}})},
      {"temperature", request.decode.temperature},
  };
  if (request.decode.max_output_tokens) {
    body["max_tokens"] = *request.decode.max_output_tokens;
  }
  return body;
}

CorrectionResponse correct_remote(const CorrectionRequest& request,
                                  const EndpointConfig& config) {
  request.validate();
  if (config.endpoint_url.empty()) throw ValidationError("no endpoint URL configured");
  const Url url = split_url(config.endpoint_url);

  httplib::Client client(url.base);
  const auto timeout = std::chrono::duration<double>(config.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  if (!config.api_key.empty()) client.set_bearer_token_auth(config.api_key);

  const std::string body = build_request_body(request).dump();
  const auto start = Clock::now();
  const int attempts = 1 + std::max(0, config.max_retries);
  std::exception_ptr last;

  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(config.backoff_base * (1 << (attempt - 1)));
    }
    const auto sent = Clock::now();
    auto res = client.Post(url.path, body, "application/json");
    if (!res) {
      const auto err = res.error();
      const bool timed_out =
          err == httplib::Error::ConnectionTimeout ||
          (err == httplib::Error::Read &&
           std::chrono::duration<double>(Clock::now() - sent) >= timeout * 0.9);
      const std::string what = "request to " + config.endpoint_url + " failed: " +
                               httplib::to_string(err);
      last = timed_out ? std::make_exception_ptr(TimeoutError(what))
                       : std::make_exception_ptr(TransportError(what));
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " +
                      std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      last = std::make_exception_ptr(
          TransportError("HTTP " + std::to_string(res->status), res->status));
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw TransportError("HTTP " + std::to_string(res->status), res->status);
    }
    CorrectionResponse out;
    out.corrected_text = extract_content(res->body);
    out.http_status = res->status;
    out.attempts = attempt + 1;
    out.latency_ms = elapsed_ms(start);
    return out;
  }
  std::rethrow_exception(last);
}

std::vector<CorrectionOutcome> correct_remote_batch(
    const std::vector<CorrectionRequest>& requests, const EndpointConfig& config) {
  std::vector<CorrectionOutcome> out(requests.size());
  parallel_for(requests.size(), static_cast<std::size_t>(std::max(1, config.max_concurrency)),
               [&](std::size_t i) {
                 auto& o = out[i];
                 try {
                   const auto r = correct_remote(requests[i], config);
                   o.text = r.corrected_text;
                   o.corrected = true;
                   o.latency_ms = r.latency_ms;
                 } catch (const Error& e) {
                   o.text = requests[i].user_text;
                   o.error = e.what();
                 }
               });
  return out;
}

CorrectionResponse correct_mock(std::string_view hypothesis,
                                const std::vector<std::string>& filtered_list,
                                const CommonWordSet& common,
                                const MockParams& params) {
  const auto transcript = parse_sot(hypothesis);
  std::vector<std::vector<Token>> segments;
  segments.reserve(transcript.segments.size());
  for (const auto& s : transcript.segments) segments.push_back(s.tokens);

  if (!filtered_list.empty()) {
    const MatchIndex index(filtered_list);
    std::unordered_set<std::string> anchors;
    for (const auto& entry : filtered_list) {
      for (auto& t : normalize_tokenize(entry)) anchors.insert(std::move(t));
    }

    struct Replacement {
      std::size_t start;
      std::size_t length;
      int distance;
      std::uint32_t entry;
    };

    for (auto& tokens : segments) {
      std::vector<Replacement> candidates;
      for (const auto& run : remove_common(tokens, common)) {
        for (const auto& seg : enumerate_segments(run, params.max_span)) {
          const bool anchored = std::any_of(
              run.tokens.begin() + static_cast<long>(seg.offset),
              run.tokens.begin() + static_cast<long>(seg.offset + seg.length),
              [&](const Token& t) { return anchors.count(t) != 0; });
          if (anchored) continue;
          const auto best = index.top_n(seg.joined, 1);
          if (best.empty() || best.front().distance > params.d_max) continue;
          candidates.push_back({run.start_index + seg.offset, seg.length,
                                best.front().distance, best.front().entry});
        }
      }
      std::sort(candidates.begin(), candidates.end(),
                [&](const Replacement& a, const Replacement& b) {
                  if (a.length != b.length) return a.length > b.length;
                  if (a.distance != b.distance) return a.distance < b.distance;
                  if (a.start != b.start) return a.start < b.start;
                  return index.entry(a.entry) < index.entry(b.entry);
                });
      std::vector<bool> covered(tokens.size(), false);
      std::vector<const Replacement*> at(tokens.size(), nullptr);
      for (const auto& c : candidates) {
        if (std::any_of(covered.begin() + static_cast<long>(c.start),
                        covered.begin() + static_cast<long>(c.start + c.length),
                        [](bool b) { return b; })) {
          continue;
        }
        std::fill(covered.begin() + static_cast<long>(c.start),
                  covered.begin() + static_cast<long>(c.start + c.length), true);
        at[c.start] = &c;
      }
      std::vector<Token> rebuilt;
      for (std::size_t i = 0; i < tokens.size();) {
        if (at[i]) {
          for (auto& t : normalize_tokenize(index.entry(at[i]->entry))) {
            rebuilt.push_back(std::move(t));
          }
          i += at[i]->length;
        } else {
          rebuilt.push_back(tokens[i]);
          ++i;
        }
      }
      tokens = std::move(rebuilt);
    }
  }

  CorrectionResponse out;
  out.corrected_text = join_sot(segments);
  out.attempts = 1;
  return out;
}

}  // namespace biasforge
