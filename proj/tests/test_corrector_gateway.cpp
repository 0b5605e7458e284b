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
#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <set>
#include <thread>

#include "httplib.h"

#include "biasforge/corrector_gateway.hpp"
#include "biasforge/error.hpp"
#include "biasforge/sot.hpp"
#include "oracles.hpp"

using namespace biasforge;
using nlohmann::json;

namespace {

json reply(const std::string& content) {
  return {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}};
}

std::string user_text(const httplib::Request& req) {
  const auto body = json::parse(req.body);
  std::string text = body.at("messages").at(1).at("content");
  return text.substr(kCorrectionInstruction.size());
}

class StubServer : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/echo", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content(reply(user_text(req)).dump(), "application/json");
    });
    server_.Post("/flaky", [this](const httplib::Request& req, httplib::Response& res) {
      if (flaky_calls_++ == 0) {
        res.status = 500;
        return;
      }
      res.set_content(reply(user_text(req)).dump(), "application/json");
    });
    server_.Post("/down", [this](const httplib::Request&, httplib::Response& res) {
      ++down_calls_;
      res.status = 503;
    });
    server_.Post("/slow", [](const httplib::Request& req, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(1500));
      res.set_content(reply(user_text(req)).dump(), "application/json");
    });
    server_.Post("/auth", [](const httplib::Request& req, httplib::Response& res) {
      if (req.get_header_value("Authorization") != "Bearer good") {
        res.status = 401;
        return;
      }
      res.set_content(reply("OK").dump(), "application/json");
    });
    server_.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json", "text/plain");
    });
    server_.Post("/inspect", [this](const httplib::Request& req, httplib::Response& res) {
      last_body_ = json::parse(req.body);
      res.set_content(reply("X").dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  EndpointConfig config(const std::string& path) const {
    EndpointConfig c;
    c.endpoint_url = "http://127.0.0.1:" + std::to_string(port_) + path;
    c.model_id = "stub-model";
    c.timeout_s = 5;
    c.backoff_base = std::chrono::milliseconds(5);
    return c;
  }

  static CorrectionRequest request(const std::string& hyp) {
    return {biasing_prompt({"STEVE"}), hyp, "stub-model", {}};
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> flaky_calls_{0};
  std::atomic<int> down_calls_{0};
  json last_body_;
};

}  // namespace

TEST_F(StubServer, EchoRoundTrip) {
  const auto r = correct_remote(request("HELLO <sc> STEE"), config("/echo"));
  EXPECT_EQ(r.corrected_text, "HELLO <sc> STEE");
  EXPECT_EQ(r.http_status, 200);
  EXPECT_EQ(r.attempts, 1);
}

TEST_F(StubServer, RetriesAfterServerError) {
  const auto r = correct_remote(request("A B"), config("/flaky"));
  EXPECT_EQ(r.corrected_text, "A B");
  EXPECT_EQ(r.attempts, 2);
}

TEST_F(StubServer, GivesUpAfterMaxRetries) {
  EXPECT_THROW(correct_remote(request("A"), config("/down")), TransportError);
  EXPECT_EQ(down_calls_.load(), 4);
}

TEST_F(StubServer, Timeout) {
  auto c = config("/slow");
  c.timeout_s = 0.3;
  c.max_retries = 0;
  EXPECT_THROW(correct_remote(request("A"), c), TimeoutError);
}

TEST_F(StubServer, AuthFailureIsNotRetried) {
  auto c = config("/auth");
  c.api_key = "bad";
  EXPECT_THROW(correct_remote(request("A"), c), AuthError);
  c.api_key = "good";
  EXPECT_EQ(correct_remote(request("A"), c).corrected_text, "OK");
}

TEST_F(StubServer, MalformedBody) {
  EXPECT_THROW(correct_remote(request("A"), config("/garbage")), MalformedResponseError);
}

TEST_F(StubServer, RequestShape) {
  correct_remote(request("HELLO"), config("/inspect"));
  EXPECT_EQ(last_body_.at("model"), "stub-model");
  EXPECT_EQ(last_body_.at("temperature"), 0.0);
  EXPECT_EQ(last_body_.at("messages").at(0).at("role"), "system");
  EXPECT_EQ(last_body_.at("messages").at(0).at("content"), biasing_prompt({"STEVE"}).text);
  EXPECT_EQ(last_body_.at("messages").at(1).at("role"), "user");
  EXPECT_EQ(last_body_.at("messages").at(1).at("content"), wrap_hypothesis("HELLO"));
}

TEST_F(StubServer, BatchRecordsFailuresInOrder) {
  std::vector<CorrectionRequest> reqs;
  for (int i = 0; i < 10; ++i) reqs.push_back(request("U" + std::to_string(i)));
  auto c = config("/echo");
  c.max_concurrency = 3;
  const auto ok = correct_remote_batch(reqs, c);
  for (int i = 0; i < 10; ++i) {
    EXPECT_TRUE(ok[i].corrected);
    EXPECT_EQ(ok[i].text, "U" + std::to_string(i));
  }
  auto bad = config("/slow");
  bad.timeout_s = 0.2;
  bad.max_retries = 0;
  const auto failed = correct_remote_batch({request("KEEP")}, bad);
  EXPECT_FALSE(failed[0].corrected);
  EXPECT_EQ(failed[0].text, "KEEP");
  EXPECT_FALSE(failed[0].error.empty());
}

TEST(CorrectRemote, RejectsBadRequests) {
  EndpointConfig c;
  c.endpoint_url = "http://127.0.0.1:9/x";
  EXPECT_THROW(correct_remote({baseline_prompt(), "", "m", {}}, c), ValidationError);
  CorrectionRequest neg{baseline_prompt(), "A", "m", {}};
  neg.decode.temperature = -1;
  EXPECT_THROW(correct_remote(neg, c), ValidationError);
  c.endpoint_url = "no-scheme";
  EXPECT_THROW(correct_remote({baseline_prompt(), "A", "m", {}}, c), ValidationError);
}

TEST(EndpointConfig, FromJsonAndEnv) {
  const auto c = EndpointConfig::from_json(
      {{"endpoint_url", "http://h/v1"}, {"model_id", "m"}, {"timeout_s", 2.5},
       {"max_retries", 1}, {"max_concurrency", 8}});
  EXPECT_EQ(c.endpoint_url, "http://h/v1");
  EXPECT_EQ(c.timeout_s, 2.5);
  EXPECT_EQ(c.max_retries, 1);
  EXPECT_EQ(c.max_concurrency, 8);
  EXPECT_EQ(EndpointConfig::from_json(json::object()).max_concurrency, 4);
  setenv("BIASFORGE_API_KEY", "secret", 1);
  EndpointConfig e;
  e.load_api_key_from_env();
  EXPECT_EQ(e.api_key, "secret");
  unsetenv("BIASFORGE_API_KEY");
}

// ---- offline mock ----

namespace {
const CommonWordSet kCommon =
    CommonWordSet::from_ranked({"MORE", "THAN", "THE", "SPEAKER", "AS", "M"});
}

TEST(CorrectMock, WorkedExample) {
  MockParams p;
  p.d_max = 3;
  const auto r = correct_mock("MORE THAN THE SPEAKER CHARACE THSATION AS STEE",
                              {"CHARACTERISATION", "STEVE"}, kCommon, p);
  EXPECT_EQ(r.corrected_text, "MORE THAN THE SPEAKER CHARACTERISATION AS STEVE");
}

TEST(CorrectMock, EmptyListIsIdentity) {
  EXPECT_EQ(correct_mock("A STEE <sc> B", {}, kCommon).corrected_text, "A STEE <sc> B");
}

TEST(CorrectMock, ThresholdBoundary) {
  MockParams p;
  p.d_max = 2;
  EXPECT_EQ(correct_mock("ABCDEFG", {"ABCXYZG"}, kCommon, p).corrected_text, "ABCDEFG");
  p.d_max = 3;
  EXPECT_EQ(correct_mock("ABCDEFG", {"ABCXYZG"}, kCommon, p).corrected_text, "ABCXYZG");
}

TEST(CorrectMock, PreservesMarkers) {
  EXPECT_EQ(correct_mock("THE STEE <sc> AS STEVO", {"STEVE"}, kCommon).corrected_text,
            "THE STEVE <sc> AS STEVE");
}

TEST(CorrectMock, Properties) {
  std::mt19937_64 rng(5);
  const std::string alpha = "ABCDE";
  for (int t = 0; t < 500; ++t) {
    std::vector<std::string> list;
    for (int i = 0; i < 8; ++i) list.push_back(oracle::random_word(rng, 2, 7, alpha));
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    std::string hyp;
    std::set<std::string> hyp_words;
    for (int i = 0; i < 8; ++i) {
      if (i && rng() % 5 == 0) hyp += "<sc> ";
      const auto w = oracle::random_word(rng, 1, 6, alpha);
      hyp += w + " ";
      hyp_words.insert(w);
    }
    MockParams p;
    p.d_max = 1 + static_cast<int>(rng() % 3);
    const auto once = correct_mock(hyp, list, CommonWordSet{}, p).corrected_text;
    EXPECT_EQ(correct_mock(once, list, CommonWordSet{}, p).corrected_text, once) << hyp;
    for (const auto& w : flatten_for_scoring(parse_sot(once))) {
      EXPECT_TRUE(hyp_words.count(w) || std::count(list.begin(), list.end(), w)) << w;
    }
  }
}
