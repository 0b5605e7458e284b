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

#include <sstream>

#include "biasforge/corpus_io.hpp"
#include "biasforge/error.hpp"
#include "biasforge/report_io.hpp"
#include "biasforge/scoring.hpp"
#include "oracles.hpp"

using namespace biasforge;

TEST(ReadManifest, SingleRecord) {
  std::istringstream in(R"({"id":"u1","reference":"HELLO <sc> WORLD"})" "\n");
  const auto recs = read_manifest(in);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].id, "u1");
  EXPECT_EQ(recs[0].reference, "HELLO <sc> WORLD");
  EXPECT_FALSE(recs[0].hypothesis.has_value());
}

TEST(ReadManifest, EmptyFile) {
  std::istringstream in("");
  EXPECT_TRUE(read_manifest(in).empty());
}

TEST(ReadManifest, DuplicateId) {
  std::istringstream in(R"({"id":"u1","reference":"A"})" "\n" R"({"id":"u1","reference":"B"})");
  EXPECT_THROW(read_manifest(in), ValidationError);
}

TEST(ReadManifest, ParseErrorCarriesLine) {
  std::istringstream in(R"({"id":"u1","reference":"A"})" "\n\n{oops\n");
  try {
    read_manifest(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ReadManifest, RejectsMissingFields) {
  std::istringstream no_ref(R"({"id":"u1"})");
  EXPECT_THROW(read_manifest(no_ref), Error);
  std::istringstream empty_id(R"({"id":"","reference":"A"})");
  EXPECT_THROW(read_manifest(empty_id), Error);
}

TEST(Manifest, RoundTripPreservesUnknownFields) {
  const std::string line =
      R"({"audio":"a.wav","hypothesis":"HI","id":"u1","reference":"HELLO","tags":{"split":"train"}})";
  std::istringstream in(line + "\n");
  const auto recs = read_manifest(in);
  EXPECT_EQ(recs[0].tags.at("split"), "train");
  EXPECT_EQ(recs[0].extra.at("audio"), "a.wav");
  std::ostringstream out;
  write_manifest(recs, out);
  EXPECT_EQ(out.str(), line + "\n");
}

TEST(Manifest, FileIoErrorsCarryPath) {
  try {
    read_manifest_file("/nonexistent/manifest.jsonl");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), "/nonexistent/manifest.jsonl");
  }
}

TEST(ReadWordList, NormalizesAndDedups) {
  std::istringstream in("Stephane\nSTEPHANE\n\n");
  EXPECT_EQ(read_word_list(in, WordListSource::kPerUtterance).entries(),
            (std::vector<std::string>{"STEPHANE"}));
}

TEST(ReadWordList, PhrasesPreserved) {
  std::istringstream in("a b\nab\n");
  EXPECT_EQ(read_word_list(in, WordListSource::kPerUtterance).entries(),
            (std::vector<std::string>{"A B", "AB"}));
}

TEST(ReadWordList, EmptyFullListRejected) {
  std::istringstream in("\n\n");
  EXPECT_THROW(read_word_list(in, WordListSource::kFullRare), ValidationError);
  std::istringstream in2("\n");
  EXPECT_TRUE(read_word_list(in2, WordListSource::kLecture).empty());
}

TEST(ReadWordList, LargeList) {
  std::string text;
  for (int i = 0; i < 209200; ++i) text += "w" + std::to_string(i) + "\n";
  std::istringstream in(text);
  EXPECT_EQ(read_word_list(in, WordListSource::kFullRare).size(), 209200u);
}

TEST(ReadWordList, Idempotent) {
  std::istringstream in("zeta\nAlpha\nalpha\n  new   york \n");
  const auto once = read_word_list(in, WordListSource::kPerUtterance);
  std::ostringstream out;
  write_word_list(once, out);
  std::istringstream again(out.str());
  EXPECT_EQ(read_word_list(again, WordListSource::kPerUtterance).entries(), once.entries());
}

TEST(FrequencyTable, RoundTrip) {
  std::istringstream in("the\t10\nSteve\t3\n");
  const auto t = read_frequency_table(in);
  EXPECT_EQ(t.at("THE"), 10u);
  EXPECT_EQ(t.at("STEVE"), 3u);
  std::ostringstream out;
  write_frequency_table(t, out);
  std::istringstream back(out.str());
  EXPECT_EQ(read_frequency_table(back), t);
}

TEST(FrequencyTable, BadCount) {
  std::istringstream in("the\tmany\n");
  EXPECT_THROW(read_frequency_table(in), ParseError);
}

TEST(CountReferenceWords, IgnoresMarkers) {
  const auto t = count_reference_words({{"a", "X Y <sc> X", {}, {}, {}}});
  EXPECT_EQ(t.at("X"), 2u);
  EXPECT_FALSE(t.count("<SC>"));
  EXPECT_FALSE(t.count("<sc>"));
}

TEST(Report, RoundTrip) {
  std::vector<UtteranceRecord> recs = {{"u1", "A B C D", "A X C D", {}, {}},
                                       {"u2", "E F", "E F G", {}, {}}};
  std::map<std::string, WordList> sets;
  sets["u1"] = WordList::from_raw({"B"}, WordListSource::kPerUtterance);
  ScoreOptions o;
  o.emit_ops = true;
  auto rep = score_corpus(recs, sets, o);
  attach_coverage(rep, {{"u1", {1, 1}}}, {{"u1", 7}});
  EXPECT_DOUBLE_EQ(*rep.corpus.wer(), 2.0 / 6.0);
  std::ostringstream out;
  write_report(rep, out);
  std::istringstream in(out.str());
  EXPECT_EQ(read_report(in), rep);
}

TEST(Report, EmptyCorpus) {
  std::ostringstream out;
  write_report(CorpusReport{}, out);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j.at("corpus").at("n_ref"), 0);
  EXPECT_TRUE(j.at("corpus").at("wer").is_null());
  std::istringstream in(out.str());
  EXPECT_EQ(read_report(in), CorpusReport{});
}

TEST(Report, NullBwerWhenNoBiasedWords) {
  const auto rep = score_corpus({{"u", "A B", "A B", {}, {}}}, {});
  const auto j = report_to_json(rep);
  EXPECT_TRUE(j.at("corpus").at("bwer").is_null());
  EXPECT_EQ(j.at("corpus").at("uwer"), 0.0);
}

TEST(Report, Deterministic) {
  const auto rep = score_corpus({{"u", "A B", "A C", {}, {}}}, {});
  std::ostringstream a, b;
  write_report(rep, a);
  write_report(rep, b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Report, WriteFailureNamesPath) {
  try {
    write_report_file(CorpusReport{}, "/nonexistent/dir/report.json");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), "/nonexistent/dir/report.json");
  }
}
