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
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "biasforge/bias_catalog.hpp"
#include "biasforge/corrector_gateway.hpp"
#include "biasforge/edit_distance.hpp"
#include "biasforge/filter_engine.hpp"
#include "biasforge/noise_model.hpp"
#include "biasforge/pipeline.hpp"
#include "biasforge/prompt_builder.hpp"
#include "biasforge/rng.hpp"
#include "biasforge/scoring.hpp"
#include "biasforge/sot.hpp"
#include "biasforge/synthetic.hpp"
#include "oracles.hpp"

using namespace biasforge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

void criterion(int n, const std::string& name, double limit_s, const std::function<Outcome()>& fn) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += " (over time limit)";
  }
  failures += !o.pass;
  const std::string limit = limit_s > 0 ? fmt("limit %.0fs", limit_s) : "no time limit";
  std::printf("%s criterion %d: %s | %s | %.2fs (%s)\n", o.pass ? "PASS" : "FAIL", n,
              name.c_str(), o.detail.c_str(), secs, limit.c_str());
  std::fflush(stdout);
}


// The synthetic corpus shared by the corpus-level checks.
struct Corpus {
  SyntheticCorpus synth;
  CommonWordSet common;
  std::vector<UtteranceRecord> noisy;
  std::vector<CorruptionResult> traces;
  NoiseSpec noise;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus x;
    SynthSpec s;
    s.utterances = 500;
    s.seed = 2024;
    x.synth = make_synthetic_corpus(s);
    x.common = CommonWordSet::from_ranked(x.synth.common_ranked);
    x.noise.max_char_edits = 2;
    x.noise.split_words = true;
    x.noise.seed = 7;
    x.noise.alphabet = corpus_alphabet(x.synth.records);
    for (const auto& r : x.synth.records) {
      x.traces.push_back(corrupt_utterance_traced(r.reference, r.id, x.common, x.noise));
      UtteranceRecord n = r;
      n.hypothesis = x.traces.back().hypothesis;
      x.noisy.push_back(std::move(n));
    }
    return x;
  }();
  return c;
}

std::vector<UtteranceList> lists_with(std::size_t distractors) {
  BuildListOptions o;
  o.distractors = distractors;
  return build_lists_stage(corpus().noisy, corpus().synth.full_rare_list, o, 11, 1);
}

std::vector<UtteranceFilter> filter_all(const std::vector<UtteranceList>& lists,
                                        std::size_t top_n) {
  FilterParams p;
  p.top_n = top_n;
  return filter_stage(corpus().noisy, lists_by_id(lists), nullptr, corpus().common, p, 1);
}

// Full-scale lexicon for the worked example, built before its timer starts.
const WordList& worked_example_lexicon() {
  static const auto lexicon =
      WordList::from_raw(make_synthetic_lexicon(209200, 3), WordListSource::kFullRare);
  return lexicon;
}

Outcome worked_example() {
  const auto common = CommonWordSet::from_ranked(
      {"WE", "SAW", "THE", "OF", "AND", "A", "TO", "IN", "IS", "IT", "THAT", "AS", "MORE", "THAN", "SPEAKER",
       "WAS", "HE", "FOR", "ON", "ARE", "WITH", "THEY", "BE", "AT", "ONE", "HAVE", "THIS"});
  const auto& lexicon = worked_example_lexicon();
  std::vector<std::string> list = {"CHARACTERISATION", "STEVE"};
  for (auto& d : sample_distractors(lexicon, list, 1000, 17)) list.push_back(d);

  const std::string hyp = "WE SAW MORE THAN THE SPEAKER CHARACE THSATION AS STEE IN IT";
  FilterParams p;
  p.top_n = 10;
  const auto out = filter(hyp, list, common, p);
  const auto words = out.words();
  const bool both = std::count(words.begin(), words.end(), "CHARACTERISATION") &&
                    std::count(words.begin(), words.end(), "STEVE");
  MockParams m;
  m.d_max = 3;
  const std::string fixed = correct_mock(hyp, words, common, m).corrected_text;
  const bool span = fixed.find("SPEAKER CHARACTERISATION AS STEVE IN") != std::string::npos;
  return {both && span, "filtered " + std::to_string(words.size()) + " entries, corrected: \"" +
                            fixed + "\""};
}

Outcome distance_oracle() {
  std::mt19937_64 rng(20240601);
  const std::vector<std::u32string> alphabets = {U"AB", U"ACGT", U"ABCDEFGHIJKLMNOPQRSTUVWXYZ",
                                                 U"AÉÖ中Ω"};
  std::size_t mismatches = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto& alpha = alphabets[i % alphabets.size()];
    std::u32string a, b;
    for (std::size_t k = rng() % 25; k > 0; --k) a += alpha[rng() % alpha.size()];
    for (std::size_t k = rng() % 25; k > 0; --k) b += alpha[rng() % alpha.size()];
    const int expect = oracle::naive_distance(a, b);
    const int bound = static_cast<int>(rng() % 10);
    mismatches += edit_distance(a, b) != expect;
    mismatches += bounded_edit_distance(a, b, bound) != (expect <= bound ? expect : bound + 1);
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 100000 pairs"};
}

Outcome index_equivalence() {
  const auto lexicon = make_synthetic_lexicon(209200, 5);
  const MatchIndex index(lexicon);
  std::mt19937_64 rng(99);
  const std::string letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::size_t mismatches = 0;
  for (int q = 0; q < 10000; ++q) {
    std::string query;
    if (q % 4 == 3) {
      query = oracle::random_word(rng, 1, 24, letters);
    } else {
      // Near misses of real entries, sometimes two joined.
      query = lexicon[rng() % lexicon.size()];
      if (q % 4 == 2) query += lexicon[rng() % lexicon.size()];
      for (std::size_t e = rng() % 4; e > 0 && !query.empty(); --e) {
        query[rng() % query.size()] = letters[rng() % letters.size()];
      }
    }
    const std::size_t n = q % 10 == 0 ? 1 + rng() % 100 : 10;
    mismatches += index.top_n(query, n) != index.top_n_scan(query, n);
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatching queries of 10000 against " +
                               std::to_string(index.size()) + " entries"};
}

Outcome filter_recall() {
  const auto& c = corpus();
  const auto lists = lists_with(1000);
  const auto filtered = filter_all(lists, 10);
  std::size_t targets = 0, found = 0, near_miss = 0, near_miss_missed = 0;
  for (std::size_t u = 0; u < c.noisy.size(); ++u) {
    const auto& entries = lists[u].list.entries;
    const auto words = filtered[u].output.words();
    const std::set<std::string> got(words.begin(), words.end());
    const auto list_targets = lists[u].list.targets();
    const std::set<std::string> is_target(list_targets.begin(), list_targets.end());
    for (const auto& t : list_targets) {
      ++targets;
      found += got.count(t);
    }
    for (const auto& fate : c.traces[u].words) {
      if (!is_target.count(fate.original) || fate.emitted.empty()) continue;
      bool common_piece = false;
      std::string joined;
      for (const auto& piece : fate.emitted) {
        common_piece |= c.common.contains(piece);
        joined += piece;
      }
      if (common_piece) continue;
      const int d = oracle::naive_distance(joined, fate.original);
      if (d > 2) continue;
      int closer = 0;
      for (const auto& e : entries) closer += oracle::naive_distance(joined, e) < d;
      if (closer > 9) continue;
      ++near_miss;
      near_miss_missed += !got.count(fate.original);
    }
  }
  const double recall = static_cast<double>(found) / static_cast<double>(targets);
  return {near_miss_missed == 0 && recall >= 0.95 && c.noisy.size() >= 500,
          fmt("recall %.4f over %.0f targets; near-miss %.0f checked, %.0f missed", recall,
              static_cast<double>(targets), static_cast<double>(near_miss),
              static_cast<double>(near_miss_missed))};
}

Outcome coverage_sweep() {
  std::vector<double> cover, size;
  for (std::size_t d : {1000, 2000, 5000}) {
    const auto lists = lists_with(d);
    const auto filtered = filter_all(lists, 10);
    double sum_cover = 0, sum_size = 0;
    std::size_t with_targets = 0;
    for (std::size_t u = 0; u < lists.size(); ++u) {
      const auto targets = lists[u].list.targets();
      const auto words = filtered[u].output.words();
      sum_size += static_cast<double>(words.size());
      if (targets.empty()) continue;
      std::size_t hit = 0;
      for (const auto& t : targets) hit += std::count(words.begin(), words.end(), t);
      sum_cover += static_cast<double>(hit) / static_cast<double>(targets.size());
      ++with_targets;
    }
    cover.push_back(sum_cover / static_cast<double>(with_targets));
    size.push_back(sum_size / static_cast<double>(lists.size()));
  }
  const bool monotone = cover[0] >= cover[1] && cover[1] >= cover[2];
  const bool small = *std::max_element(size.begin(), size.end()) < 200;
  return {monotone && small,
          fmt("coverage %.4f / %.4f / %.4f", cover[0], cover[1], cover[2]) +
              fmt(", mean size %.1f / %.1f / %.1f", size[0], size[1], size[2])};
}

Outcome bwer_oracle() {
  std::mt19937_64 rng(8);
  const std::vector<std::string> vocab = {"A", "B", "C", "D"};
  std::size_t wer_bad = 0, bwer_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::string> ref, hyp, biasing;
    for (std::size_t k = rng() % 9; k > 0; --k) ref.push_back(vocab[rng() % vocab.size()]);
    for (std::size_t k = rng() % 9; k > 0; --k) hyp.push_back(vocab[rng() % vocab.size()]);
    for (const auto& w : vocab) {
      if (rng() % 2) biasing.push_back(w);
    }
    oracle::AlignmentSearch search(ref, hyp);
    const auto best = search.best();
    const auto expect = oracle::recount(best, ref, biasing);
    const auto got = score(align(ref, hyp), WordList::from_raw(biasing, WordListSource::kPerUtterance));
    wer_bad += got.errors_total().total() != static_cast<std::uint64_t>(search.cost()) ||
               got.n_ref != expect.n_ref;
    bwer_bad += got.errors_biased.total() != expect.errors_biased ||
                got.n_ref_biased != expect.n_biased;
  }
  return {wer_bad == 0 && bwer_bad == 0,
          std::to_string(wer_bad) + " WER and " + std::to_string(bwer_bad) +
              " B-WER mismatches over 1000 instances"};
}

fs::path write_inputs(const fs::path& dir) {
  const auto& c = corpus();
  fs::create_directories(dir);
  write_manifest_file(c.synth.records, (dir / "manifest.jsonl").string());
  std::ostringstream full, common;
  write_word_list(c.synth.full_rare_list, full);
  for (const auto& w : c.synth.common_ranked) common << w << '\n';
  write_text_file((dir / "full_list.txt").string(), full.str());
  write_text_file((dir / "common.txt").string(), common.str());
  return dir;
}

Outcome end_to_end() {
  const fs::path in = write_inputs(oracle::scratch_dir("acceptance-e2e"));
  RunConfig cfg;
  cfg.manifest = (in / "manifest.jsonl").string();
  cfg.full_list = (in / "full_list.txt").string();
  cfg.common_list = (in / "common.txt").string();
  cfg.seed = 3;
  cfg.noise = NoiseSpec{};
  cfg.lists.distractors = 1000;

  cfg.out_dir = (in / "biasing").string();
  const auto biasing = run_pipeline(cfg);
  cfg.out_dir = (in / "anti").string();
  cfg.condition = PromptCondition::kAntiContext;
  const auto anti = run_pipeline(cfg);
  cfg.out_dir = (in / "baseline").string();
  cfg.condition = PromptCondition::kBaseline;
  const auto base = run_pipeline(cfg);

  const double b0 = *base.baseline.corpus.bwer();
  const double b1 = *biasing.by_top_n.at(0).second.corpus.bwer();
  const double b2 = *anti.by_top_n.at(0).second.corpus.bwer();
  const bool improves = b1 < b0;
  const bool anti_flat = b2 >= b0 - 0.005;
  return {improves && anti_flat,
          fmt("B-WER baseline %.4f, biasing %.4f, anti-context %.4f (anti - baseline %+.4f)", b0,
              b1, b2, b2 - b0)};
}

Outcome determinism() {
  const fs::path in = write_inputs(oracle::scratch_dir("acceptance-det"));
  const std::string common = " --manifest " + (in / "manifest.jsonl").string() + " --full-list " +
                             (in / "full_list.txt").string() + " --common " +
                             (in / "common.txt").string() +
                             " --distractors 1000 --seed 42 --simulate --top-n 10 --top-n 20";
  std::vector<std::string> dirs;
  for (const char* tag : {"t1a", "t1b", "t8a", "t8b"}) {
    const std::string out = (in / tag).string();
    const std::string threads = tag[1] == '1' ? "1" : "8";
    const std::string cmd = std::string(BIASFORGE_CLI) + " run" + common + " --threads " +
                            threads + " --out-dir " + out + " >/dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "run failed: " + cmd};
    dirs.push_back(out);
  }
  std::size_t compared = 0, differing = 0;
  for (const char* rel : {"report_uncorrected.json", "topn-10/report.json", "topn-20/report.json"}) {
    const auto first = read_text_file((fs::path(dirs[0]) / rel).string());
    for (std::size_t i = 1; i < dirs.size(); ++i) {
      ++compared;
      differing += read_text_file((fs::path(dirs[i]) / rel).string()) != first;
    }
  }
  return {differing == 0, std::to_string(differing) + " of " + std::to_string(compared) +
                              " report comparisons differ (threads 1 and 8, two runs each)"};
}

Outcome prompt_literals() {
  const std::string base = "Transcribe speech to text.";
  const std::string head =
      "Use the rare words provided to improve the accuracy of ASR if they are relevant. The rare "
      "words are ";
  const auto p = biasing_prompt({"CHARACTERISATION", "STEVE"});
  const std::string& t = p.text;
  const bool ok = baseline_prompt().text == base && t.rfind(head, 0) == 0 && t.back() == '.' &&
                  t.substr(head.size(), t.size() - head.size() - 1) == "CHARACTERISATION, STEVE";
  return {ok, "baseline \"" + baseline_prompt().text + "\"; biasing \"" + t + "\""};
}

}  // namespace

int main() {
  worked_example_lexicon();
  criterion(1, "worked example: filter keeps both targets, mock correction repairs the span", 1,
            worked_example);
  criterion(2, "edit distance equals full-table DP on 1e5 random pairs", 30, distance_oracle);
  criterion(3, "indexed top-N equals linear scan, 1e4 queries on 209.2K entries", 300,
            index_equivalence);
  criterion(4, "filter recall on 500 noisy utterances, top_n 10, 1000 distractors", 120,
            filter_recall);
  criterion(5, "coverage non-increasing over 1000/2000/5000 distractors, mean size < 200", 300,
            coverage_sweep);
  criterion(6, "WER and B-WER equal exhaustive alignment recount on 1000 instances", 60,
            bwer_oracle);
  criterion(7, "mock correction lowers B-WER; anti-context does not", 180, end_to_end);
  criterion(8, "run reports byte-identical across repeats and thread counts", 0, determinism);
  criterion(9, "prompt literals", 0, prompt_literals);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
