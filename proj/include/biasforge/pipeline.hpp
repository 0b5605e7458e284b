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

// Corpus-level stage drivers behind the command-line tool. Every stage is a
// pure function of its inputs and the top-level seed; per-utterance work is
// spread over `threads` workers without affecting results.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "biasforge/bias_catalog.hpp"
#include "biasforge/corpus_io.hpp"
#include "biasforge/corrector_gateway.hpp"
#include "biasforge/filter_engine.hpp"
#include "biasforge/noise_model.hpp"
#include "biasforge/prompt_builder.hpp"
#include "biasforge/scoring.hpp"

namespace biasforge {

// A failure tagged with the pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct UtteranceList {
  std::string id;
  BiasingList list;
};

struct UtteranceFilter {
  std::string id;
  FilterOutput output;
};

struct UtterancePrompt {
  std::string id;
  PromptText prompt;
};

struct UtteranceCorrection {
  std::string id;
  std::string hypothesis;
  std::string corrected;
  bool ok = true;
  std::string error;
};

// ---- stages ----

std::vector<UtteranceRecord> simulate_stage(std::vector<UtteranceRecord> records,
                                            const CommonWordSet& common,
                                            NoiseSpec spec, std::uint64_t seed,
                                            bool force);

std::vector<UtteranceList> build_lists_stage(const std::vector<UtteranceRecord>& records,
                                             const WordList& full_rare_list,
                                             BuildListOptions options,
                                             std::uint64_t seed, std::size_t threads);

// Filters against each utterance's own list, or against `shared` for every
// utterance when given.
std::vector<UtteranceFilter> filter_stage(const std::vector<UtteranceRecord>& records,
                                          const std::map<std::string, WordList>& lists,
                                          const MatchIndex* shared,
                                          const CommonWordSet& common,
                                          const FilterParams& params, std::size_t threads,
                                          SearchPath path = SearchPath::kIndexed);

std::vector<UtterancePrompt> prompt_stage(
    const std::vector<UtteranceFilter>& filtered, PromptCondition condition,
    std::size_t cap, const std::map<std::string, std::vector<std::string>>& targets,
    const WordList* distractor_pool, std::uint64_t seed);

enum class CorrectorKind { kMock, kRemote };

struct CorrectOptions {
  CorrectorKind kind = CorrectorKind::kMock;
  MockParams mock;
  EndpointConfig endpoint;
  std::size_t threads = 1;
};

std::vector<UtteranceCorrection> correct_stage(const std::vector<UtteranceRecord>& records,
                                               const std::vector<UtterancePrompt>& prompts,
                                               const CommonWordSet& common,
                                               const CorrectOptions& options);

// Records with hypotheses replaced by corrections; the first-pass text is
// kept under the extra field "first_pass_hypothesis".
std::vector<UtteranceRecord> apply_corrections(std::vector<UtteranceRecord> records,
                                               const std::vector<UtteranceCorrection>& corrections);

CorpusReport score_stage(const std::vector<UtteranceRecord>& records,
                         const std::vector<UtteranceList>& lists,
                         const std::vector<UtteranceFilter>* filtered,
                         const ScoreOptions& options);

// ---- artifact files ----

std::string lists_to_jsonl(const std::vector<UtteranceList>& lists);
std::vector<UtteranceList> lists_from_jsonl(std::istream& in);
std::string filters_to_jsonl(const std::vector<UtteranceFilter>& filtered);
std::vector<UtteranceFilter> filters_from_jsonl(std::istream& in);
std::string prompts_to_jsonl(const std::vector<UtterancePrompt>& prompts);
std::vector<UtterancePrompt> prompts_from_jsonl(std::istream& in);
std::string corrections_to_jsonl(const std::vector<UtteranceCorrection>& corrections);

std::map<std::string, WordList> lists_by_id(const std::vector<UtteranceList>& lists);

// Ranked common-word file, else frequency table, else frequencies of the
// manifest's training split (records tagged split=train, or all records).
CommonWordSet load_common_set(const std::string& ranked_path, const std::string& freq_path,
                              int k, const std::vector<UtteranceRecord>& records);

// ---- end-to-end ----

struct RunConfig {
  std::string manifest;
  std::string full_list;
  std::string common_list;
  std::string freq_table;
  std::string out_dir;

  std::uint64_t seed = 1;
  std::size_t threads = 1;

  std::optional<NoiseSpec> noise;  // simulate hypotheses first when set
  bool force_simulate = false;

  BuildListOptions lists;  // seed field ignored; derived from `seed`
  FilterParams filter;
  std::vector<std::size_t> top_n_sweep;  // empty: filter.top_n only
  PromptCondition condition = PromptCondition::kBiasing;
  std::size_t prompt_cap = kDefaultPromptCap;
  CorrectOptions correct;
  ScoreOptions score;

  static RunConfig from_json(const nlohmann::json& j);
};

struct RunResult {
  CorpusReport uncorrected;
  std::vector<std::pair<std::size_t, CorpusReport>> by_top_n;  // empty for baseline
  CorpusReport baseline;  // set for the baseline condition
  std::vector<std::string> report_paths;
  std::size_t correction_failures = 0;
};

// simulate? -> build-lists -> filter -> prompt -> correct -> score, writing
// every intermediate artifact under config.out_dir.
RunResult run_pipeline(const RunConfig& config);

struct BenchResult {
  nlohmann::json report;
  bool identical = true;
};

// Filter latency on the indexed and linear-scan paths over the same inputs.
BenchResult run_bench(const std::vector<UtteranceRecord>& records, const WordList& list,
                      const CommonWordSet& common, const FilterParams& params,
                      std::size_t threads);

}  // namespace biasforge
