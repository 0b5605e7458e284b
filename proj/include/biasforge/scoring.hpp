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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biasforge/bias_catalog.hpp"
#include "biasforge/corpus_io.hpp"
#include "biasforge/sot.hpp"
#include "biasforge/text_norm.hpp"

namespace biasforge {

enum class EditOp : std::uint8_t { kMatch, kSubstitute, kDelete, kInsert };

struct AlignedPair {
  EditOp op;
  std::string ref;  // empty for insertions
  std::string hyp;  // empty for deletions

  bool operator==(const AlignedPair&) const = default;
};

using Alignment = std::vector<AlignedPair>;

struct ErrorCounts {
  std::uint64_t substitutions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t insertions = 0;

  std::uint64_t total() const { return substitutions + deletions + insertions; }
  ErrorCounts& operator+=(const ErrorCounts& o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    return *this;
  }
  bool operator==(const ErrorCounts&) const = default;
};

struct AlignmentReport {
  std::uint64_t n_ref = 0;
  std::uint64_t n_ref_biased = 0;
  ErrorCounts errors_biased;
  ErrorCounts errors_unbiased;
  std::optional<CoverageStat> coverage;

  std::uint64_t n_ref_unbiased() const { return n_ref - n_ref_biased; }
  ErrorCounts errors_total() const {
    ErrorCounts e = errors_biased;
    e += errors_unbiased;
    return e;
  }
  std::optional<double> wer() const;
  std::optional<double> bwer() const;
  std::optional<double> uwer() const;

  AlignmentReport& operator+=(const AlignmentReport& o);
  bool operator==(const AlignmentReport&) const = default;
};

struct UtteranceScore {
  std::string id;
  AlignmentReport report;
  std::optional<Alignment> ops;
  std::optional<std::uint64_t> list_size;

  bool operator==(const UtteranceScore&) const = default;
};

struct CorpusReport {
  AlignmentReport corpus;
  std::vector<UtteranceScore> utterances;
  std::uint64_t skipped = 0;

  // Mean over utterances that have at least one target.
  std::optional<double> mean_coverage() const;
  // Mean over utterances with a recorded list size.
  std::optional<double> mean_list_size() const;

  bool operator==(const CorpusReport&) const = default;
};

// Minimal unit-cost word alignment. Among optimal alignments the traceback
// prefers, from the end backwards: match, substitute, delete, insert.
Alignment align(const std::vector<Token>& ref, const std::vector<Token>& hyp);

// Unit-cost word Levenshtein distance without traceback.
std::uint64_t word_edit_distance(const std::vector<Token>& ref,
                                 const std::vector<Token>& hyp);

// Substitutions and deletions are biased iff the reference word is in the
// set; insertions iff the inserted hypothesis word is.
AlignmentReport score(const Alignment& alignment, const WordList& biasing_set);

struct ScoreOptions {
  MarkerPolicy marker_policy = MarkerPolicy::kDrop;
  bool emit_ops = false;
};

// Pools counts over records. Records without a hypothesis are skipped.
// Utterances missing from `biasing` are scored against an empty set.
CorpusReport score_corpus(const std::vector<UtteranceRecord>& records,
                          const std::map<std::string, WordList>& biasing,
                          const ScoreOptions& options = {});

// Attaches per-utterance coverage and filtered-list size, and pools
// coverage into the corpus aggregate.
void attach_coverage(CorpusReport& report,
                     const std::map<std::string, CoverageStat>& coverage,
                     const std::map<std::string, std::uint64_t>& list_sizes);

std::string to_string(EditOp op);
EditOp edit_op_from_string(const std::string& s);

}  // namespace biasforge
