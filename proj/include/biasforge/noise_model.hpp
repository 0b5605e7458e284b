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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/corpus_io.hpp"
#include "biasforge/text_norm.hpp"

namespace biasforge {

// Relative weights of the character edits applied to a corrupted word.
struct CharOpWeights {
  double substitute = 0.4;
  double remove = 0.2;
  double insert = 0.2;
  double transpose = 0.2;  // costs two units of the edit budget
};

struct NoiseSpec {
  double p_rare_corrupt = 0.6;
  double p_common_corrupt = 0.05;
  CharOpWeights char_ops;
  int max_char_edits = 2;
  double p_word_delete = 0.01;
  double p_word_insert = 0.01;
  bool split_words = true;
  double p_split = 0.5;  // for words corrupted with two or more edits
  std::uint64_t seed = 7;
  // Letters used for substitutions and insertions. Empty means A-Z.
  std::u32string alphabet;

  void validate() const;
};

// What happened to one reference word.
struct WordFate {
  Token original;
  std::vector<Token> emitted;  // one token, two when split, none when deleted
  bool deleted = false;
  bool corrupted = false;
  bool split = false;
  int edits = 0;
};

struct CorruptionResult {
  std::string hypothesis;
  std::vector<WordFate> words;  // reference order, markers excluded
  std::vector<Token> inserted;
};

// Seeded per (utterance id, spec.seed). Speaker-change markers are copied
// through unchanged.
CorruptionResult corrupt_utterance_traced(std::string_view reference_sot,
                                          std::string_view utterance_id,
                                          const CommonWordSet& common,
                                          const NoiseSpec& spec);

inline std::string corrupt_utterance(std::string_view reference_sot,
                                     std::string_view utterance_id,
                                     const CommonWordSet& common,
                                     const NoiseSpec& spec) {
  return corrupt_utterance_traced(reference_sot, utterance_id, common, spec).hypothesis;
}

// Fills every hypothesis. Records that already have one are rejected
// unless `force` is set. An empty spec alphabet is replaced by the
// letters seen in the references.
std::vector<UtteranceRecord> corrupt_corpus(std::vector<UtteranceRecord> records,
                                            const CommonWordSet& common,
                                            NoiseSpec spec, bool force = false);

std::u32string corpus_alphabet(const std::vector<UtteranceRecord>& records);

// First-order estimate of the word error rate the spec induces: deletions,
// insertions, one substitution per corrupted word and one extra insertion
// per split.
double expected_error_rate(std::uint64_t n_rare, std::uint64_t n_common,
                           const NoiseSpec& spec);

}  // namespace biasforge
