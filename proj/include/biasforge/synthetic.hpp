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
#include <vector>

#include "biasforge/corpus_io.hpp"

namespace biasforge {

// Shape of a generated desk-scale corpus. Words are pronounceable
// syllable strings; the common vocabulary is short and Zipf-distributed,
// the rare lexicon longer and uniformly drawn.
struct SynthSpec {
  std::size_t utterances = 500;
  std::size_t lexicon_size = 209200;
  std::size_t common_size = 5000;
  double p_rare_word = 0.12;
  std::size_t min_words = 6;  // per speaker
  std::size_t max_words = 14;
  std::size_t max_speakers = 3;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<std::string> common_ranked;  // most frequent first
  WordList full_rare_list{WordListSource::kFullRare};
  std::vector<UtteranceRecord> records;  // references only
};

SyntheticCorpus make_synthetic_corpus(const SynthSpec& spec);

// Just the rare lexicon, for callers that need a large list only.
std::vector<std::string> make_synthetic_lexicon(std::size_t size, std::uint64_t seed);

}  // namespace biasforge
