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
#include <optional>
#include <string>
#include <vector>

#include "biasforge/corpus_io.hpp"
#include "biasforge/text_norm.hpp"

namespace biasforge {

struct BiasingList {
  enum class Origin : std::uint8_t { kTarget, kDistractor };

  std::vector<std::string> entries;
  std::vector<Origin> origin;  // parallel to entries
  std::uint64_t seed = 0;

  std::vector<std::string> targets() const;
  std::vector<std::string> distractors() const;
  WordList as_word_list() const;
};

struct CoverageStat {
  std::uint64_t n_targets = 0;
  std::uint64_t n_targets_present = 0;

  std::optional<double> ratio() const {
    if (n_targets == 0) return std::nullopt;
    return static_cast<double>(n_targets_present) /
           static_cast<double>(n_targets);
  }
  CoverageStat& operator+=(const CoverageStat& o) {
    n_targets += o.n_targets;
    n_targets_present += o.n_targets_present;
    return *this;
  }
  bool operator==(const CoverageStat&) const = default;
};

// Unique reference words found in the full list, in first-occurrence order.
std::vector<std::string> extract_targets(const std::vector<Token>& reference,
                                         const WordList& full_rare_list);

// Draws n words uniformly without replacement from full_rare_list minus
// targets. The draw order is a seeded permutation of the pool that does not
// depend on n, so a smaller sample is always a prefix of a larger one with
// the same seed.
std::vector<std::string> sample_distractors(const WordList& full_rare_list,
                                            const std::vector<std::string>& targets,
                                            std::size_t n, std::uint64_t seed);

// Rare iff in the full list or seen fewer than `threshold` times.
bool classify_rare_ami(const std::string& word, const WordList& full_rare_list,
                       const FrequencyTable& freq, std::uint64_t threshold = 100);

WordList merge_lists(const std::vector<WordList>& lists);

CoverageStat coverage(const std::vector<std::string>& targets,
                      const std::vector<std::string>& candidates);

struct BuildListOptions {
  std::size_t distractors = 0;
  std::uint64_t seed = 0;
  // Total entry cap; distractors are dropped before targets.
  std::optional<std::size_t> cap;
  bool shuffle = false;
};

// Targets (reference order) followed by sampled distractors.
BiasingList build_biasing_list(const std::vector<Token>& reference,
                               const WordList& full_rare_list,
                               const BuildListOptions& options);

}  // namespace biasforge
