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
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/match_index.hpp"
#include "biasforge/text_norm.hpp"

namespace biasforge {

// A maximal stretch of consecutive hypothesis tokens that survived
// common-word removal. Runs never cross a speaker change.
struct RareRun {
  std::vector<Token> tokens;
  std::size_t start_index = 0;  // position in the marker-free token stream

  bool operator==(const RareRun&) const = default;
};

// A contiguous sub-span of a run, compared against the list as one string.
struct SegmentCandidate {
  std::size_t run = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string joined;  // span tokens concatenated without separators

  bool operator==(const SegmentCandidate&) const = default;
};

inline constexpr std::size_t kUnboundedSpan = std::numeric_limits<std::size_t>::max();

struct FilterParams {
  std::size_t top_n = 10;
  std::size_t max_span = 3;
  int common_k = 5000;
  std::optional<int> distance_cap;
  std::optional<std::size_t> output_cap;

  // Throws ValidationError when top_n or max_span is zero.
  void validate() const;
};

struct FilteredEntry {
  std::string word;
  int distance = 0;
  std::string segment;  // joined form of the closest segment
  std::size_t run = 0;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const FilteredEntry&) const = default;
};

// Sorted by (distance, word); words are unique.
struct FilterOutput {
  std::vector<FilteredEntry> entries;

  std::vector<std::string> words() const;
};

enum class SearchPath { kIndexed, kLinearScan };

std::vector<RareRun> remove_common(const std::vector<Token>& tokens,
                                   const CommonWordSet& common,
                                   std::size_t base_index = 0);

// All spans of length 1..min(|run|, max_span), by length then offset.
std::vector<SegmentCandidate> enumerate_segments(const RareRun& run,
                                                 std::size_t max_span,
                                                 std::size_t run_index = 0);

// Runs of an SOT hypothesis, split at speaker changes.
std::vector<RareRun> hypothesis_runs(std::string_view hypothesis,
                                     const CommonWordSet& common);

std::vector<Match> top_n_matches(const SegmentCandidate& segment,
                                 const MatchIndex& index, std::size_t n,
                                 SearchPath path = SearchPath::kIndexed);

// Union of every segment's top-N matches. An entry matched by several
// segments keeps its smallest distance (first segment wins ties).
FilterOutput filter(std::string_view hypothesis, const MatchIndex& index,
                    const CommonWordSet& common, const FilterParams& params,
                    SearchPath path = SearchPath::kIndexed);

inline FilterOutput filter(std::string_view hypothesis,
                           const std::vector<std::string>& biasing_list,
                           const CommonWordSet& common,
                           const FilterParams& params) {
  return filter(hypothesis, MatchIndex(biasing_list), common, params);
}

}  // namespace biasforge
