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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace biasforge {

// Unit-cost Levenshtein distance over code points.
int edit_distance(std::u32string_view a, std::u32string_view b);

// UTF-8 convenience overload; decodes both sides first.
int edit_distance(std::string_view a, std::string_view b);

// Exact distance when it is <= max_distance, otherwise max_distance + 1.
int bounded_edit_distance(std::u32string_view a, std::u32string_view b,
                          int max_distance);

// A query string preprocessed for repeated distance evaluation against many
// texts. Patterns up to 64 code points use Myers' bit-vector recurrence
// (one machine word per text character); longer ones fall back to a banded
// dynamic program.
class PatternDistance {
 public:
  explicit PatternDistance(std::u32string pattern);

  int distance(std::u32string_view text) const;

  // Same contract as bounded_edit_distance. Abandons once the running
  // score can no longer come back under the bound.
  int bounded(std::u32string_view text, int max_distance) const;

  // Full distances to up to kBatch texts of one common length `n`, written
  // to out[0..count). Interleaving independent recurrences keeps the
  // pipeline busy.
  static constexpr std::size_t kBatch = 4;
  void distance_batch(const char32_t* const* texts, std::size_t count, std::size_t n,
                      int* out) const;

  const std::u32string& pattern() const { return pattern_; }

 private:
  std::uint64_t peq(char32_t c) const {
    if (c < 128) return ascii_[c];
    for (const auto& [ch, mask] : other_) {
      if (ch == c) return mask;
    }
    return 0;
  }
  int myers(std::u32string_view text, int max_distance) const;

  std::u32string pattern_;
  std::array<std::uint64_t, 128> ascii_{};
  std::vector<std::pair<char32_t, std::uint64_t>> other_;
};

}  // namespace biasforge
