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
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace biasforge {

// A normalized word: NFC, uppercase, no whitespace, no leading or trailing
// punctuation/symbols.
using Token = std::string;

// Word -> occurrence count. Ordered so serialization is deterministic.
using FrequencyTable = std::map<std::string, std::uint64_t>;

// The literal speaker-change marker. Never produced by normalize_tokenize.
inline constexpr std::string_view kSpeakerChange = "<sc>";

// Normalizes a single word. Returns an empty string when nothing survives.
std::string normalize_word(std::string_view word);

// NFC + uppercase + whitespace split, stripping external punctuation and
// symbols while keeping internal apostrophes and hyphens.
std::vector<Token> normalize_tokenize(std::string_view text);

// Normalizes a list entry that may be a multi-word phrase: tokens are
// joined by single spaces.
std::string normalize_phrase(std::string_view text);

// Decodes UTF-8 into code points. Ill-formed sequences become U+FFFD.
std::u32string to_utf32(std::string_view utf8);

std::string to_utf8(std::u32string_view text);

// The K most frequent words, kept in rank order.
class CommonWordSet {
 public:
  CommonWordSet() = default;

  // Takes the first k distinct normalized words of an already ranked list.
  static CommonWordSet from_ranked(const std::vector<std::string>& ranked,
                                   int k = 5000);

  // Ranks by descending count, ties broken lexicographically.
  static CommonWordSet from_frequencies(const FrequencyTable& freq,
                                        int k = 5000);

  bool contains(std::string_view word) const {
    return members_.count(std::string(word)) != 0;
  }
  const std::vector<std::string>& ranked() const { return ranked_; }
  std::size_t size() const { return ranked_.size(); }
  bool empty() const { return ranked_.empty(); }
  int k() const { return k_; }

 private:
  std::vector<std::string> ranked_;
  std::unordered_set<std::string> members_;
  int k_ = 0;
};

inline bool is_common(std::string_view word, const CommonWordSet& set) {
  return set.contains(word);
}

}  // namespace biasforge
