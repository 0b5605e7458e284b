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

namespace biasforge {

struct Match {
  std::uint32_t entry;  // position in MatchIndex::entries()
  int distance;

  bool operator==(const Match&) const = default;
};

// Biasing entries bucketed by the code-point length of their
// separator-free form. Immutable once built; safe to share across threads.
//
// Queries return the n entries closest to a query under the total order
// (distance, entry text). Both search paths produce identical results; the
// indexed path visits length buckets outward from the query length and
// stops once the length gap alone exceeds the current n-th best distance.
class MatchIndex {
 public:
  MatchIndex() = default;
  // Entries must be normalized and distinct.
  explicit MatchIndex(std::vector<std::string> entries);

  std::vector<Match> top_n(std::string_view query, std::size_t n) const;
  std::vector<Match> top_n_scan(std::string_view query, std::size_t n) const;

  const std::vector<std::string>& entries() const { return entries_; }
  const std::string& entry(std::uint32_t i) const { return entries_[i]; }
  // Separator-free code points compared against queries.
  std::u32string_view key(std::uint32_t i) const {
    return {flat_.data() + offset_[i], length_[i]};
  }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<std::string> entries_;
  // Keys stored back to back in bucket order so a bucket scan reads memory
  // sequentially.
  std::u32string flat_;
  std::vector<std::uint32_t> offset_;
  std::vector<std::uint32_t> length_;
  // Position of each entry in text order, so ties compare as integers.
  std::vector<std::uint32_t> rank_;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

inline MatchIndex build_index(std::vector<std::string> biasing_list) {
  return MatchIndex(std::move(biasing_list));
}

// Removes spaces so "A B" compares equal to "AB".
std::string strip_separators(std::string_view text);

}  // namespace biasforge
