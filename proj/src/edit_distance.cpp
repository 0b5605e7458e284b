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

#include "biasforge/edit_distance.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>

#include "biasforge/text_norm.hpp"

namespace biasforge {
namespace {

constexpr int kUnbounded = INT_MAX - 1;

// Two-row DP restricted to the diagonal band |i - j| <= max_distance.
int banded_dp(std::u32string_view a, std::u32string_view b, int max_distance) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (std::abs(n - m) > max_distance) return max_distance + 1;
  const int inf = max_distance + 1;
  std::vector<int> prev(m + 1, inf);
  std::vector<int> cur(m + 1, inf);
  for (int j = 0; j <= std::min(m, max_distance); ++j) prev[j] = j;
  for (int i = 1; i <= n; ++i) {
    const int lo = std::max(1, i - max_distance);
    const int hi = std::min(m, i + max_distance);
    std::fill(cur.begin(), cur.end(), inf);
    if (i <= max_distance) cur[0] = i;
    int row_min = cur[0];
    for (int j = lo; j <= hi; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      const int del = prev[j] + 1;
      const int ins = cur[j - 1] + 1;
      cur[j] = std::min({sub, del, ins, inf});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > max_distance) return inf;
    std::swap(prev, cur);
  }
  return std::min(prev[m], inf);
}

}  // namespace

PatternDistance::PatternDistance(std::u32string pattern)
    : pattern_(std::move(pattern)) {
  if (pattern_.size() > 64) return;
  for (std::size_t i = 0; i < pattern_.size(); ++i) {
    const char32_t c = pattern_[i];
    const std::uint64_t bit = std::uint64_t{1} << i;
    if (c < 128) {
      ascii_[c] |= bit;
      continue;
    }
    auto it = std::find_if(other_.begin(), other_.end(),
                           [c](const auto& p) { return p.first == c; });
    if (it == other_.end()) {
      other_.emplace_back(c, bit);
    } else {
      it->second |= bit;
    }
  }
}

int PatternDistance::myers(std::u32string_view text, int max_distance) const {
  const int m = static_cast<int>(pattern_.size());
  const int n = static_cast<int>(text.size());
  const std::uint64_t last = std::uint64_t{1} << (m - 1);
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
  int score = m;
  for (int j = 0; j < n; ++j) {
    const std::uint64_t eq = peq(text[j]);
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    score += static_cast<int>((ph & last) != 0) - static_cast<int>((mh & last) != 0);
    // The bottom row can drop by at most one per remaining text character.
    if (score - (n - j - 1) > max_distance) return max_distance + 1;
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

int PatternDistance::distance(std::u32string_view text) const {
  return bounded(text, kUnbounded);
}

int PatternDistance::bounded(std::u32string_view text, int max_distance) const {
  if (max_distance < 0) return max_distance + 1;
  const int m = static_cast<int>(pattern_.size());
  const int n = static_cast<int>(text.size());
  if (std::abs(m - n) > max_distance) return max_distance + 1;
  if (m == 0) return n;
  if (n == 0) return m;
  if (m <= 64) return myers(text, max_distance);
  return banded_dp(pattern_, text, std::min(max_distance, std::max(m, n)));
}

void PatternDistance::distance_batch(const char32_t* const* texts, std::size_t count,
                                     std::size_t n, int* out) const {
  const int m = static_cast<int>(pattern_.size());
  if (m == 0 || m > 64 || n == 0 || count != kBatch) {
    for (std::size_t k = 0; k < count; ++k) out[k] = distance({texts[k], n});
    return;
  }
  const std::uint64_t last = std::uint64_t{1} << (m - 1);
  std::uint64_t pv[kBatch];
  std::uint64_t mv[kBatch];
  int score[kBatch];
  for (std::size_t k = 0; k < kBatch; ++k) {
    pv[k] = ~std::uint64_t{0};
    mv[k] = 0;
    score[k] = m;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < kBatch; ++k) {
      const std::uint64_t eq = peq(texts[k][j]);
      const std::uint64_t xv = eq | mv[k];
      const std::uint64_t xh = (((eq & pv[k]) + pv[k]) ^ pv[k]) | eq;
      std::uint64_t ph = mv[k] | ~(xh | pv[k]);
      std::uint64_t mh = pv[k] & xh;
      score[k] += static_cast<int>((ph & last) != 0) - static_cast<int>((mh & last) != 0);
      ph = (ph << 1) | 1;
      mh <<= 1;
      pv[k] = mh | ~(xv | ph);
      mv[k] = ph & xv;
    }
  }
  for (std::size_t k = 0; k < kBatch; ++k) out[k] = score[k];
}

int bounded_edit_distance(std::u32string_view a, std::u32string_view b,
                          int max_distance) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.size() <= 64) {
    return PatternDistance(std::u32string(a)).bounded(b, max_distance);
  }
  if (max_distance < 0) return max_distance + 1;
  const int cap = std::min(max_distance, static_cast<int>(b.size()));
  return banded_dp(a, b, cap);
}

int edit_distance(std::u32string_view a, std::u32string_view b) {
  return bounded_edit_distance(a, b, kUnbounded);
}

int edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(to_utf32(a), to_utf32(b));
}

}  // namespace biasforge
