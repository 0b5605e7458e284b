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

#include "biasforge/match_index.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "biasforge/edit_distance.hpp"
#include "biasforge/text_norm.hpp"

namespace biasforge {

std::string strip_separators(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != ' ') out += c;
  }
  return out;
}

MatchIndex::MatchIndex(std::vector<std::string> entries)
    : entries_(std::move(entries)) {
  const std::size_t count = entries_.size();
  std::vector<std::u32string> keys;
  keys.reserve(count);
  std::size_t total = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    keys.push_back(to_utf32(strip_separators(entries_[i])));
    const std::size_t len = keys.back().size();
    total += len;
    if (buckets_.size() <= len) buckets_.resize(len + 1);
    buckets_[len].push_back(i);
  }
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [this](std::uint32_t a, std::uint32_t b) { return entries_[a] < entries_[b]; });
  rank_.resize(count);
  for (std::uint32_t r = 0; r < count; ++r) rank_[order[r]] = r;
  flat_.reserve(total);
  offset_.resize(count);
  length_.resize(count);
  for (const auto& bucket : buckets_) {
    for (std::uint32_t i : bucket) {
      offset_[i] = static_cast<std::uint32_t>(flat_.size());
      length_[i] = static_cast<std::uint32_t>(keys[i].size());
      flat_ += keys[i];
    }
  }
}

namespace {

struct Ranked {
  int distance;
  std::uint32_t rank;
  std::uint32_t entry;
};

// Strict weak order on (distance, entry text); the heap top is the worst.
struct Worse {
  bool operator()(const Ranked& a, const Ranked& b) const {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.rank < b.rank;
  }
};

std::vector<Match> drain(std::priority_queue<Ranked, std::vector<Ranked>, Worse>& heap) {
  std::vector<Match> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = {heap.top().entry, heap.top().distance};
    heap.pop();
  }
  return out;
}

}  // namespace

std::vector<Match> MatchIndex::top_n(std::string_view query, std::size_t n) const {
  if (n == 0 || entries_.empty()) return {};
  const PatternDistance pattern(to_utf32(query));
  const long m = static_cast<long>(pattern.pattern().size());
  const long max_len = static_cast<long>(buckets_.size()) - 1;

  std::priority_queue<Ranked, std::vector<Ranked>, Worse> heap;

  constexpr std::size_t kBatch = PatternDistance::kBatch;
  std::uint32_t pending[kBatch];
  const char32_t* texts[kBatch];
  int dist[kBatch];
  std::size_t count = 0;
  const auto offer = [&](std::uint32_t idx, int d) {
    if (heap.size() < n) {
      heap.push({d, rank_[idx], idx});
    } else if (d < heap.top().distance ||
               (d == heap.top().distance && rank_[idx] < heap.top().rank)) {
      heap.pop();
      heap.push({d, rank_[idx], idx});
    }
  };
  const auto flush = [&](std::size_t len) {
    pattern.distance_batch(texts, count, len, dist);
    for (std::size_t k = 0; k < count; ++k) offer(pending[k], dist[k]);
    count = 0;
  };

  const auto visit = [&](long len) {
    for (std::uint32_t idx : buckets_[static_cast<std::size_t>(len)]) {
      pending[count] = idx;
      texts[count] = flat_.data() + offset_[idx];
      if (++count == kBatch) flush(static_cast<std::size_t>(len));
    }
    if (count > 0) flush(static_cast<std::size_t>(len));
  };

  for (long delta = 0;; ++delta) {
    const long lo = m - delta;
    const long hi = m + delta;
    if (lo < 0 && hi > max_len) break;
    if (lo >= 0 && lo <= max_len) visit(lo);
    if (delta > 0 && hi >= 0 && hi <= max_len) visit(hi);
    // Every unvisited entry is at least delta + 1 away.
    if (heap.size() == n && delta >= heap.top().distance) break;
  }
  return drain(heap);
}

std::vector<Match> MatchIndex::top_n_scan(std::string_view query,
                                          std::size_t n) const {
  const PatternDistance pattern(to_utf32(query));
  std::vector<Match> all;
  all.reserve(entries_.size());
  constexpr std::size_t kBatch = PatternDistance::kBatch;
  const char32_t* texts[kBatch];
  int dist[kBatch];
  for (std::size_t len = 0; len < buckets_.size(); ++len) {
    const auto& bucket = buckets_[len];
    for (std::size_t start = 0; start < bucket.size(); start += kBatch) {
      const std::size_t count = std::min(kBatch, bucket.size() - start);
      for (std::size_t k = 0; k < count; ++k) texts[k] = flat_.data() + offset_[bucket[start + k]];
      pattern.distance_batch(texts, count, len, dist);
      for (std::size_t k = 0; k < count; ++k) all.push_back({bucket[start + k], dist[k]});
    }
  }
  const auto less = [this](const Match& a, const Match& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return rank_[a.entry] < rank_[b.entry];
  };
  const std::size_t k = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(k), all.end(), less);
  all.resize(k);
  return all;
}

}  // namespace biasforge
