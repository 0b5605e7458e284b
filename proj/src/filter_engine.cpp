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

#include "biasforge/filter_engine.hpp"

#include <algorithm>
#include <unordered_map>

#include "biasforge/error.hpp"
#include "biasforge/sot.hpp"

namespace biasforge {

void FilterParams::validate() const {
  if (top_n < 1) throw ValidationError("top_n must be at least 1");
  if (max_span < 1) throw ValidationError("max_span must be at least 1");
  if (common_k < 1) throw ValidationError("common_k must be at least 1");
  if (distance_cap && *distance_cap < 0) {
    throw ValidationError("distance_cap must be non-negative");
  }
}

std::vector<std::string> FilterOutput::words() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.word);
  return out;
}

std::vector<RareRun> remove_common(const std::vector<Token>& tokens,
                                   const CommonWordSet& common,
                                   std::size_t base_index) {
  std::vector<RareRun> runs;
  RareRun current;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (common.contains(tokens[i])) {
      if (!current.tokens.empty()) runs.push_back(std::move(current));
      current = {};
      continue;
    }
    if (current.tokens.empty()) current.start_index = base_index + i;
    current.tokens.push_back(tokens[i]);
  }
  if (!current.tokens.empty()) runs.push_back(std::move(current));
  return runs;
}

std::vector<SegmentCandidate> enumerate_segments(const RareRun& run,
                                                 std::size_t max_span,
                                                 std::size_t run_index) {
  std::vector<SegmentCandidate> out;
  const std::size_t size = run.tokens.size();
  const std::size_t longest = std::min(size, max_span);
  for (std::size_t len = 1; len <= longest; ++len) {
    for (std::size_t off = 0; off + len <= size; ++off) {
      std::string joined;
      for (std::size_t k = off; k < off + len; ++k) joined += run.tokens[k];
      out.push_back({run_index, off, len, std::move(joined)});
    }
  }
  return out;
}

std::vector<RareRun> hypothesis_runs(std::string_view hypothesis,
                                     const CommonWordSet& common) {
  std::vector<RareRun> runs;
  std::size_t base = 0;
  for (const auto& seg : parse_sot(hypothesis).segments) {
    auto part = remove_common(seg.tokens, common, base);
    std::move(part.begin(), part.end(), std::back_inserter(runs));
    base += seg.tokens.size();
  }
  return runs;
}

std::vector<Match> top_n_matches(const SegmentCandidate& segment,
                                 const MatchIndex& index, std::size_t n,
                                 SearchPath path) {
  return path == SearchPath::kIndexed ? index.top_n(segment.joined, n)
                                      : index.top_n_scan(segment.joined, n);
}

FilterOutput filter(std::string_view hypothesis, const MatchIndex& index,
                    const CommonWordSet& common, const FilterParams& params,
                    SearchPath path) {
  params.validate();
  FilterOutput out;
  if (index.empty()) return out;

  const auto runs = hypothesis_runs(hypothesis, common);
  std::unordered_map<std::uint32_t, std::size_t> slot;  // entry -> position in out
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& seg : enumerate_segments(runs[r], params.max_span, r)) {
      for (const auto& m : top_n_matches(seg, index, params.top_n, path)) {
        if (params.distance_cap && m.distance > *params.distance_cap) continue;
        auto [it, inserted] = slot.try_emplace(m.entry, out.entries.size());
        if (inserted) {
          out.entries.push_back({index.entry(m.entry), m.distance, seg.joined,
                                 seg.run, seg.offset, seg.length});
        } else if (m.distance < out.entries[it->second].distance) {
          out.entries[it->second] = {index.entry(m.entry), m.distance, seg.joined,
                                     seg.run, seg.offset, seg.length};
        }
      }
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const FilteredEntry& a, const FilteredEntry& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.word < b.word;
            });
  if (params.output_cap && out.entries.size() > *params.output_cap) {
    out.entries.resize(*params.output_cap);
  }
  return out;
}

}  // namespace biasforge
