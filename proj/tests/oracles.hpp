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

// Slow, obviously-correct reference implementations used only by tests.
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "biasforge/bias_catalog.hpp"
#include "biasforge/scoring.hpp"
#include "biasforge/sot.hpp"
#include "biasforge/text_norm.hpp"

namespace oracle {

// Full (|a|+1) x (|b|+1) table.
inline int naive_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

inline int naive_distance(const std::string& a, const std::string& b) {
  return naive_distance(biasforge::to_utf32(a), biasforge::to_utf32(b));
}

// Every alignment of ref against hyp, walked exhaustively. Keeps the
// cheapest one whose op sequence read from the end is smallest under the
// rank match < substitute < delete < insert.
class AlignmentSearch {
 public:
  AlignmentSearch(const std::vector<std::string>& ref, const std::vector<std::string>& hyp)
      : ref_(ref), hyp_(hyp) {}

  biasforge::Alignment best() {
    best_cost_ = static_cast<int>(ref_.size() + hyp_.size()) + 1;
    walk(0, 0, 0);
    return best_;
  }
  int cost() const { return best_cost_; }
  std::uint64_t paths() const { return paths_; }

 private:
  using Op = biasforge::EditOp;

  void walk(std::size_t i, std::size_t j, int cost) {
    if (cost > best_cost_) return;
    if (i == ref_.size() && j == hyp_.size()) {
      ++paths_;
      if (cost < best_cost_ || better(path_, best_)) {
        best_cost_ = cost;
        best_ = path_;
      }
      return;
    }
    if (i < ref_.size() && j < hyp_.size()) {
      const bool same = ref_[i] == hyp_[j];
      path_.push_back({same ? Op::kMatch : Op::kSubstitute, ref_[i], hyp_[j]});
      walk(i + 1, j + 1, cost + (same ? 0 : 1));
      path_.pop_back();
    }
    if (i < ref_.size()) {
      path_.push_back({Op::kDelete, ref_[i], ""});
      walk(i + 1, j, cost + 1);
      path_.pop_back();
    }
    if (j < hyp_.size()) {
      path_.push_back({Op::kInsert, "", hyp_[j]});
      walk(i, j + 1, cost + 1);
      path_.pop_back();
    }
  }

  static int rank(Op op) { return static_cast<int>(op); }

  static bool better(const biasforge::Alignment& a, const biasforge::Alignment& b) {
    auto ia = a.rbegin();
    auto ib = b.rbegin();
    for (; ia != a.rend() && ib != b.rend(); ++ia, ++ib) {
      if (rank(ia->op) != rank(ib->op)) return rank(ia->op) < rank(ib->op);
    }
    return ia == a.rend() && ib != b.rend();
  }

  const std::vector<std::string>& ref_;
  const std::vector<std::string>& hyp_;
  biasforge::Alignment path_;
  biasforge::Alignment best_;
  int best_cost_ = 0;
  std::uint64_t paths_ = 0;
};

struct Recount {
  std::uint64_t n_ref = 0, n_biased = 0, errors = 0, errors_biased = 0;
};

inline Recount recount(const biasforge::Alignment& ops, const std::vector<std::string>& ref,
                       const std::vector<std::string>& biasing) {
  const auto in = [&](const std::string& w) {
    return std::find(biasing.begin(), biasing.end(), w) != biasing.end();
  };
  Recount r;
  r.n_ref = ref.size();
  for (const auto& w : ref) r.n_biased += in(w);
  for (const auto& p : ops) {
    if (p.op == biasforge::EditOp::kMatch) continue;
    ++r.errors;
    const std::string& owner = p.op == biasforge::EditOp::kInsert ? p.hyp : p.ref;
    r.errors_biased += in(owner);
  }
  return r;
}

struct FilterHit {
  std::string word;
  int distance;
  bool operator==(const FilterHit&) const = default;
};

// Linear-scan filter: every segment against every entry with the full DP.
inline std::vector<FilterHit> linear_filter(const std::string& hypothesis,
                                            const std::vector<std::string>& list,
                                            const biasforge::CommonWordSet& common,
                                            std::size_t top_n, std::size_t max_span) {
  std::vector<std::vector<std::string>> runs;
  for (const auto& seg : biasforge::parse_sot(hypothesis).segments) {
    std::vector<std::string> cur;
    for (const auto& t : seg.tokens) {
      if (common.contains(t)) {
        if (!cur.empty()) runs.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(t);
      }
    }
    if (!cur.empty()) runs.push_back(cur);
  }
  std::vector<std::string> keys;
  for (const auto& e : list) {
    std::string k;
    for (char c : e) {
      if (c != ' ') k += c;
    }
    keys.push_back(k);
  }
  std::map<std::string, int> best;
  for (const auto& run : runs) {
    for (std::size_t len = 1; len <= std::min(run.size(), max_span); ++len) {
      for (std::size_t off = 0; off + len <= run.size(); ++off) {
        std::string joined;
        for (std::size_t k = off; k < off + len; ++k) joined += run[k];
        std::vector<FilterHit> scored;
        for (std::size_t e = 0; e < list.size(); ++e) {
          scored.push_back({list[e], naive_distance(joined, keys[e])});
        }
        std::sort(scored.begin(), scored.end(), [](const FilterHit& a, const FilterHit& b) {
          return a.distance != b.distance ? a.distance < b.distance : a.word < b.word;
        });
        for (std::size_t k = 0; k < std::min(top_n, scored.size()); ++k) {
          auto it = best.find(scored[k].word);
          if (it == best.end() || scored[k].distance < it->second) {
            best[scored[k].word] = scored[k].distance;
          }
        }
      }
    }
  }
  std::vector<FilterHit> out;
  for (const auto& [w, d] : best) out.push_back({w, d});
  std::sort(out.begin(), out.end(), [](const FilterHit& a, const FilterHit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.word < b.word;
  });
  return out;
}

inline std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                               const std::string& alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ") {
  const std::size_t len = min_len + rng() % (max_len - min_len + 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
  return s;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("biasforge-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
