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

#include "biasforge/bias_catalog.hpp"

#include <unordered_set>

#include "biasforge/error.hpp"
#include "biasforge/rng.hpp"

namespace biasforge {

std::vector<std::string> BiasingList::targets() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (origin[i] == Origin::kTarget) out.push_back(entries[i]);
  }
  return out;
}

std::vector<std::string> BiasingList::distractors() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (origin[i] == Origin::kDistractor) out.push_back(entries[i]);
  }
  return out;
}

WordList BiasingList::as_word_list() const {
  WordList list(WordListSource::kPerUtterance);
  for (const auto& e : entries) list.add(e);
  return list;
}

std::vector<std::string> extract_targets(const std::vector<Token>& reference,
                                         const WordList& full_rare_list) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& tok : reference) {
    if (full_rare_list.contains(tok) && seen.insert(tok).second) {
      out.push_back(tok);
    }
  }
  return out;
}

std::vector<std::string> sample_distractors(const WordList& full_rare_list,
                                            const std::vector<std::string>& targets,
                                            std::size_t n, std::uint64_t seed) {
  if (n == 0) return {};
  const std::unordered_set<std::string> excluded(targets.begin(), targets.end());
  std::size_t excluded_in_list = 0;
  for (const auto& t : excluded) excluded_in_list += full_rare_list.contains(t);
  const std::size_t pool = full_rare_list.size() - excluded_in_list;
  if (pool < n) {
    throw ValidationError("distractor pool has " + std::to_string(pool) +
                          " words, " + std::to_string(n) + " requested (short by " +
                          std::to_string(n - pool) + ")");
  }
  const auto& entries = full_rare_list.entries();
  LazyPermutation perm(entries.size(), seed);
  std::vector<std::string> out;
  out.reserve(n);
  while (out.size() < n) {
    const auto& w = entries[*perm.next()];
    if (!excluded.count(w)) out.push_back(w);
  }
  return out;
}

bool classify_rare_ami(const std::string& word, const WordList& full_rare_list,
                       const FrequencyTable& freq, std::uint64_t threshold) {
  if (full_rare_list.contains(word)) return true;
  const auto it = freq.find(word);
  const std::uint64_t count = it == freq.end() ? 0 : it->second;
  return count < threshold;
}

WordList merge_lists(const std::vector<WordList>& lists) {
  WordList merged(lists.empty() ? WordListSource::kLecture : lists.front().source());
  for (const auto& l : lists) {
    for (const auto& e : l.entries()) merged.add(e);
  }
  return merged;
}

CoverageStat coverage(const std::vector<std::string>& targets,
                      const std::vector<std::string>& candidates) {
  const std::unordered_set<std::string> cand(candidates.begin(), candidates.end());
  std::unordered_set<std::string> seen;
  CoverageStat stat;
  for (const auto& t : targets) {
    if (!seen.insert(t).second) continue;
    ++stat.n_targets;
    stat.n_targets_present += cand.count(t);
  }
  return stat;
}

BiasingList build_biasing_list(const std::vector<Token>& reference,
                               const WordList& full_rare_list,
                               const BuildListOptions& options) {
  BiasingList list;
  list.seed = options.seed;
  auto targets = extract_targets(reference, full_rare_list);
  auto distractors =
      sample_distractors(full_rare_list, targets, options.distractors, options.seed);

  if (options.cap) {
    const std::size_t cap = *options.cap;
    if (targets.size() >= cap) {
      targets.resize(cap);
      distractors.clear();
    } else if (targets.size() + distractors.size() > cap) {
      distractors.resize(cap - targets.size());
    }
  }

  for (auto& t : targets) {
    list.entries.push_back(std::move(t));
    list.origin.push_back(BiasingList::Origin::kTarget);
  }
  for (auto& d : distractors) {
    list.entries.push_back(std::move(d));
    list.origin.push_back(BiasingList::Origin::kDistractor);
  }

  if (options.shuffle && list.entries.size() > 1) {
    Rng rng(derive_seed(options.seed, "shuffle"));
    for (std::size_t i = list.entries.size() - 1; i > 0; --i) {
      const std::size_t j = uniform_below(rng, i + 1);
      std::swap(list.entries[i], list.entries[j]);
      std::swap(list.origin[i], list.origin[j]);
    }
  }
  return list;
}

}  // namespace biasforge
