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

#include "biasforge/prompt_builder.hpp"

#include <algorithm>
#include <unordered_set>

#include "biasforge/error.hpp"
#include "biasforge/rng.hpp"

namespace biasforge {

PromptText baseline_prompt() {
  return {PromptCondition::kBaseline, std::string(kBaselinePrompt), {}, false};
}

PromptText biasing_prompt(const std::vector<std::string>& words, std::size_t cap) {
  PromptText p;
  p.condition = PromptCondition::kBiasing;
  p.inserted_words.assign(words.begin(),
                          words.begin() + static_cast<long>(std::min(cap, words.size())));
  p.empty_list = p.inserted_words.empty();
  p.text = kBiasingPromptPrefix;
  for (std::size_t i = 0; i < p.inserted_words.size(); ++i) {
    if (i > 0) p.text += kWordSeparator;
    p.text += p.inserted_words[i];
  }
  p.text += kBiasingPromptSuffix;
  return p;
}

PromptText anti_context_prompt(const std::vector<std::string>& words,
                               const std::vector<std::string>& targets,
                               const WordList& distractor_pool, std::uint64_t seed,
                               std::size_t cap) {
  const std::unordered_set<std::string> target_set(targets.begin(), targets.end());
  std::unordered_set<std::string> taken(words.begin(), words.end());
  taken.insert(targets.begin(), targets.end());

  std::size_t needed = 0;
  for (const auto& w : words) needed += target_set.count(w);
  std::size_t taken_in_pool = 0;
  for (const auto& t : taken) taken_in_pool += distractor_pool.contains(t);
  const std::size_t usable = distractor_pool.size() - taken_in_pool;
  if (usable < needed) {
    throw ValidationError("anti-context pool has " + std::to_string(usable) +
                          " usable distractors, " + std::to_string(needed) + " needed");
  }

  LazyPermutation perm(distractor_pool.size(), seed);
  const auto draw = [&] {
    for (;;) {
      const auto& w = distractor_pool.entries()[*perm.next()];
      if (!taken.count(w)) return w;
    }
  };
  std::vector<std::string> replaced;
  replaced.reserve(words.size());
  for (const auto& w : words) {
    replaced.push_back(target_set.count(w) ? draw() : w);
  }
  PromptText p = biasing_prompt(replaced, cap);
  p.condition = PromptCondition::kAntiContext;
  return p;
}

std::string to_string(PromptCondition c) {
  switch (c) {
    case PromptCondition::kBaseline: return "baseline";
    case PromptCondition::kBiasing: return "biasing";
    case PromptCondition::kAntiContext: return "anti";
  }
  return "?";
}

PromptCondition prompt_condition_from_string(std::string_view s) {
  if (s == "baseline") return PromptCondition::kBaseline;
  if (s == "biasing") return PromptCondition::kBiasing;
  if (s == "anti" || s == "anti_context" || s == "anti-context") {
    return PromptCondition::kAntiContext;
  }
  throw ValidationError("unknown prompt condition '" + std::string(s) + "'");
}

}  // namespace biasforge
