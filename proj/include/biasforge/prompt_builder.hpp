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

#include "biasforge/corpus_io.hpp"

namespace biasforge {

enum class PromptCondition { kBaseline, kBiasing, kAntiContext };

inline constexpr std::string_view kBaselinePrompt = "Transcribe speech to text.";
inline constexpr std::string_view kBiasingPromptPrefix =
    "Use the rare words provided to improve the accuracy of ASR if they are "
    "relevant. The rare words are ";
inline constexpr std::string_view kBiasingPromptSuffix = ".";
inline constexpr std::string_view kWordSeparator = ", ";
inline constexpr std::size_t kDefaultPromptCap = 100;

struct PromptText {
  PromptCondition condition = PromptCondition::kBaseline;
  std::string text;
  std::vector<std::string> inserted_words;
  bool empty_list = false;

  bool operator==(const PromptText&) const = default;
};

PromptText baseline_prompt();

// Keeps the first `cap` words; callers pass words best-first.
PromptText biasing_prompt(const std::vector<std::string>& words,
                          std::size_t cap = kDefaultPromptCap);

// Replaces every word of `words` that is a target with a distinct word drawn
// from distractor_pool (never a target, never already in the list), then
// builds the biasing prompt. Throws ValidationError when the pool is too
// small.
PromptText anti_context_prompt(const std::vector<std::string>& words,
                               const std::vector<std::string>& targets,
                               const WordList& distractor_pool, std::uint64_t seed,
                               std::size_t cap = kDefaultPromptCap);

// Shorthand for a list made only of targets.
inline PromptText anti_context_prompt(const std::vector<std::string>& targets,
                                      const std::vector<std::string>& distractor_pool,
                                      std::uint64_t seed) {
  return anti_context_prompt(
      targets, targets, WordList::from_raw(distractor_pool, WordListSource::kFullRare),
      seed);
}

std::string to_string(PromptCondition c);
PromptCondition prompt_condition_from_string(std::string_view s);

}  // namespace biasforge
