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

#include "biasforge/noise_model.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <set>

#include "biasforge/error.hpp"
#include "biasforge/rng.hpp"
#include "biasforge/sot.hpp"

namespace biasforge {
namespace {

constexpr std::u32string_view kDefaultAlphabet = U"ABCDEFGHIJKLMNOPQRSTUVWXYZ";

enum class CharOp { kSubstitute, kRemove, kInsert, kTranspose };

CharOp pick_op(Rng& rng, const CharOpWeights& w) {
  const double total = w.substitute + w.remove + w.insert + w.transpose;
  double x = uniform_unit(rng) * total;
  if ((x -= w.substitute) < 0) return CharOp::kSubstitute;
  if ((x -= w.remove) < 0) return CharOp::kRemove;
  if ((x -= w.insert) < 0) return CharOp::kInsert;
  return CharOp::kTranspose;
}

char32_t pick_char(Rng& rng, std::u32string_view alphabet) {
  return alphabet[uniform_below(rng, alphabet.size())];
}

bool substitute(Rng& rng, std::u32string& w, std::u32string_view alphabet) {
  if (w.empty()) return false;
  const std::size_t pos = uniform_below(rng, w.size());
  if (alphabet.size() < 2 && alphabet.front() == w[pos]) return false;
  char32_t c;
  do {
    c = pick_char(rng, alphabet);
  } while (c == w[pos]);
  w[pos] = c;
  return true;
}

// Applies edits within a budget of `budget` Levenshtein units.
void apply_edits(Rng& rng, std::u32string& w, int budget, const NoiseSpec& spec,
                 std::u32string_view alphabet) {
  while (budget > 0) {
    CharOp op = pick_op(rng, spec.char_ops);
    if (op == CharOp::kTranspose && (budget < 2 || w.size() < 2)) op = CharOp::kSubstitute;
    if (op == CharOp::kRemove && w.size() < 2) op = CharOp::kSubstitute;
    switch (op) {
      case CharOp::kSubstitute:
        if (!substitute(rng, w, alphabet)) {
          w.insert(w.begin() + static_cast<long>(uniform_below(rng, w.size() + 1)),
                   pick_char(rng, alphabet));
        }
        budget -= 1;
        break;
      case CharOp::kRemove:
        w.erase(w.begin() + static_cast<long>(uniform_below(rng, w.size())));
        budget -= 1;
        break;
      case CharOp::kInsert:
        w.insert(w.begin() + static_cast<long>(uniform_below(rng, w.size() + 1)),
                 pick_char(rng, alphabet));
        budget -= 1;
        break;
      case CharOp::kTranspose: {
        const std::size_t pos = uniform_below(rng, w.size() - 1);
        if (w[pos] == w[pos + 1]) {
          substitute(rng, w, alphabet);
          budget -= 1;
        } else {
          std::swap(w[pos], w[pos + 1]);
          budget -= 2;
        }
        break;
      }
    }
  }
}

bool normalization_stable(const std::string& w) {
  const auto toks = normalize_tokenize(w);
  return toks.size() == 1 && toks.front() == w;
}

}  // namespace

void NoiseSpec::validate() const {
  for (double p : {p_rare_corrupt, p_common_corrupt, p_word_delete, p_word_insert, p_split}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("noise probabilities must lie in [0, 1]");
  }
  if (max_char_edits < 1) throw ValidationError("max_char_edits must be at least 1");
  const auto& w = char_ops;
  if (w.substitute < 0 || w.remove < 0 || w.insert < 0 || w.transpose < 0 ||
      w.substitute + w.remove + w.insert + w.transpose <= 0) {
    throw ValidationError("character-op weights must be non-negative with a positive sum");
  }
}

CorruptionResult corrupt_utterance_traced(std::string_view reference_sot,
                                          std::string_view utterance_id,
                                          const CommonWordSet& common,
                                          const NoiseSpec& spec) {
  spec.validate();
  const std::u32string_view alphabet =
      spec.alphabet.empty() ? kDefaultAlphabet : std::u32string_view(spec.alphabet);
  Rng rng(derive_seed(spec.seed, utterance_id));

  CorruptionResult result;
  std::vector<std::vector<Token>> out_segments;
  for (const auto& seg : parse_sot(reference_sot).segments) {
    std::vector<Token> out;
    for (const auto& word : seg.tokens) {
      WordFate fate;
      fate.original = word;
      if (bernoulli(rng, spec.p_word_delete)) {
        fate.deleted = true;
      } else {
        const double p = common.contains(word) ? spec.p_common_corrupt : spec.p_rare_corrupt;
        std::string emitted = word;
        if (bernoulli(rng, p)) {
          const int edits = 1 + static_cast<int>(uniform_below(
                                    rng, static_cast<std::uint64_t>(spec.max_char_edits)));
          for (int attempt = 0; attempt < 5; ++attempt) {
            std::u32string w = to_utf32(word);
            apply_edits(rng, w, edits, spec, alphabet);
            std::string candidate = to_utf8(w);
            if (normalization_stable(candidate)) {
              emitted = std::move(candidate);
              fate.corrupted = true;
              fate.edits = edits;
              break;
            }
          }
        }
        const std::u32string cps = to_utf32(emitted);
        if (fate.corrupted && spec.split_words && fate.edits >= 2 && cps.size() >= 2 &&
            bernoulli(rng, spec.p_split)) {
          const std::size_t cut = 1 + uniform_below(rng, cps.size() - 1);
          std::string left = to_utf8(cps.substr(0, cut));
          std::string right = to_utf8(cps.substr(cut));
          if (normalization_stable(left) && normalization_stable(right)) {
            fate.split = true;
            fate.emitted = {std::move(left), std::move(right)};
          }
        }
        if (!fate.split) fate.emitted = {std::move(emitted)};
        out.insert(out.end(), fate.emitted.begin(), fate.emitted.end());
      }
      if (bernoulli(rng, spec.p_word_insert)) {
        Token extra;
        if (!common.empty()) {
          extra = common.ranked()[uniform_below(rng, common.size())];
        } else {
          std::u32string w;
          for (int i = 0; i < 3; ++i) w.push_back(pick_char(rng, alphabet));
          extra = to_utf8(w);
        }
        out.push_back(extra);
        result.inserted.push_back(std::move(extra));
      }
      result.words.push_back(std::move(fate));
    }
    out_segments.push_back(std::move(out));
  }
  // Keep one segment per reference speaker so the marker count survives even
  // when every word of a speaker was deleted.
  std::string hyp;
  for (std::size_t i = 0; i < out_segments.size(); ++i) {
    if (i > 0) {
      if (!hyp.empty()) hyp += ' ';
      hyp += kSpeakerChange;
    }
    for (const auto& t : out_segments[i]) {
      if (!hyp.empty()) hyp += ' ';
      hyp += t;
    }
  }
  result.hypothesis = std::move(hyp);
  return result;
}

std::u32string corpus_alphabet(const std::vector<UtteranceRecord>& records) {
  std::set<char32_t> letters;
  for (const auto& r : records) {
    for (const auto& tok : flatten_for_scoring(parse_sot(r.reference))) {
      for (char32_t c : to_utf32(tok)) {
        if (u_isalpha(static_cast<UChar32>(c))) letters.insert(c);
      }
    }
  }
  return {letters.begin(), letters.end()};
}

std::vector<UtteranceRecord> corrupt_corpus(std::vector<UtteranceRecord> records,
                                            const CommonWordSet& common,
                                            NoiseSpec spec, bool force) {
  if (!force) {
    for (const auto& r : records) {
      if (r.hypothesis) {
        throw ValidationError("record '" + r.id +
                              "' already has a hypothesis (use force to overwrite)");
      }
    }
  }
  if (spec.alphabet.empty()) spec.alphabet = corpus_alphabet(records);
  for (auto& r : records) {
    r.hypothesis = corrupt_utterance(r.reference, r.id, common, spec);
  }
  return records;
}

double expected_error_rate(std::uint64_t n_rare, std::uint64_t n_common,
                           const NoiseSpec& spec) {
  const double n = static_cast<double>(n_rare + n_common);
  if (n == 0) return 0.0;
  const double k = spec.max_char_edits;
  const double p_split = spec.split_words ? spec.p_split * (k - 1) / k : 0.0;
  const auto per_word = [&](double p_corrupt) {
    return spec.p_word_delete + (1 - spec.p_word_delete) * p_corrupt * (1 + p_split) +
           spec.p_word_insert;
  };
  return (static_cast<double>(n_rare) * per_word(spec.p_rare_corrupt) +
          static_cast<double>(n_common) * per_word(spec.p_common_corrupt)) /
         n;
}

}  // namespace biasforge
