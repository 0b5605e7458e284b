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

#include "biasforge/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "biasforge/error.hpp"
#include "biasforge/rng.hpp"
#include "biasforge/sot.hpp"

namespace biasforge {
namespace {

constexpr std::array<const char*, 30> kOnsets = {
    "B", "C", "D", "F", "G", "H", "J", "K", "L", "M", "N", "P", "R", "S", "T",
    "V", "W", "Z", "BR", "CH", "CL", "DR", "GR", "PH", "PL", "SH", "ST", "TH", "TR", ""};
constexpr std::array<const char*, 8> kVowels = {"A", "E", "I", "O", "U", "AI", "EA", "OU"};
constexpr std::array<const char*, 9> kCodas = {"", "N", "R", "S", "L", "T", "X", "ND", "RT"};

std::string syllable(Rng& rng) {
  std::string s = kOnsets[uniform_below(rng, kOnsets.size())];
  s += kVowels[uniform_below(rng, kVowels.size())];
  s += kCodas[uniform_below(rng, kCodas.size())];
  return s;
}

std::string pseudo_word(Rng& rng, std::size_t min_syl, std::size_t max_syl) {
  const std::size_t n = min_syl + uniform_below(rng, max_syl - min_syl + 1);
  std::string w;
  for (std::size_t i = 0; i < n; ++i) w += syllable(rng);
  return w;
}

std::vector<std::string> unique_words(Rng& rng, std::size_t count, std::size_t min_syl,
                                      std::size_t max_syl,
                                      std::unordered_set<std::string>& used) {
  std::vector<std::string> out;
  out.reserve(count);
  std::size_t misses = 0;
  while (out.size() < count) {
    std::string w = pseudo_word(rng, min_syl, max_syl);
    if (w.size() < 2 || !used.insert(w).second) {
      if (++misses > 50 * count + 1000) {
        throw ValidationError("cannot generate " + std::to_string(count) + " distinct words");
      }
      continue;
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

std::vector<std::string> make_synthetic_lexicon(std::size_t size, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "lexicon"));
  std::unordered_set<std::string> used;
  return unique_words(rng, size, 2, 5, used);
}

SyntheticCorpus make_synthetic_corpus(const SynthSpec& spec) {
  if (spec.min_words < 1 || spec.max_words < spec.min_words || spec.max_speakers < 1) {
    throw ValidationError("invalid synthetic corpus shape");
  }
  SyntheticCorpus corpus;

  std::unordered_set<std::string> used;
  {
    Rng rng(derive_seed(spec.seed, "common"));
    corpus.common_ranked = unique_words(rng, spec.common_size, 1, 2, used);
  }
  {
    Rng rng(derive_seed(spec.seed, "lexicon"));
    for (auto& w : unique_words(rng, spec.lexicon_size, 2, 5, used)) {
      corpus.full_rare_list.add(std::move(w));
    }
  }

  // Zipf(1) over common ranks.
  std::vector<double> cdf(corpus.common_ranked.size());
  double total = 0.0;
  for (std::size_t r = 0; r < cdf.size(); ++r) {
    total += 1.0 / static_cast<double>(r + 1);
    cdf[r] = total;
  }

  Rng rng(derive_seed(spec.seed, "utterances"));
  const auto& rare = corpus.full_rare_list.entries();
  for (std::size_t u = 0; u < spec.utterances; ++u) {
    char id[32];
    std::snprintf(id, sizeof id, "synth-%05zu", u);
    const std::size_t speakers = 1 + uniform_below(rng, spec.max_speakers);
    std::vector<SpeakerSegment> segments;
    for (std::size_t s = 0; s < speakers; ++s) {
      SpeakerSegment seg;
      seg.speaker_id = "spk" + std::to_string(s);
      seg.start_time = static_cast<double>(uniform_below(rng, 1000)) / 100.0;
      const std::size_t n =
          spec.min_words + uniform_below(rng, spec.max_words - spec.min_words + 1);
      for (std::size_t i = 0; i < n; ++i) {
        if (!rare.empty() && bernoulli(rng, spec.p_rare_word)) {
          seg.tokens.push_back(rare[uniform_below(rng, rare.size())]);
        } else if (!cdf.empty()) {
          const double x = uniform_unit(rng) * total;
          const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
          const auto rank = std::min<std::size_t>(
              static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
          seg.tokens.push_back(corpus.common_ranked[rank]);
        }
      }
      if (!seg.tokens.empty()) segments.push_back(std::move(seg));
    }
    if (segments.empty()) continue;
    UtteranceRecord rec;
    rec.id = id;
    rec.reference = serialize_sot(std::move(segments));
    rec.tags = {{"dataset", "synthetic"}, {"speakers", std::to_string(speakers)}};
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

}  // namespace biasforge
