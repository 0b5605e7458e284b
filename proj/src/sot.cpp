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

#include "biasforge/sot.hpp"

#include <algorithm>

#include "biasforge/error.hpp"

namespace biasforge {

std::string serialize_sot(std::vector<SpeakerSegment> segments) {
  if (segments.empty()) throw ValidationError("SOT needs at least one segment");
  for (const auto& s : segments) {
    if (!s.start_time) {
      throw ValidationError("segment for speaker '" + s.speaker_id +
                            "' has no start time");
    }
    if (s.tokens.empty()) {
      throw ValidationError("segment for speaker '" + s.speaker_id +
                            "' has no tokens");
    }
  }
  std::stable_sort(segments.begin(), segments.end(),
                   [](const SpeakerSegment& a, const SpeakerSegment& b) {
                     if (*a.start_time != *b.start_time) {
                       return *a.start_time < *b.start_time;
                     }
                     return a.speaker_id < b.speaker_id;
                   });
  std::vector<std::vector<Token>> parts;
  parts.reserve(segments.size());
  for (auto& s : segments) parts.push_back(std::move(s.tokens));
  return join_sot(parts);
}

SotTranscript parse_sot(std::string_view text) {
  SotTranscript out;
  std::size_t pos = 0;
  bool any_marker = false;
  for (;;) {
    const std::size_t next = text.find(kSpeakerChange, pos);
    const std::string_view piece =
        text.substr(pos, next == std::string_view::npos ? std::string_view::npos
                                                        : next - pos);
    auto tokens = normalize_tokenize(piece);
    if (tokens.empty()) {
      // A marker-free empty input is just an empty transcript.
      if (any_marker || next != std::string_view::npos) out.malformed = true;
    } else {
      out.segments.push_back({"", std::nullopt, std::move(tokens)});
    }
    if (next == std::string_view::npos) break;
    any_marker = true;
    pos = next + kSpeakerChange.size();
  }
  return out;
}

std::vector<Token> flatten_for_scoring(const SotTranscript& transcript,
                                       MarkerPolicy policy) {
  std::vector<Token> out;
  for (std::size_t i = 0; i < transcript.segments.size(); ++i) {
    if (i > 0 && policy == MarkerPolicy::kKeepAsToken) {
      out.emplace_back(kSpeakerChange);
    }
    const auto& toks = transcript.segments[i].tokens;
    out.insert(out.end(), toks.begin(), toks.end());
  }
  return out;
}

std::string join_sot(const std::vector<std::vector<Token>>& segments) {
  std::string out;
  bool first_segment = true;
  for (const auto& seg : segments) {
    if (seg.empty()) continue;
    if (!first_segment) {
      out += ' ';
      out += kSpeakerChange;
      out += ' ';
    }
    first_segment = false;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      if (i > 0) out += ' ';
      out += seg[i];
    }
  }
  return out;
}

}  // namespace biasforge
