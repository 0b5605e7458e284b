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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/text_norm.hpp"

namespace biasforge {

struct SpeakerSegment {
  std::string speaker_id;
  std::optional<double> start_time;
  std::vector<Token> tokens;

  bool operator==(const SpeakerSegment&) const = default;
};

struct SotTranscript {
  std::vector<SpeakerSegment> segments;
  // Set by parse_sot when empty segments had to be dropped.
  bool malformed = false;
};

enum class MarkerPolicy { kDrop, kKeepAsToken };

// FIFO serialization: segments ordered by start time (ties by speaker id),
// joined with " <sc> ". Throws ValidationError on an empty segment list, a
// missing start time, or a segment without tokens.
std::string serialize_sot(std::vector<SpeakerSegment> segments);

// Splits on <sc> and tokenizes each side. Never throws.
SotTranscript parse_sot(std::string_view text);

std::vector<Token> flatten_for_scoring(const SotTranscript& transcript,
                                       MarkerPolicy policy = MarkerPolicy::kDrop);

// Inverse of parse_sot for already-tokenized segments.
std::string join_sot(const std::vector<std::vector<Token>>& segments);

}  // namespace biasforge
