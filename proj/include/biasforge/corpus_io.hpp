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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "biasforge/text_norm.hpp"

namespace biasforge {

struct UtteranceRecord {
  std::string id;
  std::string reference;
  std::optional<std::string> hypothesis;
  std::map<std::string, std::string> tags;
  // Fields this library does not interpret. Written back unchanged.
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const UtteranceRecord&) const = default;
};

enum class WordListSource { kFullRare, kCommon, kPerUtterance, kLecture };

// Ordered, normalized, duplicate-free entries with O(1) membership.
class WordList {
 public:
  WordList() = default;
  explicit WordList(WordListSource source) : source_(source) {}

  // Normalizes each raw entry; drops empties and repeats.
  static WordList from_raw(const std::vector<std::string>& raw,
                           WordListSource source);

  // Appends a normalized entry. Returns false if it was already present.
  bool add(std::string entry);

  bool contains(std::string_view entry) const {
    return members_.count(std::string(entry)) != 0;
  }
  const std::vector<std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  WordListSource source() const { return source_; }

  bool operator==(const WordList& o) const {
    return source_ == o.source_ && entries_ == o.entries_;
  }

 private:
  WordListSource source_ = WordListSource::kPerUtterance;
  std::vector<std::string> entries_;
  std::unordered_set<std::string> members_;
};

// Manifest: one JSON object per line with keys id, reference, hypothesis
// (optional), tags (optional). Blank lines are skipped.
std::vector<UtteranceRecord> read_manifest(std::istream& in);
std::vector<UtteranceRecord> read_manifest_file(const std::string& path);

nlohmann::json record_to_json(const UtteranceRecord& record);
UtteranceRecord record_from_json(const nlohmann::json& j);

// Canonical form: compact JSON with sorted keys, one record per line.
void write_manifest(const std::vector<UtteranceRecord>& records,
                    std::ostream& out);
void write_manifest_file(const std::vector<UtteranceRecord>& records,
                         const std::string& path);

// One entry per line; blank lines ignored. A full rare list must not be
// empty after normalization.
WordList read_word_list(std::istream& in, WordListSource expected_source);
WordList read_word_list_file(const std::string& path,
                             WordListSource expected_source);
void write_word_list(const WordList& list, std::ostream& out);

// `word<TAB>count` per line.
FrequencyTable read_frequency_table(std::istream& in);
FrequencyTable read_frequency_table_file(const std::string& path);
void write_frequency_table(const FrequencyTable& table, std::ostream& out);

// Counts normalized reference words (speaker-change markers excluded).
FrequencyTable count_reference_words(
    const std::vector<UtteranceRecord>& records);

// Helpers for callers that write many artifacts.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace biasforge
