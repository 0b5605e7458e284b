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

#include "biasforge/text_norm.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <utility>

#include "biasforge/error.hpp"

namespace biasforge {
namespace {

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool ascii_word_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9');
}

bool strippable(UChar32 c) {
  if (c < 0x80) return !ascii_word_char(static_cast<char>(c));
  return u_ispunct(c) || (U_GET_GC_MASK(c) & (U_GC_S_MASK | U_GC_C_MASK)) != 0;
}

void push_stripped(std::u32string_view token, std::vector<Token>& out) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && strippable(static_cast<UChar32>(token[begin]))) ++begin;
  while (end > begin && strippable(static_cast<UChar32>(token[end - 1]))) --end;
  if (begin < end) out.push_back(to_utf8(token.substr(begin, end - begin)));
}

std::vector<Token> tokenize_ascii(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && ascii_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !ascii_space(text[j])) ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && !ascii_word_char(text[b])) ++b;
    while (e > b && !ascii_word_char(text[e - 1])) --e;
    if (b < e) {
      std::string tok(text.substr(b, e - b));
      for (char& c : tok) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      }
      out.push_back(std::move(tok));
    }
    i = j;
  }
  return out;
}

icu::UnicodeString nfc_upper(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s = nfc->normalize(s, status);
  s.toUpper(icu::Locale::getRoot());
  s = nfc->normalize(s, status);
  if (U_FAILURE(status)) throw Error("ICU normalization failed");
  return s;
}

}  // namespace

std::u32string to_utf32(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

std::string to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buf[4];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, 4, static_cast<UChar32>(c), error);
    if (error) {
      out += "\xEF\xBF\xBD";
    } else {
      out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
    }
  }
  return out;
}

std::vector<Token> normalize_tokenize(std::string_view text) {
  if (is_ascii(text)) return tokenize_ascii(text);

  const icu::UnicodeString s = nfc_upper(text);
  std::vector<Token> out;
  std::u32string current;
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
    const UChar32 c = s.char32At(i);
    if (u_isUWhiteSpace(c)) {
      push_stripped(current, out);
      current.clear();
    } else {
      current.push_back(static_cast<char32_t>(c));
    }
  }
  push_stripped(current, out);
  return out;
}

std::string normalize_word(std::string_view word) {
  return normalize_phrase(word);
}

std::string normalize_phrase(std::string_view text) {
  std::string out;
  for (const auto& tok : normalize_tokenize(text)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

CommonWordSet CommonWordSet::from_ranked(const std::vector<std::string>& ranked,
                                         int k) {
  if (k <= 0) throw ValidationError("common-word k must be positive");
  CommonWordSet set;
  set.k_ = k;
  for (const auto& raw : ranked) {
    if (set.ranked_.size() >= static_cast<std::size_t>(k)) break;
    std::string w = normalize_phrase(raw);
    if (w.empty()) continue;
    if (set.members_.insert(w).second) set.ranked_.push_back(std::move(w));
  }
  return set;
}

CommonWordSet CommonWordSet::from_frequencies(const FrequencyTable& freq,
                                              int k) {
  if (k <= 0) throw ValidationError("common-word k must be positive");
  std::vector<std::pair<std::string, std::uint64_t>> rows(freq.begin(),
                                                          freq.end());
  // std::map iteration is already lexicographic; a stable sort on count
  // keeps that order among ties.
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> ranked;
  ranked.reserve(rows.size());
  for (auto& r : rows) ranked.push_back(std::move(r.first));
  return from_ranked(ranked, k);
}

}  // namespace biasforge
