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

#include "biasforge/corpus_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "biasforge/error.hpp"
#include "biasforge/report_io.hpp"
#include "biasforge/sot.hpp"

namespace biasforge {
namespace {

using nlohmann::json;

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace

WordList WordList::from_raw(const std::vector<std::string>& raw,
                            WordListSource source) {
  WordList list(source);
  for (const auto& r : raw) list.add(normalize_phrase(r));
  return list;
}

bool WordList::add(std::string entry) {
  if (entry.empty()) return false;
  if (!members_.insert(entry).second) return false;
  entries_.push_back(std::move(entry));
  return true;
}

UtteranceRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record is not a JSON object");
  UtteranceRecord r;
  for (const auto& [key, value] : j.items()) {
    if (key == "id") {
      if (!value.is_string()) throw ValidationError("id must be a string");
      r.id = value.get<std::string>();
    } else if (key == "reference") {
      if (!value.is_string()) throw ValidationError("reference must be a string");
      r.reference = value.get<std::string>();
    } else if (key == "hypothesis") {
      if (value.is_null()) continue;
      if (!value.is_string()) throw ValidationError("hypothesis must be a string");
      r.hypothesis = value.get<std::string>();
    } else if (key == "tags") {
      if (!value.is_object()) throw ValidationError("tags must be an object");
      for (const auto& [tk, tv] : value.items()) {
        if (!tv.is_string()) throw ValidationError("tag '" + tk + "' must be a string");
        r.tags[tk] = tv.get<std::string>();
      }
    } else {
      r.extra[key] = value;
    }
  }
  if (r.id.empty()) throw ValidationError("record id is missing or empty");
  if (r.reference.empty()) {
    throw ValidationError("record '" + r.id + "' has an empty reference");
  }
  return r;
}

json record_to_json(const UtteranceRecord& r) {
  json j = r.extra.is_object() ? r.extra : json::object();
  j["id"] = r.id;
  j["reference"] = r.reference;
  if (r.hypothesis) {
    j["hypothesis"] = *r.hypothesis;
  } else {
    j.erase("hypothesis");
  }
  if (!r.tags.empty()) {
    j["tags"] = r.tags;
  } else {
    j.erase("tags");
  }
  return j;
}

std::vector<UtteranceRecord> read_manifest(std::istream& in) {
  std::vector<UtteranceRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    UtteranceRecord r;
    try {
      r = record_from_json(j);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(r.id).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate id '" + r.id + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<UtteranceRecord> read_manifest_file(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_manifest(in);
  } catch (const Error& e) {
    throw IoError(path, e.what());
  }
}

void write_manifest(const std::vector<UtteranceRecord>& records,
                    std::ostream& out) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

void write_manifest_file(const std::vector<UtteranceRecord>& records,
                         const std::string& path) {
  auto out = open_out(path);
  write_manifest(records, out);
  finish(out, path);
}

WordList read_word_list(std::istream& in, WordListSource expected_source) {
  WordList list(expected_source);
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    list.add(normalize_phrase(line));
  }
  if (list.empty() && expected_source == WordListSource::kFullRare) {
    throw ValidationError("full rare-word list is empty");
  }
  return list;
}

WordList read_word_list_file(const std::string& path,
                             WordListSource expected_source) {
  auto in = open_in(path);
  try {
    return read_word_list(in, expected_source);
  } catch (const ValidationError& e) {
    throw IoError(path, e.what());
  }
}

void write_word_list(const WordList& list, std::ostream& out) {
  for (const auto& e : list.entries()) out << e << '\n';
}

FrequencyTable read_frequency_table(std::istream& in) {
  FrequencyTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (blank(line)) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected word<TAB>count");
    std::uint64_t count = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last || first == last) {
      throw ParseError(line_no, "count is not a non-negative integer");
    }
    const std::string word = normalize_phrase(std::string_view(line).substr(0, tab));
    if (word.empty()) throw ParseError(line_no, "empty word");
    table[word] += count;
  }
  return table;
}

FrequencyTable read_frequency_table_file(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_frequency_table(in);
  } catch (const ParseError& e) {
    throw IoError(path, e.what());
  }
}

void write_frequency_table(const FrequencyTable& table, std::ostream& out) {
  for (const auto& [w, c] : table) out << w << '\t' << c << '\n';
}

FrequencyTable count_reference_words(const std::vector<UtteranceRecord>& records) {
  FrequencyTable table;
  for (const auto& r : records) {
    for (const auto& tok : flatten_for_scoring(parse_sot(r.reference))) {
      ++table[tok];
    }
  }
  return table;
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  auto out = open_out(path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  finish(out, path);
}

// ---- score reports ----

namespace {

json ratio(const std::optional<double>& r) {
  return r ? json(*r) : json(nullptr);
}

json counts_json(const ErrorCounts& e) {
  return {{"sub", e.substitutions},
          {"del", e.deletions},
          {"ins", e.insertions},
          {"all", e.total()}};
}

ErrorCounts counts_from(const json& j) {
  ErrorCounts e;
  e.substitutions = j.at("sub").get<std::uint64_t>();
  e.deletions = j.at("del").get<std::uint64_t>();
  e.insertions = j.at("ins").get<std::uint64_t>();
  return e;
}

json coverage_json(const CoverageStat& c) {
  return {{"n_targets", c.n_targets},
          {"n_targets_present", c.n_targets_present},
          {"coverage", ratio(c.ratio())}};
}

CoverageStat coverage_from(const json& j) {
  return {j.at("n_targets").get<std::uint64_t>(),
          j.at("n_targets_present").get<std::uint64_t>()};
}

void fill_report_json(json& j, const AlignmentReport& r) {
  j["wer"] = ratio(r.wer());
  j["bwer"] = ratio(r.bwer());
  j["uwer"] = ratio(r.uwer());
  j["n_ref"] = r.n_ref;
  j["n_ref_biased"] = r.n_ref_biased;
  j["n_ref_unbiased"] = r.n_ref_unbiased();
  j["empty_reference"] = r.n_ref == 0;
  j["errors"] = {{"total", counts_json(r.errors_total())},
                 {"biased", counts_json(r.errors_biased)},
                 {"unbiased", counts_json(r.errors_unbiased)}};
  if (r.coverage) j["coverage"] = coverage_json(*r.coverage);
}

AlignmentReport report_part_from(const json& j) {
  AlignmentReport r;
  r.n_ref = j.at("n_ref").get<std::uint64_t>();
  r.n_ref_biased = j.at("n_ref_biased").get<std::uint64_t>();
  r.errors_biased = counts_from(j.at("errors").at("biased"));
  r.errors_unbiased = counts_from(j.at("errors").at("unbiased"));
  if (j.contains("coverage")) r.coverage = coverage_from(j.at("coverage"));
  return r;
}

}  // namespace

json report_to_json(const CorpusReport& report) {
  json corpus = json::object();
  fill_report_json(corpus, report.corpus);
  corpus["n_utterances"] = report.utterances.size();
  corpus["skipped"] = report.skipped;
  corpus["mean_coverage"] = ratio(report.mean_coverage());
  corpus["mean_list_size"] = ratio(report.mean_list_size());

  json utts = json::array();
  for (const auto& u : report.utterances) {
    json ju = json::object();
    ju["id"] = u.id;
    fill_report_json(ju, u.report);
    if (u.list_size) ju["list_size"] = *u.list_size;
    if (u.ops) {
      json ops = json::array();
      for (const auto& op : *u.ops) {
        ops.push_back({{"op", to_string(op.op)}, {"ref", op.ref}, {"hyp", op.hyp}});
      }
      ju["ops"] = std::move(ops);
    }
    utts.push_back(std::move(ju));
  }
  return {{"corpus", std::move(corpus)}, {"utterances", std::move(utts)}};
}

CorpusReport report_from_json(const json& j) {
  CorpusReport report;
  const auto& corpus = j.at("corpus");
  report.corpus = report_part_from(corpus);
  report.skipped = corpus.at("skipped").get<std::uint64_t>();
  for (const auto& ju : j.at("utterances")) {
    UtteranceScore u;
    u.id = ju.at("id").get<std::string>();
    u.report = report_part_from(ju);
    if (ju.contains("list_size")) u.list_size = ju.at("list_size").get<std::uint64_t>();
    if (ju.contains("ops")) {
      Alignment ops;
      for (const auto& op : ju.at("ops")) {
        ops.push_back({edit_op_from_string(op.at("op").get<std::string>()),
                       op.at("ref").get<std::string>(),
                       op.at("hyp").get<std::string>()});
      }
      u.ops = std::move(ops);
    }
    report.utterances.push_back(std::move(u));
  }
  return report;
}

void write_report(const CorpusReport& report, std::ostream& out) {
  out << report_to_json(report).dump(2) << '\n';
}

void write_report_file(const CorpusReport& report, const std::string& path) {
  auto out = open_out(path);
  write_report(report, out);
  finish(out, path);
}

CorpusReport read_report(std::istream& in) {
  try {
    return report_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed score report: ") + e.what());
  }
}

CorpusReport read_report_file(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_report(in);
  } catch (const ValidationError& e) {
    throw IoError(path, e.what());
  }
}

}  // namespace biasforge
