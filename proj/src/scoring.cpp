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

#include "biasforge/scoring.hpp"

#include <algorithm>

#include "biasforge/error.hpp"

namespace biasforge {
namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> AlignmentReport::wer() const {
  return ratio(errors_total().total(), n_ref);
}

std::optional<double> AlignmentReport::bwer() const {
  return ratio(errors_biased.total(), n_ref_biased);
}

std::optional<double> AlignmentReport::uwer() const {
  return ratio(errors_unbiased.total(), n_ref_unbiased());
}

AlignmentReport& AlignmentReport::operator+=(const AlignmentReport& o) {
  n_ref += o.n_ref;
  n_ref_biased += o.n_ref_biased;
  errors_biased += o.errors_biased;
  errors_unbiased += o.errors_unbiased;
  if (o.coverage) {
    if (!coverage) coverage = CoverageStat{};
    *coverage += *o.coverage;
  }
  return *this;
}

std::optional<double> CorpusReport::mean_coverage() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& u : utterances) {
    if (!u.report.coverage) continue;
    if (auto r = u.report.coverage->ratio()) {
      sum += *r;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> CorpusReport::mean_list_size() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& u : utterances) {
    if (!u.list_size) continue;
    sum += static_cast<double>(*u.list_size);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

Alignment align(const std::vector<Token>& ref, const std::vector<Token>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t w = m + 1;
  std::vector<std::uint32_t> d((n + 1) * w);
  for (std::size_t i = 0; i <= n; ++i) d[i * w] = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) d[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = d[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      d[i * w + j] = std::min({diag, d[(i - 1) * w + j] + 1, d[i * w + j - 1] + 1});
    }
  }

  Alignment out;
  out.reserve(std::max(n, m));
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = d[i * w + j];
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (here == d[(i - 1) * w + j - 1] + (same ? 0 : 1)) {
        out.push_back({same ? EditOp::kMatch : EditOp::kSubstitute, ref[i - 1], hyp[j - 1]});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && here == d[(i - 1) * w + j] + 1) {
      out.push_back({EditOp::kDelete, ref[i - 1], {}});
      --i;
      continue;
    }
    out.push_back({EditOp::kInsert, {}, hyp[j - 1]});
    --j;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::uint64_t word_edit_distance(const std::vector<Token>& ref,
                                 const std::vector<Token>& hyp) {
  std::vector<std::uint64_t> prev(hyp.size() + 1);
  std::vector<std::uint64_t> cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      cur[j] = std::min({prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                         prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

AlignmentReport score(const Alignment& alignment, const WordList& biasing_set) {
  AlignmentReport r;
  for (const auto& p : alignment) {
    if (p.op == EditOp::kInsert) {
      auto& e = biasing_set.contains(p.hyp) ? r.errors_biased : r.errors_unbiased;
      ++e.insertions;
      continue;
    }
    const bool biased = biasing_set.contains(p.ref);
    ++r.n_ref;
    if (biased) ++r.n_ref_biased;
    auto& e = biased ? r.errors_biased : r.errors_unbiased;
    if (p.op == EditOp::kSubstitute) ++e.substitutions;
    if (p.op == EditOp::kDelete) ++e.deletions;
  }
  return r;
}

CorpusReport score_corpus(const std::vector<UtteranceRecord>& records,
                          const std::map<std::string, WordList>& biasing,
                          const ScoreOptions& options) {
  static const WordList kEmpty;
  CorpusReport report;
  for (const auto& rec : records) {
    if (!rec.hypothesis) {
      ++report.skipped;
      continue;
    }
    const auto ref = flatten_for_scoring(parse_sot(rec.reference), options.marker_policy);
    const auto hyp = flatten_for_scoring(parse_sot(*rec.hypothesis), options.marker_policy);
    auto alignment = align(ref, hyp);
    const auto it = biasing.find(rec.id);
    UtteranceScore u;
    u.id = rec.id;
    u.report = score(alignment, it == biasing.end() ? kEmpty : it->second);
    if (options.emit_ops) u.ops = std::move(alignment);
    report.corpus += u.report;
    report.utterances.push_back(std::move(u));
  }
  return report;
}

void attach_coverage(CorpusReport& report,
                     const std::map<std::string, CoverageStat>& coverage,
                     const std::map<std::string, std::uint64_t>& list_sizes) {
  for (auto& u : report.utterances) {
    if (auto it = coverage.find(u.id); it != coverage.end()) {
      u.report.coverage = it->second;
      if (!report.corpus.coverage) report.corpus.coverage = CoverageStat{};
      *report.corpus.coverage += it->second;
    }
    if (auto it = list_sizes.find(u.id); it != list_sizes.end()) {
      u.list_size = it->second;
    }
  }
}

std::string to_string(EditOp op) {
  switch (op) {
    case EditOp::kMatch: return "match";
    case EditOp::kSubstitute: return "sub";
    case EditOp::kDelete: return "del";
    case EditOp::kInsert: return "ins";
  }
  return "?";
}

EditOp edit_op_from_string(const std::string& s) {
  if (s == "match") return EditOp::kMatch;
  if (s == "sub") return EditOp::kSubstitute;
  if (s == "del") return EditOp::kDelete;
  if (s == "ins") return EditOp::kInsert;
  throw ValidationError("unknown alignment op '" + s + "'");
}

}  // namespace biasforge
