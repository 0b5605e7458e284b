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

#include "biasforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <istream>
#include <sstream>

#include "biasforge/parallel.hpp"
#include "biasforge/report_io.hpp"
#include "biasforge/rng.hpp"
#include "biasforge/sot.hpp"

namespace biasforge {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

std::string path_join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::uint64_t utterance_seed(std::uint64_t seed, std::string_view stage, std::string_view id) {
  return derive_seed(derive_seed(seed, stage), id);
}

}  // namespace

// ---- stages ----

std::vector<UtteranceRecord> simulate_stage(std::vector<UtteranceRecord> records,
                                            const CommonWordSet& common, NoiseSpec spec,
                                            std::uint64_t seed, bool force) {
  spec.seed = derive_seed(seed, "simulate");
  return corrupt_corpus(std::move(records), common, std::move(spec), force);
}

std::vector<UtteranceList> build_lists_stage(const std::vector<UtteranceRecord>& records,
                                             const WordList& full_rare_list,
                                             BuildListOptions options, std::uint64_t seed,
                                             std::size_t threads) {
  std::vector<UtteranceList> out(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const auto& rec = records[i];
    BuildListOptions opts = options;
    opts.seed = utterance_seed(seed, "build-lists", rec.id);
    out[i].id = rec.id;
    out[i].list = build_biasing_list(flatten_for_scoring(parse_sot(rec.reference)),
                                     full_rare_list, opts);
  });
  return out;
}

std::vector<UtteranceFilter> filter_stage(const std::vector<UtteranceRecord>& records,
                                          const std::map<std::string, WordList>& lists,
                                          const MatchIndex* shared,
                                          const CommonWordSet& common,
                                          const FilterParams& params, std::size_t threads,
                                          SearchPath path) {
  params.validate();
  std::vector<UtteranceFilter> out(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const auto& rec = records[i];
    out[i].id = rec.id;
    const std::string hyp = rec.hypothesis.value_or("");
    if (shared) {
      out[i].output = filter(hyp, *shared, common, params, path);
      return;
    }
    const auto it = lists.find(rec.id);
    if (it == lists.end()) return;
    out[i].output = filter(hyp, MatchIndex(it->second.entries()), common, params, path);
  });
  return out;
}

std::vector<UtterancePrompt> prompt_stage(
    const std::vector<UtteranceFilter>& filtered, PromptCondition condition,
    std::size_t cap, const std::map<std::string, std::vector<std::string>>& targets,
    const WordList* distractor_pool, std::uint64_t seed) {
  static const std::vector<std::string> kNone;
  std::vector<UtterancePrompt> out;
  out.reserve(filtered.size());
  for (const auto& f : filtered) {
    UtterancePrompt p;
    p.id = f.id;
    switch (condition) {
      case PromptCondition::kBaseline:
        p.prompt = baseline_prompt();
        break;
      case PromptCondition::kBiasing:
        p.prompt = biasing_prompt(f.output.words(), cap);
        break;
      case PromptCondition::kAntiContext: {
        if (!distractor_pool) throw ValidationError("anti-context prompts need a distractor pool");
        const auto it = targets.find(f.id);
        p.prompt = anti_context_prompt(f.output.words(), it == targets.end() ? kNone : it->second,
                                       *distractor_pool, utterance_seed(seed, "anti", f.id), cap);
        break;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<UtteranceCorrection> correct_stage(const std::vector<UtteranceRecord>& records,
                                               const std::vector<UtterancePrompt>& prompts,
                                               const CommonWordSet& common,
                                               const CorrectOptions& options) {
  std::map<std::string, const PromptText*> by_id;
  for (const auto& p : prompts) by_id[p.id] = &p.prompt;
  static const PromptText kBaseline = baseline_prompt();

  std::vector<const UtteranceRecord*> todo;
  for (const auto& r : records) {
    if (r.hypothesis) todo.push_back(&r);
  }
  std::vector<UtteranceCorrection> out(todo.size());
  const auto prompt_for = [&](const std::string& id) -> const PromptText& {
    const auto it = by_id.find(id);
    return it == by_id.end() ? kBaseline : *it->second;
  };

  if (options.kind == CorrectorKind::kMock) {
    parallel_for(todo.size(), options.threads, [&](std::size_t i) {
      const auto& rec = *todo[i];
      out[i].id = rec.id;
      out[i].hypothesis = *rec.hypothesis;
      out[i].corrected =
          correct_mock(*rec.hypothesis, prompt_for(rec.id).inserted_words, common, options.mock)
              .corrected_text;
    });
    return out;
  }

  std::vector<CorrectionRequest> requests;
  std::vector<std::size_t> sent;
  for (std::size_t i = 0; i < todo.size(); ++i) {
    out[i].id = todo[i]->id;
    out[i].hypothesis = *todo[i]->hypothesis;
    out[i].corrected = out[i].hypothesis;
    if (out[i].hypothesis.empty()) continue;
    requests.push_back({prompt_for(todo[i]->id), out[i].hypothesis, options.endpoint.model_id, {}});
    sent.push_back(i);
  }
  const auto outcomes = correct_remote_batch(requests, options.endpoint);
  for (std::size_t k = 0; k < sent.size(); ++k) {
    auto& o = out[sent[k]];
    o.corrected = outcomes[k].text;
    o.ok = outcomes[k].corrected;
    o.error = outcomes[k].error;
  }
  return out;
}

std::vector<UtteranceRecord> apply_corrections(
    std::vector<UtteranceRecord> records, const std::vector<UtteranceCorrection>& corrections) {
  std::map<std::string, const UtteranceCorrection*> by_id;
  for (const auto& c : corrections) by_id[c.id] = &c;
  for (auto& r : records) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) continue;
    r.extra["first_pass_hypothesis"] = it->second->hypothesis;
    if (!it->second->ok) r.extra["correction_error"] = it->second->error;
    r.hypothesis = it->second->corrected;
  }
  return records;
}

CorpusReport score_stage(const std::vector<UtteranceRecord>& records,
                         const std::vector<UtteranceList>& lists,
                         const std::vector<UtteranceFilter>* filtered,
                         const ScoreOptions& options) {
  auto report = score_corpus(records, lists_by_id(lists), options);
  if (filtered) {
    std::map<std::string, const BiasingList*> list_of;
    for (const auto& l : lists) list_of[l.id] = &l.list;
    std::map<std::string, CoverageStat> cov;
    std::map<std::string, std::uint64_t> sizes;
    for (const auto& f : *filtered) {
      sizes[f.id] = f.output.entries.size();
      if (const auto it = list_of.find(f.id); it != list_of.end()) {
        cov[f.id] = coverage(it->second->targets(), f.output.words());
      }
    }
    attach_coverage(report, cov, sizes);
  }
  return report;
}

// ---- artifact files ----

std::string lists_to_jsonl(const std::vector<UtteranceList>& lists) {
  std::string out;
  for (const auto& l : lists) {
    json j = {{"id", l.id},
              {"targets", l.list.targets()},
              {"distractors", l.list.distractors()},
              {"entries", l.list.entries},
              {"seed", l.list.seed}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<UtteranceList> lists_from_jsonl(std::istream& in) {
  std::vector<UtteranceList> out;
  for_each_json_line(in, [&](const json& j) {
    UtteranceList l;
    l.id = j.at("id").get<std::string>();
    l.list.seed = j.value("seed", std::uint64_t{0});
    const auto targets = j.at("targets").get<std::vector<std::string>>();
    const std::unordered_set<std::string> is_target(targets.begin(), targets.end());
    auto entries = j.contains("entries") ? j.at("entries").get<std::vector<std::string>>()
                                         : std::vector<std::string>{};
    if (entries.empty()) {
      entries = targets;
      for (auto& d : j.at("distractors").get<std::vector<std::string>>()) entries.push_back(d);
    }
    for (auto& e : entries) {
      l.list.origin.push_back(is_target.count(e) ? BiasingList::Origin::kTarget
                                                 : BiasingList::Origin::kDistractor);
      l.list.entries.push_back(std::move(e));
    }
    out.push_back(std::move(l));
  });
  return out;
}

std::string filters_to_jsonl(const std::vector<UtteranceFilter>& filtered) {
  std::string out;
  for (const auto& f : filtered) {
    json entries = json::array();
    for (const auto& e : f.output.entries) {
      entries.push_back({{"word", e.word},
                         {"distance", e.distance},
                         {"segment", e.segment},
                         {"run", e.run},
                         {"offset", e.offset},
                         {"length", e.length}});
    }
    out += json{{"id", f.id}, {"filtered_entries", std::move(entries)}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<UtteranceFilter> filters_from_jsonl(std::istream& in) {
  std::vector<UtteranceFilter> out;
  for_each_json_line(in, [&](const json& j) {
    UtteranceFilter f;
    f.id = j.at("id").get<std::string>();
    for (const auto& e : j.at("filtered_entries")) {
      f.output.entries.push_back({e.at("word").get<std::string>(), e.at("distance").get<int>(),
                                  e.value("segment", std::string{}),
                                  e.value("run", std::size_t{0}),
                                  e.value("offset", std::size_t{0}),
                                  e.value("length", std::size_t{0})});
    }
    out.push_back(std::move(f));
  });
  return out;
}

std::string prompts_to_jsonl(const std::vector<UtterancePrompt>& prompts) {
  std::string out;
  for (const auto& p : prompts) {
    out += json{{"id", p.id},
                {"condition", to_string(p.prompt.condition)},
                {"text", p.prompt.text},
                {"inserted_words", p.prompt.inserted_words},
                {"empty_list", p.prompt.empty_list}}
               .dump();
    out += '\n';
  }
  return out;
}

std::vector<UtterancePrompt> prompts_from_jsonl(std::istream& in) {
  std::vector<UtterancePrompt> out;
  for_each_json_line(in, [&](const json& j) {
    UtterancePrompt p;
    p.id = j.at("id").get<std::string>();
    p.prompt.condition = prompt_condition_from_string(j.at("condition").get<std::string>());
    p.prompt.text = j.at("text").get<std::string>();
    p.prompt.inserted_words = j.at("inserted_words").get<std::vector<std::string>>();
    p.prompt.empty_list = j.value("empty_list", p.prompt.inserted_words.empty());
    out.push_back(std::move(p));
  });
  return out;
}

std::string corrections_to_jsonl(const std::vector<UtteranceCorrection>& corrections) {
  std::string out;
  for (const auto& c : corrections) {
    json j = {{"id", c.id}, {"hypothesis", c.hypothesis}, {"corrected", c.corrected}, {"ok", c.ok}};
    if (!c.ok) j["error"] = c.error;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::map<std::string, WordList> lists_by_id(const std::vector<UtteranceList>& lists) {
  std::map<std::string, WordList> out;
  for (const auto& l : lists) out.emplace(l.id, l.list.as_word_list());
  return out;
}

CommonWordSet load_common_set(const std::string& ranked_path, const std::string& freq_path,
                              int k, const std::vector<UtteranceRecord>& records) {
  if (!ranked_path.empty()) {
    return CommonWordSet::from_ranked(
        read_word_list_file(ranked_path, WordListSource::kCommon).entries(), k);
  }
  if (!freq_path.empty()) {
    return CommonWordSet::from_frequencies(read_frequency_table_file(freq_path), k);
  }
  std::vector<UtteranceRecord> train;
  for (const auto& r : records) {
    const auto it = r.tags.find("split");
    if (it != r.tags.end() && it->second == "train") train.push_back(r);
  }
  return CommonWordSet::from_frequencies(count_reference_words(train.empty() ? records : train), k);
}

// ---- end-to-end ----

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.manifest = j.value("manifest", c.manifest);
  c.full_list = j.value("full_list", c.full_list);
  c.common_list = j.value("common_list", c.common_list);
  c.freq_table = j.value("freq_table", c.freq_table);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.force_simulate = j.value("force", c.force_simulate);
  c.lists.distractors = j.value("distractors", c.lists.distractors);
  if (j.contains("list_cap")) c.lists.cap = j.at("list_cap").get<std::size_t>();
  c.lists.shuffle = j.value("shuffle", c.lists.shuffle);
  if (j.contains("top_n")) {
    if (j.at("top_n").is_array()) {
      c.top_n_sweep = j.at("top_n").get<std::vector<std::size_t>>();
    } else {
      c.filter.top_n = j.at("top_n").get<std::size_t>();
    }
  }
  c.filter.max_span = j.value("max_span", c.filter.max_span);
  c.filter.common_k = j.value("common_k", c.filter.common_k);
  if (j.contains("distance_cap")) c.filter.distance_cap = j.at("distance_cap").get<int>();
  if (j.contains("output_cap")) c.filter.output_cap = j.at("output_cap").get<std::size_t>();
  if (j.contains("condition")) {
    c.condition = prompt_condition_from_string(j.at("condition").get<std::string>());
  }
  c.prompt_cap = j.value("prompt_cap", c.prompt_cap);
  if (j.contains("corrector")) {
    const auto k = j.at("corrector").get<std::string>();
    if (k != "mock" && k != "remote") throw ValidationError("corrector must be mock or remote");
    c.correct.kind = k == "mock" ? CorrectorKind::kMock : CorrectorKind::kRemote;
  }
  c.correct.mock.d_max = j.value("d_max", c.correct.mock.d_max);
  c.correct.mock.max_span = c.filter.max_span;
  c.correct.endpoint = EndpointConfig::from_json(j.contains("endpoint") ? j.at("endpoint") : j);
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    NoiseSpec s;
    s.p_rare_corrupt = n.value("p_rare", s.p_rare_corrupt);
    s.p_common_corrupt = n.value("p_common", s.p_common_corrupt);
    s.max_char_edits = n.value("max_edits", s.max_char_edits);
    s.p_word_delete = n.value("p_word_delete", s.p_word_delete);
    s.p_word_insert = n.value("p_word_insert", s.p_word_insert);
    s.split_words = n.value("split", s.split_words);
    s.p_split = n.value("p_split", s.p_split);
    c.noise = s;
  }
  if (j.value("marker_policy", std::string("drop")) == "keep") {
    c.score.marker_policy = MarkerPolicy::kKeepAsToken;
  }
  c.score.emit_ops = j.value("emit_ops", c.score.emit_ops);
  return c;
}

RunResult run_pipeline(const RunConfig& config) {
  RunResult result;
  in_stage("config", [&] {
    if (config.out_dir.empty()) throw ValidationError("no output directory given");
    fs::create_directories(config.out_dir);
    return 0;
  });

  auto records = in_stage("load", [&] { return read_manifest_file(config.manifest); });
  const WordList full = in_stage("load", [&] {
    return read_word_list_file(config.full_list, WordListSource::kFullRare);
  });
  const CommonWordSet common = in_stage("load", [&] {
    return load_common_set(config.common_list, config.freq_table, config.filter.common_k, records);
  });

  if (config.noise) {
    records = in_stage("simulate", [&] {
      auto out = simulate_stage(std::move(records), common, *config.noise, config.seed,
                                config.force_simulate);
      write_manifest_file(out, path_join(config.out_dir, "noisy_manifest.jsonl"));
      return out;
    });
  }

  const auto lists = in_stage("build-lists", [&] {
    auto out = build_lists_stage(records, full, config.lists, config.seed, config.threads);
    write_text_file(path_join(config.out_dir, "lists.jsonl"), lists_to_jsonl(out));
    return out;
  });
  const auto biasing = lists_by_id(lists);

  result.uncorrected = in_stage("score", [&] {
    auto r = score_stage(records, lists, nullptr, config.score);
    const auto path = path_join(config.out_dir, "report_uncorrected.json");
    write_report_file(r, path);
    result.report_paths.push_back(path);
    return r;
  });

  CorrectOptions correct = config.correct;
  correct.threads = config.threads;
  if (correct.kind == CorrectorKind::kRemote) correct.endpoint.load_api_key_from_env();

  const auto finish = [&](const std::string& dir, const std::vector<UtterancePrompt>& prompts,
                          const std::vector<UtteranceFilter>* filtered) {
    const auto corrections = in_stage("correct", [&] {
      auto c = correct_stage(records, prompts, common, correct);
      write_text_file(path_join(dir, "corrections.jsonl"), corrections_to_jsonl(c));
      return c;
    });
    for (const auto& c : corrections) result.correction_failures += !c.ok;
    const auto corrected = apply_corrections(records, corrections);
    return in_stage("score", [&] {
      write_manifest_file(corrected, path_join(dir, "corrected_manifest.jsonl"));
      auto r = score_stage(corrected, lists, filtered, config.score);
      const auto path = path_join(dir, "report.json");
      write_report_file(r, path);
      result.report_paths.push_back(path);
      return r;
    });
  };

  if (config.condition == PromptCondition::kBaseline) {
    std::vector<UtteranceFilter> none;
    for (const auto& r : records) none.push_back({r.id, {}});
    const auto prompts = prompt_stage(none, PromptCondition::kBaseline, config.prompt_cap, {},
                                      nullptr, config.seed);
    write_text_file(path_join(config.out_dir, "prompts.jsonl"), prompts_to_jsonl(prompts));
    result.baseline = finish(config.out_dir, prompts, nullptr);
    return result;
  }

  std::map<std::string, std::vector<std::string>> targets;
  for (const auto& l : lists) targets[l.id] = l.list.targets();

  std::vector<std::size_t> sweep = config.top_n_sweep;
  if (sweep.empty()) sweep.push_back(config.filter.top_n);
  for (const std::size_t top_n : sweep) {
    const std::string dir = sweep.size() == 1
                                ? config.out_dir
                                : path_join(config.out_dir, "topn-" + std::to_string(top_n));
    fs::create_directories(dir);
    FilterParams params = config.filter;
    params.top_n = top_n;

    const auto filtered = in_stage("filter", [&] {
      auto f = filter_stage(records, biasing, nullptr, common, params, config.threads);
      write_text_file(path_join(dir, "filtered.jsonl"), filters_to_jsonl(f));
      return f;
    });
    const auto prompts = in_stage("prompt", [&] {
      auto p = prompt_stage(filtered, config.condition, config.prompt_cap, targets, &full,
                            config.seed);
      write_text_file(path_join(dir, "prompts.jsonl"), prompts_to_jsonl(p));
      return p;
    });
    result.by_top_n.emplace_back(top_n, finish(dir, prompts, &filtered));
  }
  return result;
}

namespace {

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

json timing_json(const std::vector<double>& ms) {
  double total = 0.0;
  for (double x : ms) total += x;
  return {{"p50_ms", percentile(ms, 0.50)},
          {"p95_ms", percentile(ms, 0.95)},
          {"mean_ms", ms.empty() ? 0.0 : total / static_cast<double>(ms.size())},
          {"total_ms", total}};
}

}  // namespace

BenchResult run_bench(const std::vector<UtteranceRecord>& records, const WordList& list,
                      const CommonWordSet& common, const FilterParams& params,
                      std::size_t threads) {
  using Clock = std::chrono::steady_clock;
  params.validate();
  const auto build_start = Clock::now();
  const MatchIndex index(list.entries());
  const double build_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - build_start).count();

  const std::size_t n = records.size();
  std::vector<FilterOutput> indexed(n), scanned(n);
  std::vector<double> indexed_ms(n), scan_ms(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const std::string hyp = records[i].hypothesis.value_or("");
    auto t0 = Clock::now();
    indexed[i] = filter(hyp, index, common, params, SearchPath::kIndexed);
    auto t1 = Clock::now();
    scanned[i] = filter(hyp, index, common, params, SearchPath::kLinearScan);
    auto t2 = Clock::now();
    indexed_ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    scan_ms[i] = std::chrono::duration<double, std::milli>(t2 - t1).count();
  });

  BenchResult out;
  std::vector<UtteranceFilter> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.identical = out.identical && indexed[i].entries == scanned[i].entries;
    rows[i] = {records[i].id, indexed[i]};
  }
  double indexed_total = 0.0, scan_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    indexed_total += indexed_ms[i];
    scan_total += scan_ms[i];
  }
  const double speedup = indexed_total > 0 ? scan_total / indexed_total : 1.0;
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(fnv1a(filters_to_jsonl(rows))));
  out.report = {{"utterances", n},
                {"list_entries", list.size()},
                {"threads", threads},
                {"top_n", params.top_n},
                {"max_span", params.max_span},
                {"index_build_ms", build_ms},
                {"indexed", timing_json(indexed_ms)},
                {"scan", timing_json(scan_ms)},
                {"speedup", speedup},
                {"regression_alarm", speedup < 1.0},
                {"identical", out.identical},
                {"output_digest", digest}};
  return out;
}

}  // namespace biasforge
