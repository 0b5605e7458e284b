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

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "biasforge/pipeline.hpp"
#include "biasforge/report_io.hpp"
#include "biasforge/sot.hpp"
#include "biasforge/synthetic.hpp"

namespace bf = biasforge;
using nlohmann::json;

namespace {

// Explicit flags are layered over the config file. Keys with a slash go to
// nested objects ("noise/p_rare").
struct Overlay {
  std::vector<std::function<void(json&)>> apply;

  template <typename T>
  CLI::Option* option(CLI::App* app, const std::string& flag, const std::string& key,
                      const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply.push_back([value, opt, key](json& j) {
      if (opt->count() == 0) return;
      if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
        if (value->size() == 1) {
          j[json::json_pointer("/" + key)] = value->front();
          return;
        }
      }
      j[json::json_pointer("/" + key)] = *value;
    });
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flag, const std::string& key,
                    const std::string& help, json when_set = true) {
    CLI::Option* opt = app->add_flag(flag, help);
    apply.push_back([opt, key, when_set](json& j) {
      if (opt->count() != 0) j[json::json_pointer("/" + key)] = when_set;
    });
    return opt;
  }
};

std::string str(const json& j, const std::string& key, const std::string& fallback = "") {
  return j.contains(key) ? j.at(key).get<std::string>() : fallback;
}

std::string need(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).get<std::string>().empty()) {
    throw bf::ValidationError("missing required setting '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

std::string out_path(const json& j, const std::string& default_name) {
  if (j.contains("out")) return j.at("out").get<std::string>();
  const std::string dir = str(j, "out_dir", ".");
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / default_name).string();
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bf::IoError(path, "cannot open for reading");
  return in;
}

bf::CommonWordSet common_for(const json& j, const std::vector<bf::UtteranceRecord>& records) {
  return bf::load_common_set(str(j, "common_list"), str(j, "freq_table"),
                             j.value("common_k", 5000), records);
}

bool is_jsonl(const std::string& path) {
  return std::filesystem::path(path).extension() == ".jsonl";
}

std::vector<bf::UtteranceList> load_lists(const std::string& path) {
  auto in = open_in(path);
  return bf::lists_from_jsonl(in);
}

std::vector<bf::UtteranceFilter> load_filters(const std::string& path) {
  auto in = open_in(path);
  return bf::filters_from_jsonl(in);
}

// ---- subcommands ----

int cmd_synth(const json& j) {
  bf::SynthSpec spec;
  spec.utterances = j.value("utterances", spec.utterances);
  spec.lexicon_size = j.value("lexicon_size", spec.lexicon_size);
  spec.seed = j.value("seed", spec.seed);
  const auto corpus = bf::make_synthetic_corpus(spec);
  const std::string dir = str(j, "out_dir", ".");
  std::filesystem::create_directories(dir);
  const auto at = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  std::ostringstream full, common;
  bf::write_word_list(corpus.full_rare_list, full);
  for (const auto& w : corpus.common_ranked) common << w << '\n';
  bf::write_text_file(at("full_list.txt"), full.str());
  bf::write_text_file(at("common.txt"), common.str());
  bf::write_manifest_file(corpus.records, at("manifest.jsonl"));
  std::cerr << "wrote " << corpus.records.size() << " utterances to " << dir << '\n';
  return 0;
}

int cmd_simulate(const json& j) {
  const auto cfg = bf::RunConfig::from_json(j);
  auto records = bf::read_manifest_file(need(j, "manifest"));
  const auto common = common_for(j, records);
  records = bf::simulate_stage(std::move(records), common, cfg.noise.value_or(bf::NoiseSpec{}),
                               cfg.seed, cfg.force_simulate);
  bf::write_manifest_file(records, out_path(j, "noisy_manifest.jsonl"));
  return 0;
}

int cmd_build_lists(const json& j) {
  const auto cfg = bf::RunConfig::from_json(j);
  const auto records = bf::read_manifest_file(need(j, "manifest"));
  auto full = bf::read_word_list_file(need(j, "full_list"), bf::WordListSource::kFullRare);
  if (j.contains("freq_threshold")) {
    // Words seen fewer than the threshold in the frequency table count as
    // rare even when the full list lacks them.
    const auto freq = bf::read_frequency_table_file(need(j, "freq_table"));
    const auto threshold = j.at("freq_threshold").get<std::uint64_t>();
    for (const auto& r : records) {
      for (const auto& w : bf::flatten_for_scoring(bf::parse_sot(r.reference))) {
        if (bf::classify_rare_ami(w, full, freq, threshold)) full.add(w);
      }
    }
  }
  const auto lists = bf::build_lists_stage(records, full, cfg.lists, cfg.seed, cfg.threads);
  bf::write_text_file(out_path(j, "lists.jsonl"), bf::lists_to_jsonl(lists));
  return 0;
}

int cmd_filter(const json& j) {
  const auto cfg = bf::RunConfig::from_json(j);
  const auto records = bf::read_manifest_file(need(j, "manifest"));
  const auto common = common_for(j, records);
  const std::string list_path = need(j, "list");
  std::vector<bf::UtteranceFilter> out;
  if (is_jsonl(list_path)) {
    out = bf::filter_stage(records, bf::lists_by_id(load_lists(list_path)), nullptr, common,
                           cfg.filter, cfg.threads);
  } else {
    const auto list = bf::read_word_list_file(list_path, bf::WordListSource::kPerUtterance);
    const bf::MatchIndex index(list.entries());
    out = bf::filter_stage(records, {}, &index, common, cfg.filter, cfg.threads);
  }
  bf::write_text_file(out_path(j, "filtered.jsonl"), bf::filters_to_jsonl(out));
  return 0;
}

int cmd_prompt(const json& j) {
  const auto cfg = bf::RunConfig::from_json(j);
  const auto filtered = load_filters(need(j, "filtered"));
  std::map<std::string, std::vector<std::string>> targets;
  std::optional<bf::WordList> pool;
  if (cfg.condition == bf::PromptCondition::kAntiContext) {
    for (const auto& l : load_lists(need(j, "lists"))) targets[l.id] = l.list.targets();
    pool = bf::read_word_list_file(need(j, "full_list"), bf::WordListSource::kFullRare);
  }
  const auto prompts = bf::prompt_stage(filtered, cfg.condition, cfg.prompt_cap, targets,
                                        pool ? &*pool : nullptr, cfg.seed);
  bf::write_text_file(out_path(j, "prompts.jsonl"), bf::prompts_to_jsonl(prompts));
  return 0;
}

int cmd_correct(const json& j) {
  auto cfg = bf::RunConfig::from_json(j);
  const auto records = bf::read_manifest_file(need(j, "manifest"));
  auto in = open_in(need(j, "prompts"));
  const auto prompts = bf::prompts_from_jsonl(in);
  const auto common = common_for(j, records);
  cfg.correct.threads = cfg.threads;
  if (cfg.correct.kind == bf::CorrectorKind::kRemote) cfg.correct.endpoint.load_api_key_from_env();
  const auto corrections = bf::correct_stage(records, prompts, common, cfg.correct);
  std::size_t failures = 0;
  for (const auto& c : corrections) failures += !c.ok;
  if (failures) std::cerr << "warning: " << failures << " utterances left uncorrected\n";
  bf::write_text_file(out_path(j, "corrections.jsonl"), bf::corrections_to_jsonl(corrections));
  if (j.contains("out_manifest")) {
    bf::write_manifest_file(bf::apply_corrections(records, corrections),
                            j.at("out_manifest").get<std::string>());
  }
  return 0;
}

int cmd_score(const json& j) {
  const auto cfg = bf::RunConfig::from_json(j);
  const auto records = bf::read_manifest_file(need(j, "manifest"));
  const auto lists = j.contains("lists") ? load_lists(need(j, "lists"))
                                         : std::vector<bf::UtteranceList>{};
  std::optional<std::vector<bf::UtteranceFilter>> filtered;
  if (j.contains("filtered")) filtered = load_filters(need(j, "filtered"));
  const auto report = bf::score_stage(records, lists, filtered ? &*filtered : nullptr, cfg.score);
  bf::write_report_file(report, out_path(j, "report.json"));
  return 0;
}

int cmd_run(const json& j) {
  auto cfg = bf::RunConfig::from_json(j);
  if (cfg.out_dir.empty()) cfg.out_dir = ".";
  const auto result = bf::run_pipeline(cfg);
  if (result.correction_failures) {
    std::cerr << "warning: " << result.correction_failures << " utterances left uncorrected\n";
  }
  for (const auto& p : result.report_paths) std::cout << p << '\n';
  return 0;
}

int cmd_bench(const json& j) {
  const auto cfg = bf::RunConfig::from_json(j);
  auto records = bf::read_manifest_file(need(j, "manifest"));
  if (j.contains("utterances") && j.at("utterances").get<std::size_t>() < records.size()) {
    records.resize(j.at("utterances").get<std::size_t>());
  }
  const auto common = common_for(j, records);
  const auto list = bf::read_word_list_file(need(j, "list"), bf::WordListSource::kFullRare);
  const auto bench = bf::run_bench(records, list, common, cfg.filter, cfg.threads);
  const std::string text = bench.report.dump(2) + "\n";
  if (j.contains("out")) {
    bf::write_text_file(j.at("out").get<std::string>(), text);
  } else {
    std::cout << text;
  }
  if (bench.report.at("regression_alarm").get<bool>()) {
    std::cerr << "warning: indexed filter slower than linear scan\n";
  }
  return bench.identical ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-word biasing list filtering and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  Overlay ov;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");
  ov.option<std::uint64_t>(&app, "--seed", "seed", "top-level seed");
  ov.option<std::size_t>(&app, "--threads", "threads", "worker threads");
  ov.option<std::string>(&app, "--out-dir", "out_dir", "output directory");

  const auto common_opts = [&](CLI::App* s) {
    ov.option<std::string>(s, "--common", "common_list", "ranked common-word file");
    ov.option<std::string>(s, "--freq-table", "freq_table", "word frequency table");
    ov.option<int>(s, "--common-k", "common_k", "common set size");
  };
  const auto filter_opts = [&](CLI::App* s) {
    ov.option<std::size_t>(s, "--max-span", "max_span", "longest joined segment");
    ov.option<int>(s, "--distance-cap", "distance_cap", "drop matches above this distance");
    ov.option<std::size_t>(s, "--output-cap", "output_cap", "keep at most this many entries");
  };
  const auto noise_opts = [&](CLI::App* s) {
    ov.option<double>(s, "--p-rare", "noise/p_rare", "rare word corruption rate");
    ov.option<double>(s, "--p-common", "noise/p_common", "common word corruption rate");
    ov.option<int>(s, "--max-edits", "noise/max_edits", "character edits per corrupted word");
    ov.option<double>(s, "--p-delete", "noise/p_word_delete", "word deletion rate");
    ov.option<double>(s, "--p-insert", "noise/p_word_insert", "word insertion rate");
    ov.option<double>(s, "--p-split", "noise/p_split", "split rate for multi-edit words");
    ov.flag(s, "--no-split", "noise/split", "never split words", false);
    ov.flag(s, "--force", "force", "overwrite existing hypotheses");
  };
  const auto corrector_opts = [&](CLI::App* s) {
    ov.option<std::string>(s, "--corrector", "corrector", "mock or remote")
        ->check(CLI::IsMember({"mock", "remote"}));
    ov.option<int>(s, "--d-max", "d_max", "mock corrector distance bound");
    ov.option<std::string>(s, "--endpoint", "endpoint_url", "chat completions URL");
    ov.option<std::string>(s, "--model", "model_id", "remote model id");
    ov.option<double>(s, "--timeout", "timeout_s", "request timeout in seconds");
    ov.option<int>(s, "--retries", "max_retries", "retries per request");
    ov.option<std::size_t>(s, "--concurrency", "max_concurrency", "requests in flight");
  };
  const auto score_opts = [&](CLI::App* s) {
    ov.flag(s, "--keep-markers", "marker_policy", "score <sc> as a token", "keep");
    ov.flag(s, "--emit-ops", "emit_ops", "include per-utterance alignments");
  };
  const auto condition_opt = [&](CLI::App* s) {
    ov.option<std::string>(s, "--condition", "condition", "baseline, biasing or anti")
        ->check(CLI::IsMember({"baseline", "biasing", "anti"}));
  };

  std::map<CLI::App*, std::function<int(const json&)>> handlers;

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  ov.option<std::size_t>(synth, "--utterances", "utterances", "utterance count");
  ov.option<std::size_t>(synth, "--lexicon-size", "lexicon_size", "rare lexicon size");
  handlers[synth] = cmd_synth;

  auto* simulate = app.add_subcommand("simulate", "add first-pass hypotheses");
  ov.option<std::string>(simulate, "--manifest", "manifest", "input manifest");
  ov.option<std::string>(simulate, "--out", "out", "output manifest");
  common_opts(simulate);
  noise_opts(simulate);
  handlers[simulate] = [](const json& j) {
    json k = j;
    if (!k.contains("noise")) k["noise"] = json::object();
    return cmd_simulate(k);
  };

  auto* build = app.add_subcommand("build-lists", "per-utterance biasing lists");
  ov.option<std::string>(build, "--manifest", "manifest", "input manifest");
  ov.option<std::string>(build, "--full-list", "full_list", "full rare-word list");
  ov.option<std::size_t>(build, "--distractors", "distractors", "distractors per list");
  ov.option<std::size_t>(build, "--cap", "list_cap", "maximum list size");
  ov.flag(build, "--shuffle", "shuffle", "shuffle entries");
  ov.option<std::string>(build, "--freq-table", "freq_table", "word frequency table");
  ov.option<std::uint64_t>(build, "--freq-threshold", "freq_threshold",
                           "count words rarer than this as rare");
  ov.option<std::string>(build, "--out", "out", "output lists file");
  handlers[build] = cmd_build_lists;

  auto* filt = app.add_subcommand("filter", "filter biasing lists against hypotheses");
  ov.option<std::string>(filt, "--manifest", "manifest", "manifest with hypotheses");
  ov.option<std::string>(filt, "--list", "list", "lists.jsonl or a shared word list");
  ov.option<std::size_t>(filt, "--top-n", "top_n", "matches kept per segment");
  ov.option<std::string>(filt, "--out", "out", "output file");
  common_opts(filt);
  filter_opts(filt);
  handlers[filt] = cmd_filter;

  auto* prompt = app.add_subcommand("prompt", "build correction prompts");
  ov.option<std::string>(prompt, "--filtered", "filtered", "filter output");
  ov.option<std::size_t>(prompt, "--cap", "prompt_cap", "words per prompt");
  ov.option<std::string>(prompt, "--lists", "lists", "lists file (anti condition)");
  ov.option<std::string>(prompt, "--full-list", "full_list", "replacement pool (anti condition)");
  ov.option<std::string>(prompt, "--out", "out", "output file");
  condition_opt(prompt);
  handlers[prompt] = cmd_prompt;

  auto* correct = app.add_subcommand("correct", "second-pass correction");
  ov.option<std::string>(correct, "--manifest", "manifest", "manifest with hypotheses");
  ov.option<std::string>(correct, "--prompts", "prompts", "prompt file");
  ov.option<std::string>(correct, "--out", "out", "corrections file");
  ov.option<std::string>(correct, "--out-manifest", "out_manifest", "corrected manifest");
  common_opts(correct);
  corrector_opts(correct);
  handlers[correct] = cmd_correct;

  auto* score = app.add_subcommand("score", "WER and B-WER report");
  ov.option<std::string>(score, "--manifest", "manifest", "manifest with hypotheses");
  ov.option<std::string>(score, "--lists", "lists", "biasing lists");
  ov.option<std::string>(score, "--filtered", "filtered", "filter output, for coverage");
  ov.option<std::string>(score, "--out", "out", "report file");
  score_opts(score);
  handlers[score] = cmd_score;

  auto* run = app.add_subcommand("run", "full pipeline");
  ov.option<std::string>(run, "--manifest", "manifest", "input manifest");
  ov.option<std::string>(run, "--full-list", "full_list", "full rare-word list");
  ov.option<std::size_t>(run, "--distractors", "distractors", "distractors per list");
  ov.option<std::size_t>(run, "--cap", "list_cap", "maximum list size");
  ov.option<std::vector<std::size_t>>(run, "--top-n", "top_n", "one value or a sweep");
  ov.option<std::size_t>(run, "--prompt-cap", "prompt_cap", "words per prompt");
  ov.flag(run, "--simulate", "noise", "generate hypotheses first", json::object());
  common_opts(run);
  filter_opts(run);
  noise_opts(run);
  corrector_opts(run);
  score_opts(run);
  condition_opt(run);
  handlers[run] = cmd_run;

  auto* bench = app.add_subcommand("bench", "indexed vs linear filter latency");
  ov.option<std::string>(bench, "--manifest", "manifest", "manifest with hypotheses");
  ov.option<std::string>(bench, "--list", "list", "word list shared by all utterances");
  ov.option<std::size_t>(bench, "--top-n", "top_n", "matches kept per segment");
  ov.option<std::size_t>(bench, "--utterances", "utterances", "use the first N utterances");
  ov.option<std::string>(bench, "--out", "out", "report file (default stdout)");
  common_opts(bench);
  filter_opts(bench);
  handlers[bench] = cmd_bench;

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  try {
    json j = json::object();
    if (!config_path.empty()) {
      j = json::parse(bf::read_text_file(config_path));
      if (!j.is_object()) throw bf::ValidationError("config must be a JSON object");
    }
    // --simulate only switches noise on; it must not wipe configured rates.
    for (auto& f : ov.apply) {
      const json before = j.contains("noise") ? j.at("noise") : json();
      f(j);
      if (before.is_object() && j.at("noise").empty()) j["noise"] = before;
    }
    return handlers.at(chosen)(j);
  } catch (const bf::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: [" << chosen->get_name() << "] " << e.what() << '\n';
    return 1;
  }
}
