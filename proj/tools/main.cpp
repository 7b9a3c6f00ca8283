/* Copyright 2026 The factstep Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "factstep/augment.hpp"
#include "factstep/config.hpp"
#include "factstep/error.hpp"
#include "factstep/fact_world.hpp"
#include "factstep/factcheck.hpp"
#include "factstep/fixtures.hpp"
#include "factstep/harness.hpp"
#include "factstep/http_clients.hpp"
#include "factstep/manifest.hpp"
#include "factstep/report.hpp"
#include "factstep/rewards.hpp"
#include "factstep/svg.hpp"
#include "factstep/text.hpp"
#include "factstep/toy_classifier.hpp"
#include "factstep/trace_io.hpp"
#include "factstep/trajectory.hpp"

namespace fs = std::filesystem;
using namespace factstep;

namespace {

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out = "out";
};

// Shared state for one CLI invocation: settings, output directory and the
// manifest that records everything written.
class Run {
 public:
  Run(const Globals& g, std::string command, std::vector<std::string> argv)
      : out_(g.out) {
    cfg = g.config_path.empty() ? config::AppConfig{} : config::load(g.config_path);
    manifest_.command = std::move(command);
    manifest_.argv = std::move(argv);
    manifest_.seed = g.seed;
    manifest_.started_at = utc_now();
    manifest_.artifact_versions["factstep"] = std::string(kVersion);
    if (!g.config_path.empty()) hash_input("config", read_text_file(g.config_path));
  }

  config::AppConfig cfg;

  std::uint64_t seed() const { return manifest_.seed; }

  std::string read_input(const std::string& name, const fs::path& path) {
    std::string text = read_text_file(path);
    hash_input(name, text);
    return text;
  }
  void hash_input(const std::string& name, std::string_view text) {
    manifest_.dataset_hashes[name] = hex64(fnv1a64(text));
  }
  void endpoint(const std::string& role, const std::string& identity) {
    manifest_.endpoint_identities[role] = identity;
  }

  void write(const std::string& name, std::string_view text) {
    write_text_file(out_ / name, text);
    manifest_.outputs[name] = hex64(fnv1a64(text));
    std::printf("wrote %s\n", (out_ / name).string().c_str());
  }

  void finish() {
    manifest_.config_json = config::to_json(cfg);
    manifest_.finished_at = utc_now();
    write_manifest(out_ / "manifest.json", manifest_);
  }

 private:
  fs::path out_;
  RunManifest manifest_;
};

std::vector<std::string> args_of(int argc, char** argv) {
  return std::vector<std::string>(argv, argv + argc);
}

// Scorer selection: replay fixture, else HTTP endpoint. Optionally records.
struct ScorerChoice {
  std::unique_ptr<factcheck::FactScorer> base;
  std::unique_ptr<fixtures::RecordingFactScorer> recorder;
  factcheck::FactScorer& get() { return recorder ? *recorder : *base; }
};

ScorerChoice choose_scorer(Run& run, const std::string& fixture, bool record) {
  ScorerChoice c;
  if (!fixture.empty()) {
    run.read_input("scorer_fixture", fixture);
    c.base = std::make_unique<fixtures::ReplayFactScorer>(fixtures::ReplayFactScorer::load(fixture));
  } else if (!run.cfg.endpoints.scorer.empty()) {
    c.base = std::make_unique<http::HttpFactScorer>(run.cfg.endpoints.scorer);
  } else {
    fail(Errc::kScorerUnavailable,
         "no fact scorer: set endpoints.scorer in the config or pass --scorer-fixture");
  }
  run.endpoint("scorer", c.base->identity());
  if (record) c.recorder = std::make_unique<fixtures::RecordingFactScorer>(*c.base);
  return c;
}

std::unique_ptr<Embedder> choose_embedder(Run& run) {
  std::unique_ptr<Embedder> e;
  if (!run.cfg.endpoints.embedder.empty()) {
    e = std::make_unique<http::HttpEmbedder>(run.cfg.endpoints.embedder);
  } else {
    e = std::make_unique<HashingEmbedder>();
  }
  run.endpoint("embedder", e->identity());
  return e;
}

svg::Series series_of(const std::string& name, const std::vector<double>& y) {
  svg::Series s;
  s.name = name;
  for (std::size_t i = 0; i < y.size(); ++i) s.x.push_back(static_cast<double>(i));
  s.y = y;
  return s;
}

svg::Series band_series(const std::string& name, const std::vector<trajectory::Band>& b) {
  svg::Series s;
  s.name = name;
  for (std::size_t i = 0; i < b.size(); ++i) {
    s.x.push_back(static_cast<double>(i));
    s.y.push_back(b[i].mean);
    s.lo.push_back(b[i].min);
    s.hi.push_back(b[i].max);
  }
  return s;
}

// --- augment build ---------------------------------------------------------

struct AugmentArgs {
  std::string input;
  std::string gazetteer;
  std::size_t synthetic = 0;
  bool sft = false;
};

void cmd_augment_build(Run& run, const AugmentArgs& a) {
  std::vector<augment::SourceSample> samples;
  std::unique_ptr<augment::EntityProvider> provider;
  if (a.synthetic > 0) {
    auto corpus = augment::make_synthetic_corpus(a.synthetic, run.seed());
    samples = std::move(corpus.samples);
    provider = std::make_unique<augment::GazetteerProvider>(std::move(corpus.gazetteer));
  } else {
    if (a.input.empty()) fail(Errc::kInvalidArgument, "pass --input or --synthetic");
    samples = augment::read_source_jsonl(run.read_input("input", a.input));
  }
  if (!provider) {
    if (!a.gazetteer.empty()) {
      run.read_input("gazetteer", a.gazetteer);
      provider = std::make_unique<augment::GazetteerProvider>(augment::GazetteerProvider::load(a.gazetteer));
    } else if (!run.cfg.endpoints.ner.empty()) {
      provider = std::make_unique<http::HttpEntityProvider>(run.cfg.endpoints.ner);
    } else {
      fail(Errc::kProviderUnavailable, "pass --gazetteer or set endpoints.ner");
    }
  }
  run.endpoint("ner", provider->identity());

  auto options = run.cfg.dataset;
  options.seed = run.seed();
  const auto splits = augment::build_dataset(samples, *provider, options);
  run.write("train.jsonl", augment::records_to_jsonl(splits.train));
  run.write("validation.jsonl", augment::records_to_jsonl(splits.validation));
  run.write("test.jsonl", augment::records_to_jsonl(splits.test));
  std::string skipped;
  for (const auto& s : splits.skipped) {
    skipped += nlohmann::ordered_json{{"source_index", s.source_index}, {"reason", s.reason}}.dump() + "\n";
  }
  run.write("skipped.jsonl", skipped);
  if (a.sft) run.write("sft_train.jsonl", factcheck::export_training_jsonl(splits.train));
  std::printf("train %zu  validation %zu  test %zu  skipped %zu\n", splits.train.size(),
              splits.validation.size(), splits.test.size(), splits.skipped.size());
}

// --- factcheck ---------------------------------------------------------------

struct TrainToyArgs {
  std::size_t steps = 200;
  std::size_t train = 50;
  std::size_t heldout = 200;
  int heldout_phrasing = 1;
};

void cmd_train_toy(Run& run, const TrainToyArgs& a) {
  const auto train = factcheck::make_toy_verdict_data(a.train, 0, mix_seed(run.seed(), 1));
  const auto held = factcheck::make_toy_verdict_data(a.heldout, a.heldout_phrasing, mix_seed(run.seed(), 2));
  factcheck::CharVerdictModel model;
  const auto r = factcheck::train_toy_classifier(model, train, held, a.steps);
  std::string losses;
  for (std::size_t i = 0; i < r.losses.size(); ++i) {
    losses += nlohmann::ordered_json{{"step", i}, {"loss", r.losses[i]}}.dump() + "\n";
  }
  run.write("losses.jsonl", losses);
  const auto m = factcheck::classification_metrics(r.heldout_confusion);
  nlohmann::ordered_json j{{"initial_loss", r.losses.front()},
                           {"final_loss", r.losses.back()},
                           {"heldout_accuracy", r.heldout_accuracy},
                           {"tp", r.heldout_confusion.tp},
                           {"fp", r.heldout_confusion.fp},
                           {"fn", r.heldout_confusion.fn},
                           {"tn", r.heldout_confusion.tn},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1}};
  run.write("metrics.json", j.dump(2) + "\n");
  svg::Plot p{"SFT loss", "step", "loss", {series_of("train loss", r.losses)}};
  run.write("loss.svg", svg::render(p));
  std::printf("loss %.4f -> %.4f  held-out accuracy %.2f%%\n", r.losses.front(), r.losses.back(),
              100.0 * r.heldout_accuracy);
}

struct MetricsArgs {
  std::optional<std::uint64_t> tp, fp, fn, tn;
  std::string predictions;
  bool factual_positive = false;
};

void cmd_metrics(Run& run, const MetricsArgs& a) {
  factcheck::ConfusionCounts c;
  const auto positive = a.factual_positive ? factcheck::PositiveClass::kFactual
                                           : factcheck::PositiveClass::kFactualError;
  if (!a.predictions.empty()) {
    std::vector<bool> labels;
    std::vector<factcheck::Verdict> verdicts;
    for (const auto& line : split_lines(run.read_input("predictions", a.predictions))) {
      if (trim(line).empty()) continue;
      const auto j = nlohmann::json::parse(line);
      labels.push_back(j.at("label").get<bool>());
      verdicts.push_back(factcheck::parse_verdict(j.at("output").get<std::string>()).verdict);
    }
    c = factcheck::tally(labels, verdicts, positive);
  } else {
    if (!a.tp || !a.fp || !a.fn || !a.tn) {
      fail(Errc::kInvalidArgument, "pass --predictions or all of --tp --fp --fn --tn");
    }
    c = {*a.tp, *a.fp, *a.fn, *a.tn};
  }
  const auto m = factcheck::classification_metrics(c);
  nlohmann::ordered_json j{{"tp", c.tp},
                           {"fp", c.fp},
                           {"fn", c.fn},
                           {"tn", c.tn},
                           {"accuracy", m.accuracy},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1},
                           {"precision_undefined", m.precision_undefined},
                           {"recall_undefined", m.recall_undefined}};
  run.write("metrics.json", j.dump(2) + "\n");
  std::printf("accuracy %.2f  precision %.2f  recall %.2f  F1 %.2f\n", 100.0 * m.accuracy,
              100.0 * m.precision, 100.0 * m.recall, m.f1);
}

// --- reward score ---------------------------------------------------------------

struct RewardArgs {
  std::string input;
  std::string scorer_fixture;
  bool record = false;
};

void cmd_reward_score(Run& run, const RewardArgs& a) {
  auto scorer = choose_scorer(run, a.scorer_fixture, a.record);
  auto embedder = choose_embedder(run);
  std::string out;
  for (const auto& line : split_lines(run.read_input("input", a.input))) {
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto question = j.at("question").get<std::string>();
    const auto response = j.at("response").get<std::string>();
    const auto reference = j.at("reference").get<std::string>();
    const rewards::ScoreInputs in{question, response, reference};
    const auto b = rewards::score_response(in, scorer.get(), *embedder, run.cfg.reward,
                                           whitespace_tokenizer(), run.cfg.delimiters);
    out += rewards::breakdown_to_json(b) + "\n";
  }
  run.write("rewards.jsonl", out);
  if (scorer.recorder) run.write("scorer_fixture.jsonl", scorer.recorder->to_jsonl());
}

// --- grpo toy-train ----------------------------------------------------------------

struct GrpoArgs {
  std::size_t steps = 500;
  double temperature = 1.0;
};

void cmd_grpo_toy_train(Run& run, const GrpoArgs& a) {
  const auto world = grpo::make_fact_world();
  grpo::ToyPolicy policy{std::vector<double>(world.candidates.size(), 0.0), 1.0};
  grpo::ToyTrainOptions o;
  o.steps = a.steps;
  o.seed = run.seed();
  o.sampling_temperature = a.temperature;
  grpo::StepTableScorer scorer(world);
  auto embedder = choose_embedder(run);
  run.endpoint("scorer", scorer.identity());
  const auto trace = grpo::toy_train(world, policy, run.cfg.grpo, run.cfg.reward, o, scorer, *embedder);
  run.write("training.jsonl", grpo::training_trace_jsonl(trace));
  std::vector<double> sfa, reward;
  for (const auto& r : trace.rows) {
    sfa.push_back(r.sfa);
    reward.push_back(r.mean_reward);
  }
  run.write("sfa.svg", svg::render({"Policy SFA", "step", "expected SFA", {series_of("SFA", sfa)}}));
  run.write("reward.svg",
            svg::render({"Mean group reward", "step", "reward", {series_of("reward", reward)}}));
  nlohmann::ordered_json j{{"initial_sfa", trace.initial_sfa},
                           {"final_sfa", trace.final_sfa},
                           {"steps", a.steps},
                           {"candidates", world.candidates.size()}};
  run.write("summary.json", j.dump(2) + "\n");
  std::printf("policy SFA %.2f%% -> %.2f%%\n", 100.0 * trace.initial_sfa, 100.0 * trace.final_sfa);
}

// --- evaluate sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string questions;
  std::string scorer_fixture;
  std::string generator_fixture;
  bool record = false;
  bool toy = false;
  std::string label = "model";
};

void cmd_evaluate_sweep(Run& run, const SweepArgs& a) {
  harness::SweepOptions o;
  o.temperatures = run.cfg.sweep.temperatures;
  o.samples_per_temp = run.cfg.sweep.samples_per_temp;
  o.tau = run.cfg.sweep.tau;
  o.parallelism = run.cfg.sweep.parallelism;
  o.delims = run.cfg.delimiters;
  o.seed = run.seed();

  harness::SweepResult result;
  if (a.toy) {
    const auto world = grpo::make_fact_world();
    grpo::ToyPolicy policy{std::vector<double>(world.candidates.size(), 0.0), 1.0};
    grpo::ToyPolicySampler sampler(policy, world.alphabet());
    grpo::StepTableScorer scorer(world);
    run.endpoint("generator", sampler.identity());
    run.endpoint("scorer", scorer.identity());
    result = harness::temperature_sweep(sampler, scorer, {world.question}, o);
  } else {
    std::vector<std::string> questions;
    for (const auto& line : split_lines(run.read_input("questions", a.questions))) {
      if (!trim(line).empty()) questions.emplace_back(trim(line));
    }
    auto scorer = choose_scorer(run, a.scorer_fixture, a.record);
    std::unique_ptr<grpo::CompletionSampler> gen;
    if (!a.generator_fixture.empty()) {
      run.read_input("generator_fixture", a.generator_fixture);
      gen = std::make_unique<fixtures::ReplaySampler>(fixtures::ReplaySampler::load(a.generator_fixture));
    } else if (!run.cfg.endpoints.generator.empty()) {
      gen = std::make_unique<http::HttpCompletionSampler>(run.cfg.endpoints.generator);
    } else {
      fail(Errc::kGeneratorUnavailable, "set endpoints.generator or pass --generator-fixture");
    }
    run.endpoint("generator", gen->identity());
    std::unique_ptr<fixtures::RecordingSampler> rec;
    if (a.record) rec = std::make_unique<fixtures::RecordingSampler>(*gen);
    grpo::CompletionSampler& sampler = rec ? *rec : *gen;
    result = harness::temperature_sweep(sampler, scorer.get(), questions, o);
    if (rec) run.write("generator_fixture.jsonl", rec->to_jsonl());
    if (scorer.recorder) run.write("scorer_fixture.jsonl", scorer.recorder->to_jsonl());
  }
  run.write("sweep.json", harness::sweep_to_json(result) + "\n");
  std::string samples;
  for (const auto& s : result.samples) {
    samples += nlohmann::ordered_json{{"question_index", s.question_index},
                                      {"temperature", s.temperature},
                                      {"sample_index", s.sample_index},
                                      {"malformed", s.malformed},
                                      {"sfa", s.sfa}}
                   .dump() +
               "\n";
  }
  run.write("samples.jsonl", samples);
  const std::string table = report::render_sweep(result, a.label);
  run.write("table.txt", table);
  std::vector<double> acc;
  svg::Series s;
  s.name = a.label;
  for (const auto& t : result.per_temperature) {
    s.x.push_back(t.temperature);
    s.y.push_back(100.0 * t.accuracy);
  }
  run.write("sweep.svg", svg::render({"SFA by temperature", "temperature", "SFA (%)", {s}}));
  std::fputs(table.c_str(), stdout);
}

// --- trace ---------------------------------------------------------------------------

std::vector<trajectory::TrajectoryReport> analyze_files(Run& run, const std::vector<std::string>& files,
                                                        bool exclude_final, const std::string& role) {
  trajectory::AnalyzeOptions o{exclude_final};
  std::vector<trajectory::TrajectoryReport> reports;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto bytes = run.read_input(role + ":" + fs::path(files[i]).filename().string(), files[i]);
    reports.push_back(trajectory::analyze_trace(trajectory::decode_trace(bytes), o));
  }
  return reports;
}

void write_pca_plots(Run& run, const trajectory::TrajectoryReport& r, const std::string& prefix) {
  for (std::size_t l = 0; l < r.layer_count; ++l) {
    svg::Series s;
    s.name = fmt::format("layer {} ({:.1f}% / {:.1f}%)", l, 100.0 * r.pca[l].ratios[0],
                         100.0 * r.pca[l].ratios[1]);
    for (const auto& p : r.pca[l].points) {
      s.x.push_back(p[0]);
      s.y.push_back(p[1]);
    }
    run.write(fmt::format("{}pca_layer{}.svg", prefix, l),
              svg::render({"PCA of step activations", "PC1", "PC2", {s}}));
  }
}

void cmd_trace_analyze(Run& run, const std::vector<std::string>& files, bool exclude_final) {
  const auto reports = analyze_files(run, files, exclude_final, "trace");
  std::string all;
  for (const auto& r : reports) all += trajectory::report_to_jsonl(r);
  run.write("report.jsonl", all);
  const auto summary = trajectory::summarize(reports);
  run.write("summary.jsonl", trajectory::summary_to_jsonl(summary));
  run.write("distance.svg", svg::render({"Mean step distance", "layer", "distance",
                                         {band_series(summary.model_tag, summary.mean_distance)}}));
  run.write("similarity.svg",
            svg::render({"Adjacent step similarity", "layer", "cosine",
                         {band_series(summary.model_tag, summary.adjacent_similarity)}}));
  write_pca_plots(run, reports.front(), "");
}

struct CompareArgs {
  std::vector<std::string> base;
  std::vector<std::string> enhanced;
  std::vector<std::string> readouts;
  bool exclude_final = false;
};

trajectory::ReadoutRow parse_readout(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto comma = spec.find(',', start);
    parts.push_back(spec.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 4) fail(Errc::kInvalidArgument, "--readout expects label,metric,base,enhanced");
  return {parts[0], parts[1], std::stod(parts[2]), std::stod(parts[3])};
}

void cmd_trace_compare(Run& run, const CompareArgs& a) {
  std::string text;
  if (!a.base.empty() || !a.enhanced.empty()) {
    const auto base = trajectory::summarize(analyze_files(run, a.base, a.exclude_final, "base"));
    const auto enh = trajectory::summarize(analyze_files(run, a.enhanced, a.exclude_final, "enhanced"));
    const auto cmp = trajectory::compare_summaries(base, enh);
    run.write("comparison.jsonl", trajectory::comparison_to_jsonl(cmp));
    text += trajectory::render_comparison_table(cmp);
    run.write("distance.svg",
              svg::render({"Mean step distance", "layer", "distance",
                           {band_series(base.model_tag, base.mean_distance),
                            band_series(enh.model_tag, enh.mean_distance)}}));
    run.write("angle.svg", svg::render({"Mean angular deviation", "layer", "radians",
                                        {band_series(base.model_tag, base.mean_angle),
                                         band_series(enh.model_tag, enh.mean_angle)}}));
    run.write("similarity.svg",
              svg::render({"Adjacent step similarity", "layer", "cosine",
                           {band_series(base.model_tag, base.adjacent_similarity),
                            band_series(enh.model_tag, enh.adjacent_similarity)}}));
  }
  for (const auto& r : a.readouts) text += trajectory::render_readout_row(parse_readout(r));
  if (text.empty()) fail(Errc::kInvalidArgument, "nothing to compare");
  run.write("comparison.txt", text);
  std::fputs(text.c_str(), stdout);
}

struct SynthArgs {
  trajectory::ToyTraceOptions options;
  std::size_t count = 1;
};

void cmd_trace_synth(Run& run, SynthArgs a) {
  for (std::size_t i = 0; i < a.count; ++i) {
    a.options.prompt_id = fmt::format("p{}", i);
    const auto tr = trajectory::make_toy_trace(a.options, mix_seed(run.seed(), i));
    run.write(fmt::format("{}_{}.rltrace", a.options.model_tag, i), trajectory::encode_trace(tr));
  }
}

// --- report ------------------------------------------------------------------------------

struct ReportArgs {
  std::string base;
  std::string enhanced;
  std::string scores;
  std::string base_label = "base";
  std::string enhanced_label = "enhanced";
};

void cmd_report(Run& run, const ReportArgs& a) {
  std::string table;
  if (!a.scores.empty()) {
    auto t = report::table_from_json(run.read_input("scores", a.scores));
    if (t.rows.size() == 2) t.rows.push_back(report::improvement_row(t.rows[0], t.rows[1]));
    table = report::render_table(t);
  } else {
    if (a.base.empty() || a.enhanced.empty()) {
      fail(Errc::kInvalidArgument, "pass --scores or both --base and --enhanced");
    }
    const auto base = harness::sweep_from_json(run.read_input("base", a.base));
    const auto enh = harness::sweep_from_json(run.read_input("enhanced", a.enhanced));
    if (base.temperatures != enh.temperatures) {
      fail(Errc::kShapeMismatch, "sweeps use different temperature sets");
    }
    table = report::render_comparison(report::row_from_sweep(base, a.base_label),
                                      report::row_from_sweep(enh, a.enhanced_label), base.temperatures);
  }
  run.write("table.txt", table);
  std::fputs(table.c_str(), stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Step-level factuality toolkit for reasoning chains"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Settings file (TOML-style key = value)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output directory");

  std::function<void(Run&)> action;
  std::string command;
  auto bind = [&](CLI::App* sub, std::string name, std::function<void(Run&)> fn) {
    sub->callback([&, name, fn] {
      command = name;
      action = fn;
    });
  };

  auto* augment_cmd = app.add_subcommand("augment", "Counterfactual dataset construction");
  augment_cmd->require_subcommand(1);
  AugmentArgs aug;
  auto* aug_build = augment_cmd->add_subcommand("build", "Build train/validation/test splits");
  aug_build->add_option("--input", aug.input, "Source JSONL with {question, cot}");
  aug_build->add_option("--gazetteer", aug.gazetteer, "Gazetteer TSV (surface<TAB>TYPE)");
  aug_build->add_option("--synthetic", aug.synthetic, "Use a synthetic corpus of this size");
  aug_build->add_flag("--sft", aug.sft, "Also export rendered SFT pairs for the training split");
  bind(aug_build, "augment build", [&](Run& r) { cmd_augment_build(r, aug); });

  auto* fc_cmd = app.add_subcommand("factcheck", "Fact-classifier objective and metrics");
  fc_cmd->require_subcommand(1);
  TrainToyArgs toy;
  auto* fc_train = fc_cmd->add_subcommand("train-toy", "Train the built-in toy classifier");
  fc_train->add_option("--steps", toy.steps);
  fc_train->add_option("--train", toy.train, "Training examples");
  fc_train->add_option("--heldout", toy.heldout, "Held-out examples");
  fc_train->add_option("--heldout-phrasing", toy.heldout_phrasing, "0 or 1");
  bind(fc_train, "factcheck train-toy", [&](Run& r) { cmd_train_toy(r, toy); });
  MetricsArgs met;
  auto* fc_metrics = fc_cmd->add_subcommand("metrics", "Accuracy, precision, recall, F1");
  fc_metrics->add_option("--tp", met.tp);
  fc_metrics->add_option("--fp", met.fp);
  fc_metrics->add_option("--fn", met.fn);
  fc_metrics->add_option("--tn", met.tn);
  fc_metrics->add_option("--predictions", met.predictions, "JSONL with {label, output}");
  fc_metrics->add_flag("--factual-positive", met.factual_positive,
                       "Treat factual records as the positive class");
  bind(fc_metrics, "factcheck metrics", [&](Run& r) { cmd_metrics(r, met); });

  auto* reward_cmd = app.add_subcommand("reward", "Reward computation");
  reward_cmd->require_subcommand(1);
  RewardArgs rw;
  auto* rw_score = reward_cmd->add_subcommand("score", "Score responses");
  rw_score->add_option("--input", rw.input, "JSONL with {question, response, reference}")->required();
  rw_score->add_option("--scorer-fixture", rw.scorer_fixture, "Replay recorded scores");
  rw_score->add_flag("--record", rw.record, "Record scorer calls as a fixture");
  bind(rw_score, "reward score", [&](Run& r) { cmd_reward_score(r, rw); });

  auto* grpo_cmd = app.add_subcommand("grpo", "Group-relative policy optimization");
  grpo_cmd->require_subcommand(1);
  GrpoArgs gr;
  auto* grpo_toy = grpo_cmd->add_subcommand("toy-train", "Train a softmax policy on the fact world");
  grpo_toy->add_option("--steps", gr.steps);
  grpo_toy->add_option("--temperature", gr.temperature, "Sampling temperature");
  bind(grpo_toy, "grpo toy-train", [&](Run& r) { cmd_grpo_toy_train(r, gr); });

  auto* eval_cmd = app.add_subcommand("evaluate", "Step factuality evaluation");
  eval_cmd->require_subcommand(1);
  SweepArgs sw;
  auto* eval_sweep = eval_cmd->add_subcommand("sweep", "SFA across sampling temperatures");
  eval_sweep->add_option("--questions", sw.questions, "One question per line");
  eval_sweep->add_option("--scorer-fixture", sw.scorer_fixture);
  eval_sweep->add_option("--generator-fixture", sw.generator_fixture);
  eval_sweep->add_flag("--record", sw.record, "Record endpoint calls as fixtures");
  eval_sweep->add_flag("--toy", sw.toy, "Use the built-in fact world instead of endpoints");
  eval_sweep->add_option("--label", sw.label, "Row label in the table");
  bind(eval_sweep, "evaluate sweep", [&](Run& r) { cmd_evaluate_sweep(r, sw); });

  auto* trace_cmd = app.add_subcommand("trace", "Activation trajectory analysis");
  trace_cmd->require_subcommand(1);
  std::vector<std::string> analyze_files_arg;
  bool analyze_exclude = false;
  auto* tr_analyze = trace_cmd->add_subcommand("analyze", "Metrics for one model's traces");
  tr_analyze->add_option("files", analyze_files_arg, "RLTRACE1 files")->required();
  tr_analyze->add_flag("--exclude-final-step", analyze_exclude);
  bind(tr_analyze, "trace analyze",
       [&](Run& r) { cmd_trace_analyze(r, analyze_files_arg, analyze_exclude); });
  CompareArgs cmp;
  auto* tr_compare = trace_cmd->add_subcommand("compare", "Per-layer deltas between two models");
  tr_compare->add_option("--base", cmp.base, "Base model traces");
  tr_compare->add_option("--enhanced", cmp.enhanced, "Enhanced model traces");
  tr_compare->add_option("--readout", cmp.readouts, "label,metric,base,enhanced");
  tr_compare->add_flag("--exclude-final-step", cmp.exclude_final);
  bind(tr_compare, "trace compare", [&](Run& r) { cmd_trace_compare(r, cmp); });
  SynthArgs syn;
  auto* tr_synth = trace_cmd->add_subcommand("synth", "Write random-walk toy traces");
  tr_synth->add_option("--layers", syn.options.layers);
  tr_synth->add_option("--steps", syn.options.steps);
  tr_synth->add_option("--tokens-per-step", syn.options.tokens_per_step);
  tr_synth->add_option("--hidden", syn.options.hidden_dim);
  tr_synth->add_option("--step-scale", syn.options.step_scale);
  tr_synth->add_option("--noise", syn.options.token_noise);
  tr_synth->add_option("--tag", syn.options.model_tag);
  tr_synth->add_option("--count", syn.count);
  bind(tr_synth, "trace synth", [&](Run& r) { cmd_trace_synth(r, syn); });

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Render accuracy tables");
  report_cmd->add_option("--base", rep.base, "Base sweep.json");
  report_cmd->add_option("--enhanced", rep.enhanced, "Enhanced sweep.json");
  report_cmd->add_option("--scores", rep.scores, "Score file with labelled rows");
  report_cmd->add_option("--base-label", rep.base_label);
  report_cmd->add_option("--enhanced-label", rep.enhanced_label);
  bind(report_cmd, "report", [&](Run& r) { cmd_report(r, rep); });

  CLI11_PARSE(app, argc, argv);
  try {
    Run run(g, command, args_of(argc, argv));
    action(run);
    run.finish();
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(errc_name(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
