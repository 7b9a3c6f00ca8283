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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "factstep/config.hpp"
#include "factstep/error.hpp"
#include "factstep/fact_world.hpp"
#include "factstep/fixtures.hpp"
#include "factstep/harness.hpp"
#include "factstep/manifest.hpp"
#include "factstep/report.hpp"
#include "factstep/svg.hpp"
#include "factstep/text.hpp"

using namespace factstep;
using namespace factstep::harness;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::kInvalidArgument;
}

// Returns the same scripted completions for every request.
class ScriptSampler : public grpo::CompletionSampler {
 public:
  explicit ScriptSampler(std::vector<std::string> texts) : texts_(std::move(texts)) {}
  std::vector<grpo::Completion> sample(std::string_view, std::size_t n, double,
                                       std::uint64_t) override {
    std::vector<grpo::Completion> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({texts_[i % texts_.size()], 0.0});
    return out;
  }
  std::string identity() const override { return "script"; }

 private:
  std::vector<std::string> texts_;
};

// Probability 0.9 for steps mentioning "good", else 0.1.
class KeywordScorer : public factcheck::FactScorer {
 public:
  factcheck::FactProbability score(std::string_view, std::string_view step) override {
    return {step.find("good") != std::string_view::npos ? 0.9 : 0.1};
  }
  std::string identity() const override { return "keyword"; }
};

const std::string kAllGood = "<think>First, good one.\n\nNext, good two.</think> boxed{a}";
const std::string kHalf = "<think>First, good one.\n\nNext, bad two.</think> boxed{a}";
const std::string kNone = "<think>First, bad one.\n\nNext, bad two.</think> boxed{a}";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sfa") {
  CHECK(sfa({true, false, true, true}) == 0.75);
  CHECK(sfa({false, true, true, true}) == 0.75);
  CHECK(code_of([] { sfa({}); }) == Errc::kEmptyChain);
}

TEST_CASE("evaluate_chain") {
  KeywordScorer s;
  const auto e = evaluate_chain("q", kHalf, s, 0.5);
  REQUIRE(e.steps.size() == 2);
  CHECK(e.steps[0].factual);
  CHECK(!e.steps[1].factual);
  CHECK(e.sfa == 0.5);
  CHECK(e.final_answer == "a");
  CHECK(code_of([&] { evaluate_chain("q", "junk", s, 0.5); }) == Errc::kMalformedResponse);
}

TEST_CASE("population variance") {
  CHECK(population_variance({0.5, 0.5}) == 0.0);
  CHECK(population_variance({0.0, 1.0}) == 0.25);
  CHECK(population_variance({3.0}) == 0.0);
}

TEST_CASE("temperature sweep statistics") {
  KeywordScorer s;
  ScriptSampler g({kAllGood, kNone, "malformed", kHalf});
  SweepOptions o;
  o.temperatures = {0.3, 0.7};
  o.samples_per_temp = 4;
  const auto r = temperature_sweep(g, s, {"q1", "q2"}, o);
  REQUIRE(r.per_temperature.size() == 2);
  for (const auto& t : r.per_temperature) {
    CHECK(t.sample_count == 6);
    CHECK(t.malformed == 2);
    CHECK(t.accuracy == doctest::Approx(0.5));
    CHECK(t.variance == doctest::Approx(1.0 / 6.0));
  }
  CHECK(r.overall_accuracy == doctest::Approx(0.5));
  CHECK(r.cross_temperature_variance == doctest::Approx(0.0));

  o.samples_per_temp = 1;
  const auto one = temperature_sweep(g, s, {"q1"}, o);
  for (const auto& t : one.per_temperature) CHECK(t.variance == 0.0);
}

TEST_CASE("sweep is deterministic and parallel-safe") {
  const auto w = grpo::make_fact_world();
  grpo::ToyPolicy p{std::vector<double>(w.candidates.size(), 0.0), 1.0};
  grpo::ToyPolicySampler sampler(p, w.alphabet());
  grpo::StepTableScorer scorer(w);
  SweepOptions o;
  o.samples_per_temp = 8;
  const auto a = temperature_sweep(sampler, scorer, {w.question, w.question}, o);
  o.parallelism = 4;
  const auto b = temperature_sweep(sampler, scorer, {w.question, w.question}, o);
  CHECK(sweep_to_json(a, true) == sweep_to_json(b, true));
  const auto back = sweep_from_json(sweep_to_json(a));
  CHECK(back.overall_accuracy == a.overall_accuracy);
  CHECK(back.per_temperature.size() == a.per_temperature.size());
}

TEST_CASE("short sampler responses are rejected") {
  class Short : public grpo::CompletionSampler {
   public:
    std::vector<grpo::Completion> sample(std::string_view, std::size_t, double,
                                         std::uint64_t) override {
      return {};
    }
    std::string identity() const override { return "short"; }
  } g;
  KeywordScorer s;
  CHECK(code_of([&] { temperature_sweep(g, s, {"q"}, {}); }) == Errc::kGeneratorUnavailable);
}

TEST_CASE("record and replay reproduce a sweep") {
  const auto w = grpo::make_fact_world();
  grpo::ToyPolicy p{std::vector<double>(w.candidates.size(), 0.0), 1.0};
  grpo::ToyPolicySampler sampler(p, w.alphabet());
  grpo::StepTableScorer scorer(w);
  fixtures::RecordingSampler rec_g(sampler);
  fixtures::RecordingFactScorer rec_s(scorer);
  SweepOptions o;
  o.temperatures = {0.5, 1.0};
  const auto live = temperature_sweep(rec_g, rec_s, {w.question}, o);
  auto replay_g = fixtures::ReplaySampler::from_jsonl(rec_g.to_jsonl());
  auto replay_s = fixtures::ReplayFactScorer::from_jsonl(rec_s.to_jsonl());
  const auto again = temperature_sweep(replay_g, replay_s, {w.question}, o);
  CHECK(sweep_to_json(live, true) == sweep_to_json(again, true));
  CHECK(code_of([&] { replay_s.score("other", "step"); }) == Errc::kScorerUnavailable);
  CHECK(code_of([&] { replay_g.sample("other", 1, 0.5, 0); }) == Errc::kGeneratorUnavailable);
}

TEST_CASE("report table") {
  const std::vector<double> temps = default_temperatures();
  report::AccuracyRow base{"Base", {40.0, 41.5, 42.25, 43.0, 44.0, 45.0, 39.65}, 42.20};
  report::AccuracyRow enh{"Enhanced", {90.0, 91.0, 92.5, 93.0, 94.0, 92.0, 92.2}, 92.10};
  const auto imp = report::improvement_row(base, enh);
  CHECK(imp.overall == doctest::Approx(49.90));
  CHECK(imp.values[6] == doctest::Approx(52.55));
  const auto text = report::render_comparison(base, enh, temps);
  CHECK(text.find("+49.90") != std::string::npos);
  const auto golden = slurp(std::string(FACTSTEP_TEST_DATA) + "/report_table.txt");
  CHECK(text == golden);
  const auto t = report::table_from_json(report::table_to_json({temps, {base, enh}}));
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[1].overall == 92.10);
  CHECK(code_of([] { report::table_from_json("{}"); }) == Errc::kParseError);
}

TEST_CASE("svg rendering") {
  svg::Plot p{"t", "x", "y", {{"a", {0, 1, 2}, {1, 2, 3}, {0.5, 1, 2}, {1.5, 3, 4}}}};
  const auto s = svg::render(p);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("polygon") != std::string::npos);
  CHECK(s == svg::render(p));
  p.series[0].y.pop_back();
  CHECK(code_of([&] { svg::render(p); }) == Errc::kShapeMismatch);
}

TEST_CASE("config parsing") {
  const auto doc = config::parse(
      "# comment\n[reward]\ntau = 0.6\n[delimiters]\ndelimiters = [\"A,\", \"\\n\\n\"]\n"
      "[grpo]\nkl_placement = \"outside_sum\"\n[sweep]\ntemperatures = [0.3, 0.9]\n");
  const auto cfg = config::from_document(doc);
  CHECK(cfg.reward.tau == 0.6);
  CHECK(cfg.delimiters.delimiters == std::vector<std::string>{"A,", "\n\n"});
  CHECK(cfg.grpo.kl_placement == grpo::KlPlacement::kOutsideSum);
  CHECK(cfg.sweep.temperatures == std::vector<double>{0.3, 0.9});
  CHECK(code_of([] { config::from_document(config::parse("[reward]\nbogus = 1\n")); }) ==
        Errc::kParseError);
  CHECK(code_of([] { config::parse("[reward]\ntau = 0.5\ntau = 0.6\n"); }) == Errc::kParseError);
  CHECK(code_of([] { config::parse("not a line\n"); }) == Errc::kParseError);
  CHECK(code_of([] { config::from_document(config::parse("[reward]\ntau = 2\n")); }) ==
        Errc::kInvalidArgument);
  CHECK(!config::to_json(cfg).empty());
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.command = "grpo toy-train";
  m.argv = {"factstep", "grpo", "toy-train"};
  m.config_json = "{}";
  m.seed = 42;
  m.dataset_hashes["corpus"] = hex64(fnv1a64("abc"));
  m.outputs["a.jsonl"] = "00";
  m.started_at = utc_now();
  m.finished_at = m.started_at;
  const auto back = manifest_from_json(manifest_to_json(m));
  CHECK(back.command == m.command);
  CHECK(back.argv == m.argv);
  CHECK(back.seed == 42);
  CHECK(back.dataset_hashes == m.dataset_hashes);
  CHECK(m.started_at.size() == 20);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
}
