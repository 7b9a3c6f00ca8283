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

#include <cmath>
#include <numbers>
#include <vector>

#include "factstep/error.hpp"
#include "factstep/factcheck.hpp"
#include "factstep/toy_classifier.hpp"

using namespace factstep;
using namespace factstep::factcheck;

namespace {

struct Row {
  ConfusionCounts c;
  double acc, prec, rec, f1;
};

// Reference confusion counts with their expected scores.
const std::vector<Row> kRows{
    {{103, 23, 28, 846}, 94.90, 81.75, 78.63, 0.80},
    {{116, 13, 15, 856}, 97.20, 89.92, 88.55, 0.89},
    {{92, 28, 40, 848}, 93.25, 76.67, 69.70, 0.73},
    {{104, 22, 28, 854}, 95.04, 82.54, 78.79, 0.81},
    {{116, 20, 15, 849}, 96.50, 85.29, 88.55, 0.87},
};

}  // namespace

TEST_CASE("classification metrics reproduce the reference rows") {
  for (const auto& r : kRows) {
    const auto m = classification_metrics(r.c);
    // Independent arithmetic oracle.
    const double tp = r.c.tp, fp = r.c.fp, fn = r.c.fn, tn = r.c.tn;
    const double p = tp / (tp + fp), q = tp / (tp + fn);
    CHECK(m.accuracy == doctest::Approx((tp + tn) / (tp + fp + fn + tn)).epsilon(1e-15));
    CHECK(m.f1 == doctest::Approx(2 * p * q / (p + q)).epsilon(1e-15));
    CHECK(std::abs(100 * m.accuracy - r.acc) <= 0.01);
    CHECK(std::abs(100 * m.precision - r.prec) <= 0.01);
    CHECK(std::abs(100 * m.recall - r.rec) <= 0.01);
    CHECK(std::round(m.f1 * 100) / 100 == doctest::Approx(r.f1));
  }
}

TEST_CASE("metrics edge cases") {
  CHECK_THROWS_AS(classification_metrics({}), Error);
  const auto m = classification_metrics({0, 0, 0, 5});
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision_undefined);
  CHECK(m.recall_undefined);
  CHECK(m.f1_undefined);
}

TEST_CASE("tally with both positive classes") {
  const std::vector<bool> labels{true, false, false, true};
  const std::vector<Verdict> v{Verdict::kTrue, Verdict::kFalse, Verdict::kTrue, Verdict::kInvalid};
  const auto e = tally(labels, v);
  CHECK(e.tp == 1);
  CHECK(e.fn == 1);
  CHECK(e.tn == 1);
  CHECK(e.fp == 1);
  const auto f = tally(labels, v, PositiveClass::kFactual);
  CHECK(f.tp == 1);
  CHECK(f.fn == 1);
  CHECK(f.fp == 1);
  CHECK(f.tn == 1);
  CHECK_THROWS_AS(tally({true}, {}), Error);
}

TEST_CASE("sft_loss values") {
  CHECK(sft_loss({{1.0, 1.0, 1.0}}) == 0.0);
  CHECK(std::abs(sft_loss({{0.25, 0.25}}) - 2 * std::log(4.0)) <= 1e-12);
  CHECK(sft_loss({{0.5}, {1.0}}) == doctest::Approx(std::numbers::ln2 / 2));
  CHECK_THROWS_AS(sft_loss({{0.0}}), Error);
  CHECK_THROWS_AS(sft_loss({{1.5}}), Error);
}

TEST_CASE("verdict parsing is strict") {
  CHECK(parse_verdict("<fact>True</fact>").verdict == Verdict::kTrue);
  CHECK(parse_verdict("  <fact>False</fact>\n").verdict == Verdict::kFalse);
  CHECK(parse_verdict("<fact>true</fact>").verdict == Verdict::kInvalid);
  CHECK(parse_verdict("True").verdict == Verdict::kInvalid);
  CHECK(format_verdict(Verdict::kTrue) == kTrueLabel);
  CHECK(verdict_from_probability(0.7, 0.5).verdict == Verdict::kTrue);
}

TEST_CASE("probability from continuations") {
  CHECK(probability_from_continuations(0.3, 0.1).value == doctest::Approx(0.75));
  const auto d = probability_from_continuations(0.0, 0.0);
  CHECK(d.value == 0.5);
  CHECK(d.degenerate);
}

TEST_CASE("format_input and SFT export") {
  CHECK(format_input("S", "Q", "C") == "S\nQ\nC");
  CHECK_THROWS_AS(format_input("S", "", "C"), Error);
  augment::CounterfactualRecord r;
  r.question = "Q";
  r.original_cot = "C";
  r.label = false;
  const auto ex = make_sft_example(r, "S");
  CHECK(ex.target == kFalseLabel);
  CHECK(ex.input == "S\nQ\nC");
}

TEST_CASE("toy classifier trains") {
  const auto train = make_toy_verdict_data(50, 0, 1);
  const auto held = make_toy_verdict_data(100, 1, 2);
  CharVerdictModel model;
  const auto r = train_toy_classifier(model, train, held, 60);
  REQUIRE(r.losses.size() == 61);
  CHECK(r.losses.back() < r.losses.front());
  for (const auto& x : model.token_probs(train[0].example.input, train[0].example.target)) {
    CHECK(x > 0.0);
    CHECK(x <= 1.0);
  }
}
