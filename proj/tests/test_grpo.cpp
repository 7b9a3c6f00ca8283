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

#include "factstep/error.hpp"
#include "factstep/fact_world.hpp"
#include "factstep/grpo.hpp"
#include "factstep/rng.hpp"

using namespace factstep;
using namespace factstep::grpo;

namespace {

// Group-objective oracle: direct transcription of the definition.
double objective_oracle(const CompletionGroup& g, const GrpoConfig& cfg) {
  double s = 0.0, kl = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = std::exp(g.logprob_new[i] - g.logprob_old[i]);
    const double c = std::min(std::max(r, 1 - cfg.epsilon), 1 + cfg.epsilon);
    s += std::min(r * g.advantages[i], c * g.advantages[i]);
    const double rho = std::exp(g.logprob_ref[i] - g.logprob_new[i]);
    kl += rho - std::log(rho) - 1;
  }
  return s / g.size() - cfg.beta_kl * kl / g.size();
}

}  // namespace

TEST_CASE("advantage normalization") {
  GrpoConfig cfg;
  CHECK(normalize_advantages({5, 5, 5}, cfg) == std::vector<double>{0, 0, 0});
  CHECK(normalize_advantages({7}, cfg) == std::vector<double>{0});
  const auto a = normalize_advantages({1, 2, 3}, cfg);
  CHECK(a[0] == doctest::Approx(-1.224744871));
  CHECK(a[1] == doctest::Approx(0.0));
  CHECK(a[2] == doctest::Approx(1.224744871));
  Rng rng(3);
  for (int n = 0; n < 200; ++n) {
    std::vector<double> r(2 + rng.uniform_index(8)), shifted, scaled;
    for (double& x : r) x = rng.normal();
    for (double x : r) {
      shifted.push_back(x + 3.0);
      scaled.push_back(x * 2.5);
    }
    const auto base = normalize_advantages(r, cfg);
    const auto s1 = normalize_advantages(shifted, cfg);
    const auto s2 = normalize_advantages(scaled, cfg);
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(s1[i] == doctest::Approx(base[i]).epsilon(1e-6));
      CHECK(s2[i] == doctest::Approx(base[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("clipped surrogate") {
  CHECK(clipped_surrogate(1.0, 0.5, 0.2) == 0.5);
  CHECK(clipped_surrogate(2.0, 1.0, 0.2) == 1.2);
  CHECK(clipped_surrogate(0.5, -1.0, 0.2) == -0.8);
  CHECK_THROWS_AS(clipped_surrogate(0.0, 1.0, 0.2), Error);
  Rng rng(4);
  for (int n = 0; n < 1000; ++n) {
    const double r = 0.01 + 3 * rng.uniform01(), a = rng.normal();
    CHECK(clipped_surrogate(r, a, 0.2) <= r * a);
  }
  CHECK(clipped_surrogate_dlogp(1.5, 1.0, 0.2) == 0.0);
  CHECK(clipped_surrogate_dlogp(0.5, -1.0, 0.2) == 0.0);
  CHECK(clipped_surrogate_dlogp(1.1, 1.0, 0.2) == doctest::Approx(1.1));
}

TEST_CASE("kl penalty") {
  CHECK(kl_penalty(0.3, 0.3) == 0.0);
  CHECK(kl_penalty(std::numbers::e, 1.0) == doctest::Approx(std::numbers::e - 2));
  CHECK(kl_penalty(0.5, 1.0) == doctest::Approx(0.5 + std::numbers::ln2 - 1));
  CHECK_THROWS_AS(kl_penalty(0.0, 1.0), Error);
  CHECK_THROWS_AS(kl_penalty(1.0, -1.0), Error);
}

TEST_CASE("group objective") {
  GrpoConfig cfg;
  CompletionGroup g;
  g.completions = {"a", "b"};
  g.rewards = {1, 0};
  g.advantages = {1, -1};
  g.logprob_old = {std::log(0.5), std::log(0.5)};
  g.logprob_new = {std::log(0.55), std::log(0.45)};
  g.logprob_ref = {std::log(0.5), std::log(0.5)};
  // Ratios 1.1 and 0.9, both inside the clip band.
  const double kl1 = 0.5 / 0.55 - std::log(0.5 / 0.55) - 1;
  const double kl2 = 0.5 / 0.45 - std::log(0.5 / 0.45) - 1;
  const double hand = (1.1 - 0.9) / 2 - 0.04 * (kl1 + kl2) / 2;
  CHECK(grpo_objective(g, cfg) == doctest::Approx(hand).epsilon(1e-12));
  g.logprob_new = g.logprob_old;
  g.advantages = {0, 0};
  CHECK(grpo_objective(g, cfg) == 0.0);
  g.logprob_ref.pop_back();
  CHECK_THROWS_AS(g.check(), Error);
}

TEST_CASE("group objective matches oracle and its gradient") {
  Rng rng(8);
  GrpoConfig cfg;
  for (int n = 0; n < 200; ++n) {
    CompletionGroup g;
    const std::size_t size = 1 + rng.uniform_index(6);
    for (std::size_t i = 0; i < size; ++i) {
      g.completions.push_back("c");
      g.rewards.push_back(rng.normal());
      g.logprob_old.push_back(-1 - rng.uniform01());
      g.logprob_new.push_back(g.logprob_old.back() + 0.6 * rng.normal());
      g.logprob_ref.push_back(-1 - rng.uniform01());
    }
    g.advantages = normalize_advantages(g.rewards, cfg);
    CHECK(grpo_objective(g, cfg) == doctest::Approx(objective_oracle(g, cfg)).epsilon(1e-12));
    const auto grad = grpo_objective_dlogp(g, cfg);
    for (std::size_t i = 0; i < size; ++i) {
      const double ratio = std::exp(g.logprob_new[i] - g.logprob_old[i]);
      if (std::abs(ratio - 0.8) < 1e-3 || std::abs(ratio - 1.2) < 1e-3) continue;
      const double h = 1e-6;
      auto up = g, dn = g;
      up.logprob_new[i] += h;
      dn.logprob_new[i] -= h;
      const double fd = (objective_oracle(up, cfg) - objective_oracle(dn, cfg)) / (2 * h);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
    }
  }
}

TEST_CASE("toy sampler") {
  ToyPolicy p{{0.0, 1.0, 2.0}, 1.0};
  ToyPolicySampler s(p, {"a", "b", "c"});
  CHECK(s.sample_indices(16, 1.0, 5) == s.sample_indices(16, 1.0, 5));
  CHECK(s.sample_indices(4, 0.0, 5) == std::vector<std::size_t>{2, 2, 2, 2});
  Rng rng(1);
  const auto g = sample_group(s, "q", 4, 1.0, rng);
  CHECK(g.size() == 4);
  CHECK(g.logprob_new == g.logprob_old);
  CHECK(g.logprob_ref == g.logprob_old);
}

TEST_CASE("fact world") {
  const auto w = make_fact_world();
  CHECK(w.candidates.size() == 36);
  for (std::size_t i = 0; i < w.candidates.size(); ++i) CHECK(w.index_of(w.candidates[i].raw) == i);
  std::vector<double> uniform(36, 1.0 / 36);
  CHECK(w.expected_sfa(uniform) > 0.0);
  CHECK_THROWS_AS(w.expected_sfa({1.0}), Error);
}

TEST_CASE("toy training") {
  const auto w = make_fact_world();
  GrpoConfig cfg;
  cfg.learning_rate = 0.0;
  ToyPolicy frozen{std::vector<double>(36, 0.0), 1.0};
  toy_train(w, frozen, cfg, {}, {.steps = 20});
  CHECK(frozen.logits == std::vector<double>(36, 0.0));

  GrpoConfig live;
  ToyPolicy p{std::vector<double>(36, 0.0), 1.0};
  const auto t = toy_train(w, p, live, {}, {.steps = 150, .seed = 3});
  CHECK(t.rows.size() == 150);
  CHECK(t.final_sfa > t.initial_sfa);
}

TEST_CASE("the best candidate gains probability on every seed") {
  const auto w = make_fact_world();
  std::size_t best = 0;
  for (std::size_t i = 0; i < w.candidates.size(); ++i) {
    const auto& c = w.candidates[i];
    if (c.well_formed && c.answer_correct && c.sfa() == 1.0) best = i;
  }
  REQUIRE(w.candidates[best].sfa() == 1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ToyPolicy p{std::vector<double>(36, 0.0), 1.0};
    const auto t = toy_train(w, p, GrpoConfig{}, {}, {.steps = 100, .seed = seed});
    CHECK(t.final_probs[best] > t.initial_probs[best]);
  }
}

TEST_CASE("training trace JSONL") {
  const auto w = make_fact_world();
  ToyPolicy p{std::vector<double>(36, 0.0), 1.0};
  const auto t = toy_train(w, p, GrpoConfig{}, {}, {.steps = 5});
  const auto text = training_trace_jsonl(t);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
