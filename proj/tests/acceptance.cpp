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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "factstep/augment.hpp"
#include "factstep/chains.hpp"
#include "factstep/error.hpp"
#include "factstep/fact_world.hpp"
#include "factstep/factcheck.hpp"
#include "factstep/grpo.hpp"
#include "factstep/rewards.hpp"
#include "factstep/rng.hpp"
#include "factstep/toy_classifier.hpp"
#include "factstep/trajectory.hpp"
#include "oracles.hpp"

using namespace factstep;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

Outcome table_metrics() {
  struct Row {
    factcheck::ConfusionCounts c;
    double acc, prec, rec, f1;
  };
  const std::vector<Row> rows{
      {{103, 23, 28, 846}, 94.90, 81.75, 78.63, 0.80},
      {{116, 13, 15, 856}, 97.20, 89.92, 88.55, 0.89},
      {{92, 28, 40, 848}, 93.25, 76.67, 69.70, 0.73},
      {{104, 22, 28, 854}, 95.04, 82.54, 78.79, 0.81},
      {{116, 20, 15, 849}, 96.50, 85.29, 88.55, 0.87},
  };
  Outcome o;
  double worst = 0.0;
  for (const auto& r : rows) {
    const auto m = factcheck::classification_metrics(r.c);
    for (auto [got, want] : {std::pair{100 * m.accuracy, r.acc}, {100 * m.precision, r.prec},
                             {100 * m.recall, r.rec}}) {
      worst = std::max(worst, std::abs(got - want));
      o.require(std::abs(got - want) <= 0.01, fmt::format("{:.4f} vs {:.2f}", got, want));
    }
    const double f1 = std::round(100 * m.f1) / 100;
    o.require(std::abs(f1 - r.f1) < 1e-9, fmt::format("F1 {:.2f} vs {:.2f}", f1, r.f1));
  }
  if (o.pass) o.detail = fmt::format("5 rows, max deviation {:.4f} points", worst);
  return o;
}

Outcome grpo_math() {
  Outcome o;
  Rng rng(101);
  for (int i = 0; i < 100000; ++i) {
    const double p_theta = std::exp(-8 * rng.uniform01()) ;
    const double rho = std::exp(10 * rng.uniform01() - 5);
    const double v = grpo::kl_penalty(rho * p_theta, p_theta);
    o.require(v >= 0.0, fmt::format("negative KL at rho {}", rho));
    if (std::abs(rho - 1.0) > 1e-6) o.require(v > 0.0, fmt::format("zero KL at rho {}", rho));
  }
  for (double p : {1e-6, 0.01, 0.3, 0.5, 1.0}) {
    o.require(std::abs(grpo::kl_penalty(p, p)) < 1e-12, "KL at rho 1");
  }
  o.require(grpo::clipped_surrogate(1.0, 0.5, 0.2) == 0.5, "surrogate example 1");
  o.require(grpo::clipped_surrogate(2.0, 1.0, 0.2) == 1.2, "surrogate example 2");
  o.require(grpo::clipped_surrogate(0.5, -1.0, 0.2) == -0.8, "surrogate example 3");

  double worst = 0.0;
  int done = 0, resampled = 0;
  while (done < 100) {
    grpo::GrpoConfig cfg;
    cfg.epsilon = 0.1 + 0.2 * rng.uniform01();
    cfg.beta_kl = 0.1 * rng.uniform01();
    cfg.kl_placement = (done % 2) ? grpo::KlPlacement::kOutsideSum : grpo::KlPlacement::kPerCompletion;
    const std::size_t k = 2 + rng.uniform_index(9);
    grpo::ToyPolicy policy{std::vector<double>(k), 0.5 + 1.5 * rng.uniform01()};
    for (double& x : policy.logits) x = rng.normal();
    grpo::ToyPolicy old = policy, ref = policy;
    for (double& x : old.logits) x += 0.4 * rng.normal();
    for (double& x : ref.logits) x += 0.4 * rng.normal();
    const auto lo = old.log_probs(), lr = ref.log_probs(), ln = policy.log_probs();
    grpo::ToyGroup g;
    const std::size_t n = 2 + rng.uniform_index(7);
    bool near_kink = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = rng.uniform_index(k);
      g.indices.push_back(idx);
      g.advantages.push_back(rng.normal());
      g.logprob_old.push_back(lo[idx]);
      g.logprob_ref.push_back(lr[idx]);
      const double ratio = std::exp(ln[idx] - lo[idx]);
      if (std::abs(ratio - (1 - cfg.epsilon)) < 1e-3 || std::abs(ratio - (1 + cfg.epsilon)) < 1e-3) {
        near_kink = true;
      }
    }
    if (near_kink) {
      ++resampled;
      continue;
    }
    const auto grad = grpo::toy_objective_gradient(policy, g, cfg);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double h = 1e-5;
      auto up = policy, dn = policy;
      up.logits[j] += h;
      dn.logits[j] -= h;
      const double fd = (grpo::toy_objective(up, g, cfg) - grpo::toy_objective(dn, g, cfg)) / (2 * h);
      num += (grad[j] - fd) * (grad[j] - fd);
      den = std::max(den, std::max(std::abs(grad[j]), std::abs(fd)));
    }
    const double rel = std::sqrt(num) / std::max(den, 1e-8);
    worst = std::max(worst, rel);
    o.require(rel <= 1e-5, fmt::format("gradient relative error {:.3g}", rel));
    ++done;
  }
  if (o.pass) {
    o.detail = fmt::format("1e5 KL draws non-negative; 3 surrogate examples exact; "
                           "worst gradient rel. error {:.2g} over 100 instances ({} resampled)",
                           worst, resampled);
  }
  return o;
}

Outcome toy_grpo() {
  const auto world = grpo::make_fact_world();
  std::vector<double> gains;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    grpo::ToyPolicy policy{std::vector<double>(world.candidates.size(), 0.0), 1.0};
    grpo::ToyTrainOptions opt;
    opt.steps = 500;
    opt.seed = seed;
    const auto t = grpo::toy_train(world, policy, grpo::GrpoConfig{}, rewards::RewardConfig{}, opt);
    gains.push_back(100.0 * (t.final_sfa - t.initial_sfa));
  }
  std::sort(gains.begin(), gains.end());
  Outcome o;
  o.require(gains[2] >= 20.0, "median gain below 20 points");
  o.detail = fmt::format("median SFA gain {:.2f} points (min {:.2f}, max {:.2f})", gains[2],
                         gains.front(), gains.back());
  return o;
}

Outcome trajectory_oracles() {
  using namespace trajectory;
  Outcome o;
  Rng rng(4242);
  double worst = 0.0;
  auto cmp = [&](double a, double b, const char* what) {
    if (!(std::isnan(a) && std::isnan(b))) worst = std::max(worst, std::abs(a - b));
    o.require(oracle::close(a, b, 1e-9), what);
  };
  for (int n = 0; n < 200; ++n) {
    const auto tr = oracle::random_trace(rng);
    const auto rep = analyze_trace(tr);
    const auto means = oracle::step_means(tr);
    for (std::size_t l = 0; l < tr.layer_count; ++l) {
      const auto& m = means[l];
      for (std::size_t t = 0; t < m.size(); ++t)
        for (std::size_t h = 0; h < m[t].size(); ++h) cmp(rep.step_means(l, t, h), m[t][h], "step mean");
      for (std::size_t t = 1; t < m.size(); ++t)
        cmp(rep.distances[l].distances[t - 1], oracle::dist(m[t], m[t - 1]), "distance");
      cmp(rep.distances[l].mean, oracle::mean_distance(m), "mean distance");
      if (m.size() >= 3) {
        const auto a = oracle::angles(m);
        for (std::size_t i = 0; i < a.size(); ++i) cmp(rep.angles[l].angles[i], a[i], "angle");
        cmp(rep.angles[l].mean, oracle::mean_angle(m), "mean angle");
      }
      const auto s = oracle::similarity(m);
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) cmp(rep.coherence[l].matrix[i][j], s[i][j], "coherence");
      const auto r = oracle::pca_ratios(m);
      cmp(rep.pca[l].ratios[0], r[0], "pca ratio 1");
      cmp(rep.pca[l].ratios[1], r[1], "pca ratio 2");
    }

    // Scaling by a power of two is exact in binary floating point.
    auto sc = tr;
    for (double& x : sc.hiddens.data) x *= 8.0;
    const auto srep = analyze_trace(sc);
    // A consistent permutation of the hidden axis.
    auto pm = tr;
    std::vector<std::size_t> perm(tr.hidden_dim);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    for (std::size_t l = 0; l < tr.layer_count; ++l)
      for (std::size_t i = 0; i < tr.token_count; ++i)
        for (std::size_t h = 0; h < tr.hidden_dim; ++h) pm.hiddens(l, i, perm[h]) = tr.hiddens(l, i, h);
    const auto prep = analyze_trace(pm);
    for (std::size_t l = 0; l < tr.layer_count; ++l) {
      o.require(srep.distances[l].distances.size() == rep.distances[l].distances.size(), "shape");
      for (std::size_t t = 0; t < rep.distances[l].distances.size(); ++t) {
        o.require(srep.distances[l].distances[t] == 8.0 * rep.distances[l].distances[t], "scaled distance");
        o.require(std::abs(prep.distances[l].distances[t] - rep.distances[l].distances[t]) <=
                      1e-12 * rep.distances[l].distances[t],
                  "permuted distance");
      }
      o.require(srep.coherence[l].matrix == rep.coherence[l].matrix, "scaled coherence");
      for (std::size_t i = 0; i < rep.coherence[l].matrix.size(); ++i)
        for (std::size_t j = 0; j < rep.coherence[l].matrix.size(); ++j)
          o.require(std::abs(prep.coherence[l].matrix[i][j] - rep.coherence[l].matrix[i][j]) <= 1e-12,
                    "permuted coherence");
      if (!rep.angles.empty()) {
        for (std::size_t i = 0; i < rep.angles[l].angles.size(); ++i) {
          o.require(oracle::close(srep.angles[l].angles[i], rep.angles[l].angles[i], 0.0), "scaled angle");
          o.require(oracle::close(prep.angles[l].angles[i], rep.angles[l].angles[i], 1e-9), "permuted angle");
        }
      }
      o.require(srep.pca[l].ratios == rep.pca[l].ratios, "scaled pca ratios");
    }
  }
  if (o.pass) {
    o.detail = fmt::format("200 random traces, worst oracle deviation {:.2g}; invariances hold", worst);
  }
  return o;
}

std::string random_raw(Rng& rng) {
  static const std::vector<std::string> pieces{
      "<think>", "</think>", "boxed{", "}",   "First, the prize went to Bohr. ",
      "Next, ",  "Wait, ",   "42",     "\n\n", "Einstein was born in Ulm in 1879. ", "x", " "};
  auto noise = [&](std::size_t max) {
    std::string s;
    const std::size_t n = rng.uniform_index(max);
    for (std::size_t i = 0; i < n; ++i) s += pieces[rng.uniform_index(pieces.size())];
    return s;
  };
  if (rng.uniform_index(2) == 0) return noise(12);
  // Well-formed skeleton, then at most one structural edit.
  std::string body;
  const std::size_t steps = 1 + rng.uniform_index(4);
  for (std::size_t i = 0; i < steps; ++i) body += pieces[4 + rng.uniform_index(2)] + "Bohr won. ";
  std::string raw = "<think>" + body + "</think> The answer is boxed{" + pieces[6 + rng.uniform_index(2)] + "}.";
  switch (rng.uniform_index(6)) {
    case 0: raw += " boxed{7}"; break;
    case 1: raw.erase(0, 7); break;
    case 2: raw += "<think>again</think>"; break;
    case 3: raw.insert(0, noise(4)); break;
    default: break;
  }
  return raw;
}

Outcome reward_invariants() {
  Outcome o;
  Rng rng(55);
  rewards::RewardConfig cfg;
  cfg.step_len_min = 3;
  cfg.step_len_max = 12;
  cfg.total_len_min = 5;
  cfg.total_len_max = 30;
  std::size_t empty_valid = 0, well_formed = 0;
  for (int n = 0; n < 10000; ++n) {
    std::vector<std::string> steps;
    std::vector<double> probs;
    const std::size_t k = rng.uniform_index(8);
    for (std::size_t i = 0; i < k; ++i) {
      std::string s;
      const std::size_t w = rng.uniform_index(16);
      for (std::size_t j = 0; j < w; ++j) s += "tok ";
      steps.push_back(s);
      probs.push_back(rng.uniform01());
    }
    const auto r = rewards::factual_reward(steps, probs, cfg);
    o.require(r.value >= 0.0 && r.value <= 1.0, "R_fact outside [0, 1]");
    if (r.valid_steps == 0) {
      ++empty_valid;
      o.require(r.value == 0.0, "empty valid set gives non-zero reward");
    }
    if (k > 0) {
      auto up = probs;
      const std::size_t i = rng.uniform_index(k);
      up[i] = probs[i] + (1.0 - probs[i]) * rng.uniform01();
      o.require(rewards::factual_reward(steps, up, cfg).value >= r.value, "not monotone");
    }
    const std::string raw = random_raw(rng);
    const double f = rewards::format_reward(raw, cfg);
    o.require(f == cfg.alpha || f == -cfg.beta_fmt, "format reward not binary");
    const double len = rewards::length_reward(raw, cfg);
    o.require(len == cfg.gamma || len == -cfg.eta, "length reward not binary");
    bool parsed = true;
    try {
      chains::parse_response(raw);
    } catch (const Error&) {
      parsed = false;
    }
    well_formed += parsed;
    o.require(parsed == (f == cfg.alpha), "format reward disagrees with parser");
  }
  if (o.pass) {
    o.detail = fmt::format("1e4 inputs ({} with no valid step, {} well-formed responses)",
                           empty_valid, well_formed);
  }
  return o;
}

std::string pipeline_bytes(const augment::SyntheticCorpus& corpus, const augment::DatasetOptions& opt,
                           augment::DatasetSplits* out) {
  auto s = augment::build_dataset(corpus.samples, corpus.gazetteer, opt);
  std::string bytes = augment::records_to_jsonl(s.train) + augment::records_to_jsonl(s.validation) +
                      augment::records_to_jsonl(s.test);
  if (out) *out = std::move(s);
  return bytes;
}

Outcome counterfactual_pipeline() {
  Outcome o;
  const auto corpus = augment::make_synthetic_corpus(1000, 17);
  augment::DatasetOptions opt;
  opt.val_size = 200;
  opt.test_size = 200;
  opt.negative_ratio = 1.0;
  opt.seed = 17;
  augment::DatasetSplits s;
  const auto first = pipeline_bytes(corpus, opt, &s);
  const auto second = pipeline_bytes(augment::make_synthetic_corpus(1000, 17), opt, nullptr);
  o.require(first == second, "same-seed runs differ");

  std::set<std::size_t> ids;
  std::size_t total = 0, negatives = 0;
  const auto& table = corpus.gazetteer.entries();
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (const auto& r : *part) {
      ++total;
      ids.insert(r.id);
      if (r.label) {
        o.require(!r.swap && !r.perturbed_cot, "positive carries a swap");
        continue;
      }
      ++negatives;
      o.require(r.swap && r.perturbed_cot, "negative without a swap");
      if (!r.swap || !r.perturbed_cot) continue;
      const auto& sw = *r.swap;
      o.require(sw.replacement != sw.original.surface, "replacement equals original");
      const auto it = table.find(sw.replacement);
      o.require(it != table.end() && it->second == sw.original.type, "replacement type differs");
      o.require(r.original_cot.substr(sw.original.start, sw.original.end - sw.original.start) ==
                    sw.original.surface,
                "span does not match original text");
      const std::string expect = r.original_cot.substr(0, sw.original.start) + sw.replacement +
                                 r.original_cot.substr(sw.original.end);
      o.require(*r.perturbed_cot == expect, "perturbed text is not a single substitution");
    }
  }
  o.require(ids.size() == total, "splits overlap");
  o.require(s.validation.size() == 200 && s.test.size() == 200, "split sizes");
  o.require(negatives + s.skipped.size() == 1000, "negative count");
  if (o.pass) {
    o.detail = fmt::format("{} records, {} negatives all valid, splits disjoint, "
                           "{} identical JSONL bytes",
                           total, negatives, first.size());
  }
  return o;
}

Outcome sft_objective() {
  Outcome o;
  o.require(factcheck::sft_loss({{1.0, 1.0}, {1.0}}) == 0.0, "loss of certain targets");
  o.require(std::abs(factcheck::sft_loss({{0.25, 0.25}}) - 2 * std::log(4.0)) <= 1e-12, "uniform loss");
  const auto train = factcheck::make_toy_verdict_data(50, 0, mix_seed(0, 1));
  const auto held = factcheck::make_toy_verdict_data(200, 1, mix_seed(0, 2));
  factcheck::CharVerdictModel model;
  std::vector<std::vector<double>> probs;
  std::vector<factcheck::SftExample> batch;
  for (const auto& e : train) {
    probs.push_back(model.token_probs(e.example.input, e.example.target));
    batch.push_back(e.example);
  }
  o.require(std::abs(model.loss(batch) - factcheck::sft_loss(probs)) <= 1e-9,
            "model loss disagrees with the objective");
  const auto r = factcheck::train_toy_classifier(model, train, held, 200);
  o.require(r.losses.size() == 201 && r.losses.back() < r.losses.front(), "loss did not decrease");
  o.require(r.heldout_accuracy > 0.90, fmt::format("held-out accuracy {:.3f}", r.heldout_accuracy));
  o.detail = fmt::format("loss {:.3f} -> {:.3f}; held-out accuracy {:.1f}%", r.losses.front(),
                         r.losses.back(), 100 * r.heldout_accuracy);
  return o;
}

Outcome segmentation_golden() {
  Outcome o;
  std::ifstream in(std::string(FACTSTEP_TEST_DATA) + "/segmentation_golden.json");
  if (!in) {
    o.require(false, "golden corpus missing");
    return o;
  }
  const auto cases = nlohmann::json::parse(in);
  o.require(cases.size() == 10, "corpus must have 10 cases");
  std::set<std::string> seen;
  std::size_t ok = 0;
  for (const auto& c : cases) {
    const auto input = c.at("input").get<std::string>();
    const auto want = c.at("steps").get<std::vector<std::string>>();
    const auto got = chains::segment_steps(input);
    ok += got == want;
    o.require(got == want, "mismatch on '" + c.at("name").get<std::string>() + "'");
    for (const auto& d : chains::DelimiterSet::defaults().delimiters) {
      if (input.find(d) != std::string::npos) seen.insert(d);
    }
    if (want.size() == 1 && got.size() == 1) seen.insert("single");
  }
  for (const char* need : {"First,", "Next,", "Finally,", "Wait,", "\n\n", "single"}) {
    o.require(seen.count(need) == 1, std::string("corpus lacks a case for ") + need);
  }
  if (o.pass) o.detail = fmt::format("{}/10 golden cases split exactly", ok);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"classifier metrics reproduce reference rows", table_metrics},
      {"GRPO math suite", grpo_math},
      {"toy GRPO raises policy SFA", toy_grpo},
      {"trajectory metrics match oracles", trajectory_oracles},
      {"reward invariants", reward_invariants},
      {"counterfactual pipeline", counterfactual_pipeline},
      {"SFT objective and toy classifier", sft_objective},
      {"segmentation golden corpus", segmentation_golden},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("criterion {}: {} {} ({})\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
               o.detail);
  }
  return failures == 0 ? 0 : 1;
}
