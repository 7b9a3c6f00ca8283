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

#include "factstep/toy_classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "factstep/augment.hpp"
#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::factcheck {

namespace {

constexpr char kBos = '\0';

struct Word {
  std::string text;  // lowercased
  bool capitalized = false;
};

std::vector<Word> words_of(std::string_view text) {
  std::vector<Word> words;
  Word cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      if (cur.text.empty()) cur.capitalized = std::isupper(u) != 0;
      cur.text.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.text.empty()) {
      words.push_back(std::move(cur));
      cur = {};
    }
  }
  if (!cur.text.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace

CharVerdictModel::CharVerdictModel(Options options) : options_(std::move(options)) {
  std::set<char> chars;
  for (std::string_view label : {kTrueLabel, kFalseLabel}) {
    chars.insert(label.begin(), label.end());
  }
  vocab_.assign(chars.begin(), chars.end());
  for (std::string_view label : {kTrueLabel, kFalseLabel}) {
    char prev = kBos;
    for (std::size_t j = 0; j < label.size(); ++j) {
      states_.try_emplace({j, prev}, states_.size());
      prev = label[j];
    }
  }
  const std::size_t v = vocab_.size();
  bias_.assign(states_.size() * v, 0.0);
  weights_.assign(states_.size() * v * options_.feature_dim, 0.0);
}

std::size_t CharVerdictModel::state_of(std::size_t position, char prev) const {
  const auto it = states_.find({position, prev});
  if (it == states_.end()) return states_.size();
  return it->second;
}

std::vector<CharVerdictModel::Feature> CharVerdictModel::features(std::string_view input) const {
  std::set<std::size_t> hit;
  const std::size_t dim = options_.feature_dim;
  const std::string_view prompt = options_.system_prompt;
  if (!prompt.empty() && input.substr(0, prompt.size()) == prompt) input.remove_prefix(prompt.size());
  for (const auto& line : split_lines(input)) {
    const auto words = words_of(line);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0 && words[i].capitalized) names.push_back(words[i].text);
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        const auto& a = std::min(names[i], names[j]);
        const auto& b = std::max(names[i], names[j]);
        hit.insert(fnv1a64(a + "|" + b) % dim);
      }
    }
  }
  std::vector<Feature> phi;
  const double value = hit.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(hit.size()));
  for (std::size_t idx : hit) phi.push_back({idx, value});
  return phi;
}

std::vector<double> CharVerdictModel::distribution(std::size_t state,
                                                   const std::vector<Feature>& phi) const {
  const std::size_t v = vocab_.size();
  const std::size_t dim = options_.feature_dim;
  std::vector<double> logits(v);
  for (std::size_t k = 0; k < v; ++k) {
    double z = bias_[state * v + k];
    const double* w = &weights_[(state * v + k) * dim];
    for (const auto& f : phi) z += w[f.index] * f.value;
    logits[k] = z;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (auto& z : logits) {
    z = std::exp(z - mx);
    sum += z;
  }
  for (auto& z : logits) z /= sum;
  return logits;
}

std::vector<double> CharVerdictModel::token_probs(std::string_view input,
                                                  std::string_view target) const {
  const auto phi = features(input);
  std::vector<double> probs;
  probs.reserve(target.size());
  char prev = kBos;
  for (std::size_t j = 0; j < target.size(); ++j) {
    const std::size_t s = state_of(j, prev);
    const std::size_t k = vocab_.find(target[j]);
    if (s == states_.size() || k == std::string::npos) {
      fail(Errc::kInvalidArgument, "target is not a verdict label");
    }
    probs.push_back(distribution(s, phi)[k]);
    prev = target[j];
  }
  return probs;
}

double CharVerdictModel::loss(const std::vector<SftExample>& batch) const {
  std::vector<std::vector<double>> probs;
  probs.reserve(batch.size());
  for (const auto& ex : batch) probs.push_back(token_probs(ex.input, ex.target));
  return sft_loss(probs);
}

double CharVerdictModel::train_step(const std::vector<SftExample>& batch) {
  if (batch.empty()) fail(Errc::kInvalidArgument, "empty batch");
  const std::size_t v = vocab_.size();
  const std::size_t dim = options_.feature_dim;
  std::vector<double> grad_bias(bias_.size(), 0.0);
  std::vector<double> grad_w(weights_.size(), 0.0);
  std::vector<std::vector<double>> all_probs;
  all_probs.reserve(batch.size());

  for (const auto& ex : batch) {
    const auto phi = features(ex.input);
    std::vector<double> probs;
    char prev = kBos;
    for (std::size_t j = 0; j < ex.target.size(); ++j) {
      const std::size_t s = state_of(j, prev);
      const std::size_t y = vocab_.find(ex.target[j]);
      if (s == states_.size() || y == std::string::npos) {
        fail(Errc::kInvalidArgument, "target is not a verdict label");
      }
      const auto p = distribution(s, phi);
      probs.push_back(p[y]);
      // d(-log p_y)/d logit_k = p_k - 1[k == y]
      for (std::size_t k = 0; k < v; ++k) {
        const double g = p[k] - (k == y ? 1.0 : 0.0);
        grad_bias[s * v + k] += g;
        double* gw = &grad_w[(s * v + k) * dim];
        for (const auto& f : phi) gw[f.index] += g * f.value;
      }
      prev = ex.target[j];
    }
    all_probs.push_back(std::move(probs));
  }

  const double before = sft_loss(all_probs);
  const double scale = options_.learning_rate / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < bias_.size(); ++i) bias_[i] -= scale * grad_bias[i];
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] -= scale * grad_w[i];
  return before;
}

std::string CharVerdictModel::generate(std::string_view input) const {
  const auto phi = features(input);
  std::string out;
  char prev = kBos;
  const std::size_t max_len = std::max(kTrueLabel.size(), kFalseLabel.size());
  while (out.size() < max_len) {
    const std::size_t s = state_of(out.size(), prev);
    if (s == states_.size()) break;
    const auto p = distribution(s, phi);
    const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    out.push_back(vocab_[best]);
    prev = vocab_[best];
    if (out == kTrueLabel || out == kFalseLabel) break;
  }
  return out;
}

ContinuationProbs CharVerdictModel::continuation_probs_for_input(std::string_view input) const {
  // The verdict character follows "<fact>" in both labels.
  const std::size_t pos = kTrueLabel.find('>') + 1;
  const std::size_t s = state_of(pos, '>');
  const auto p = distribution(s, features(input));
  return {p[vocab_.find(kTrueLabel[pos])], p[vocab_.find(kFalseLabel[pos])]};
}

ContinuationProbs CharVerdictModel::continuation_probs(std::string_view question,
                                                       std::string_view step) const {
  return continuation_probs_for_input(format_input(options_.system_prompt, question, step));
}

std::string CharVerdictModel::identity() const {
  return "char-verdict-model:dim=" + std::to_string(options_.feature_dim);
}

std::vector<LabeledExample> make_toy_verdict_data(std::size_t count, int phrasing,
                                                  std::uint64_t seed,
                                                  std::string_view system_prompt) {
  static const std::vector<std::pair<std::string, std::string>> kCapitals = {
      {"France", "Paris"},   {"Japan", "Tokyo"},      {"Kenya", "Nairobi"},
      {"Peru", "Lima"},      {"Norway", "Oslo"},      {"Egypt", "Cairo"},
      {"Canada", "Ottawa"},  {"Chile", "Santiago"},
  };
  augment::GazetteerProvider gazetteer;
  for (const auto& [country, capital] : kCapitals) {
    gazetteer.add(country, augment::EntityType::kGpe);
    gazetteer.add(capital, augment::EntityType::kGpe);
  }
  augment::EntityPool pool;
  for (const auto& [country, capital] : kCapitals) {
    pool[augment::EntityType::kGpe].push_back(country);
    pool[augment::EntityType::kGpe].push_back(capital);
  }
  std::sort(pool[augment::EntityType::kGpe].begin(), pool[augment::EntityType::kGpe].end());

  Rng rng(seed);
  std::vector<LabeledExample> out;
  out.reserve(count);
  augment::SourceSample sample;
  for (std::size_t i = 0; i < count; ++i) {
    LabeledExample ex;
    if (i % 2 == 0) {
      const auto& [country, capital] = kCapitals[rng.uniform_index(kCapitals.size())];
      if (phrasing == 0) {
        sample.question = "What is the capital of " + country + "?";
        sample.cot = "First, the capital of " + country + " is " + capital + ".";
      } else {
        sample.question = "Which city is the seat of government of " + country + "?";
        sample.cot = "Next, " + capital + " serves as the capital city of " + country + ".";
      }
      ex.cot = sample.cot;
      ex.label = true;
    } else {
      // Counterfactual of the preceding positive; every pair other than the
      // true (country, capital) is false.
      const auto spans = augment::recognize_entities(sample.cot, gazetteer);
      ex.cot = augment::substitute_entity(sample, spans, pool, rng).cot();
      ex.label = false;
    }
    ex.question = sample.question;
    ex.example = {format_input(system_prompt, ex.question, ex.cot),
                  std::string(ex.label ? kTrueLabel : kFalseLabel)};
    out.push_back(std::move(ex));
  }
  return out;
}

ToyTrainResult train_toy_classifier(CharVerdictModel& model,
                                    const std::vector<LabeledExample>& train,
                                    const std::vector<LabeledExample>& heldout,
                                    std::size_t steps) {
  std::vector<SftExample> batch;
  batch.reserve(train.size());
  for (const auto& ex : train) batch.push_back(ex.example);

  ToyTrainResult result;
  for (std::size_t s = 0; s < steps; ++s) result.losses.push_back(model.train_step(batch));
  result.losses.push_back(model.loss(batch));

  std::vector<bool> labels;
  std::vector<Verdict> verdicts;
  for (const auto& ex : heldout) {
    labels.push_back(ex.label);
    verdicts.push_back(parse_verdict(model.generate(ex.example.input)).verdict);
  }
  if (!heldout.empty()) {
    result.heldout_confusion = tally(labels, verdicts);
    result.heldout_accuracy = classification_metrics(result.heldout_confusion).accuracy;
  }
  return result;
}

}  // namespace factstep::factcheck
