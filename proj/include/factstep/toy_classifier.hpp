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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "factstep/factcheck.hpp"

namespace factstep::factcheck {

// Tiny character-level reference model for the SFT objective. Each target
// character is predicted by a softmax whose state is (position, previous
// character) and whose input is a hashed set of capitalized-word pairs that
// share a line of x (the first word of a line is skipped). The system prompt
// prefix is the same for every input and is left out. Trained by full-batch
// gradient descent on sft_loss.
class CharVerdictModel : public ContinuationModel {
 public:
  struct Options {
    std::size_t feature_dim = 4096;
    double learning_rate = 1.0;
    std::string system_prompt = std::string(kDefaultSystemPrompt);
  };

  CharVerdictModel() : CharVerdictModel(Options{}) {}
  explicit CharVerdictModel(Options options);

  // Teacher-forced P(y_j | x, y_<j) for each target character.
  std::vector<double> token_probs(std::string_view input, std::string_view target) const;

  double loss(const std::vector<SftExample>& batch) const;

  // One gradient step; returns the loss before the update.
  double train_step(const std::vector<SftExample>& batch);

  // Greedy decode of the verdict string.
  std::string generate(std::string_view input) const;

  ContinuationProbs continuation_probs(std::string_view question,
                                       std::string_view step) const override;
  ContinuationProbs continuation_probs_for_input(std::string_view input) const;

  std::string identity() const override;
  const Options& options() const { return options_; }

 private:
  struct Feature {
    std::size_t index;
    double value;
  };
  std::vector<Feature> features(std::string_view input) const;
  std::vector<double> distribution(std::size_t state, const std::vector<Feature>& phi) const;
  std::size_t state_of(std::size_t position, char prev) const;

  Options options_;
  std::string vocab_;
  std::map<std::pair<std::size_t, char>, std::size_t> states_;
  std::vector<double> bias_;     // [state][vocab]
  std::vector<double> weights_;  // [state][vocab][feature]
};

struct LabeledExample {
  std::string question;
  std::string cot;
  bool label = true;
  SftExample example;
};

// Balanced capital-city facts: even records are true statements and each odd
// record is the entity-substituted counterfactual of the record before it.
// phrasing selects the sentence template so held-out data can differ in
// wording from training data.
std::vector<LabeledExample> make_toy_verdict_data(std::size_t count, int phrasing,
                                                  std::uint64_t seed,
                                                  std::string_view system_prompt = kDefaultSystemPrompt);

struct ToyTrainResult {
  std::vector<double> losses;
  double heldout_accuracy = 0.0;
  ConfusionCounts heldout_confusion;
};

ToyTrainResult train_toy_classifier(CharVerdictModel& model,
                                    const std::vector<LabeledExample>& train,
                                    const std::vector<LabeledExample>& heldout,
                                    std::size_t steps);

}  // namespace factstep::factcheck
