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
#include <string>
#include <string_view>
#include <vector>

#include "factstep/augment.hpp"

namespace factstep::factcheck {

inline constexpr std::string_view kTrueLabel = "<fact>True</fact>";
inline constexpr std::string_view kFalseLabel = "<fact>False</fact>";

// Placeholder; the classifier's real system prompt is deployment config.
inline constexpr std::string_view kDefaultSystemPrompt =
    "You are a fact-checking assistant. Read the question and the reasoning, "
    "then answer <fact>True</fact> if every statement is factually correct or "
    "<fact>False</fact> otherwise.";

struct SftExample {
  std::string input;
  std::string target;
};

// system_prompt + sep + question + sep + cot. Throws kEmptyPart.
std::string format_input(std::string_view system_prompt, std::string_view question,
                         std::string_view cot, std::string_view separator = "\n");

SftExample make_sft_example(const augment::CounterfactualRecord& record,
                            std::string_view system_prompt = kDefaultSystemPrompt);

// Augment JSONL schema plus the rendered {input, target} pair.
std::string export_training_jsonl(const std::vector<augment::CounterfactualRecord>& records,
                                  std::string_view system_prompt = kDefaultSystemPrompt);

// Mean over examples of the summed negative log-likelihood of each example's
// target tokens. Throws kInvalidProbability for p <= 0 or p > 1.
double sft_loss(const std::vector<std::vector<double>>& token_probs);

enum class Verdict { kTrue, kFalse, kInvalid };

struct FactVerdict {
  Verdict verdict = Verdict::kInvalid;
  // Probability that the step is factually correct.
  double probability = 0.0;
};

// Strict: the trimmed output must equal one of the two label strings.
FactVerdict parse_verdict(std::string_view output);
std::string_view format_verdict(Verdict v);
FactVerdict verdict_from_probability(double probability, double threshold);

struct FactProbability {
  double value = 0.5;
  bool degenerate = false;
};

// p_true / (p_true + p_false); both zero gives 0.5 flagged degenerate.
FactProbability probability_from_continuations(double p_true, double p_false);

class FactScorer {
 public:
  virtual ~FactScorer() = default;
  virtual FactProbability score(std::string_view question, std::string_view step) = 0;
  virtual std::string identity() const = 0;
};

struct ContinuationProbs {
  double p_true = 0.0;
  double p_false = 0.0;
};

// A generative classifier exposing the next-token probabilities of the two
// verdict continuations at the verdict position.
class ContinuationModel {
 public:
  virtual ~ContinuationModel() = default;
  virtual ContinuationProbs continuation_probs(std::string_view question,
                                               std::string_view step) const = 0;
  virtual std::string identity() const = 0;
};

class GenerativeFactScorer : public FactScorer {
 public:
  explicit GenerativeFactScorer(const ContinuationModel& model) : model_(model) {}
  FactProbability score(std::string_view question, std::string_view step) override;
  std::string identity() const override { return "generative:" + model_.identity(); }

 private:
  const ContinuationModel& model_;
};

// Queries the scorer and clamps into [0, 1]; non-finite scores raise
// kScorerUnavailable.
FactProbability fact_probability(FactScorer& scorer, std::string_view question,
                                 std::string_view step);

// Positive class defaults to "contains a factual error": TP counts detected
// counterfactual records.
enum class PositiveClass { kFactualError, kFactual };

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

// Ratios in [0, 1]; zero denominators report 0 and set the flag.
// Throws kEmptyConfusion.
ClassificationMetrics classification_metrics(const ConfusionCounts& c);

// labels: ground-truth factuality. An invalid verdict is scored as wrong:
// FN when the record is positive-class, FP otherwise.
ConfusionCounts tally(const std::vector<bool>& labels, const std::vector<Verdict>& verdicts,
                      PositiveClass positive = PositiveClass::kFactualError);

}  // namespace factstep::factcheck
