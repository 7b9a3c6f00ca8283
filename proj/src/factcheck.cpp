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

#include "factstep/factcheck.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::factcheck {

std::string format_input(std::string_view system_prompt, std::string_view question,
                         std::string_view cot, std::string_view separator) {
  if (system_prompt.empty()) fail(Errc::kEmptyPart, "system prompt is empty");
  if (question.empty()) fail(Errc::kEmptyPart, "question is empty");
  if (cot.empty()) fail(Errc::kEmptyPart, "cot is empty");
  std::string out;
  out.reserve(system_prompt.size() + question.size() + cot.size() + 2 * separator.size());
  out.append(system_prompt);
  out.append(separator);
  out.append(question);
  out.append(separator);
  out.append(cot);
  return out;
}

SftExample make_sft_example(const augment::CounterfactualRecord& record,
                            std::string_view system_prompt) {
  return {format_input(system_prompt, record.question, record.cot()),
          std::string(record.label ? kTrueLabel : kFalseLabel)};
}

std::string export_training_jsonl(const std::vector<augment::CounterfactualRecord>& records,
                                  std::string_view system_prompt) {
  std::string out;
  for (const auto& rec : records) {
    auto j = nlohmann::ordered_json::parse(augment::record_to_jsonl(rec));
    const SftExample ex = make_sft_example(rec, system_prompt);
    j["input"] = ex.input;
    j["target"] = ex.target;
    out += j.dump();
    out += '\n';
  }
  return out;
}

double sft_loss(const std::vector<std::vector<double>>& token_probs) {
  if (token_probs.empty()) fail(Errc::kInvalidArgument, "empty batch");
  double total = 0.0;
  for (const auto& example : token_probs) {
    for (double p : example) {
      if (!(p > 0.0 && p <= 1.0)) {
        fail(Errc::kInvalidProbability, "token probability " + std::to_string(p));
      }
      total -= std::log(p);
    }
  }
  return total / static_cast<double>(token_probs.size());
}

FactVerdict parse_verdict(std::string_view output) {
  const std::string_view t = trim(output);
  if (t == kTrueLabel) return {Verdict::kTrue, 1.0};
  if (t == kFalseLabel) return {Verdict::kFalse, 0.0};
  return {Verdict::kInvalid, 0.0};
}

std::string_view format_verdict(Verdict v) {
  switch (v) {
    case Verdict::kTrue: return kTrueLabel;
    case Verdict::kFalse: return kFalseLabel;
    case Verdict::kInvalid: break;
  }
  return "<invalid>";
}

FactVerdict verdict_from_probability(double probability, double threshold) {
  return {probability >= threshold ? Verdict::kTrue : Verdict::kFalse, probability};
}

FactProbability probability_from_continuations(double p_true, double p_false) {
  if (!(p_true >= 0.0) || !(p_false >= 0.0) || !std::isfinite(p_true) ||
      !std::isfinite(p_false)) {
    fail(Errc::kInvalidProbability, "continuation probabilities must be finite and >= 0");
  }
  const double z = p_true + p_false;
  if (z <= 0.0) return {0.5, true};
  return {p_true / z, false};
}

FactProbability GenerativeFactScorer::score(std::string_view question, std::string_view step) {
  const ContinuationProbs p = model_.continuation_probs(question, step);
  return probability_from_continuations(p.p_true, p.p_false);
}

FactProbability fact_probability(FactScorer& scorer, std::string_view question,
                                 std::string_view step) {
  FactProbability p = scorer.score(question, step);
  if (!std::isfinite(p.value)) {
    fail(Errc::kScorerUnavailable, scorer.identity() + " returned a non-finite score");
  }
  p.value = std::clamp(p.value, 0.0, 1.0);
  return p;
}

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) fail(Errc::kEmptyConfusion, "no predictions");
  ClassificationMetrics m;
  const auto d = [](std::uint64_t x) { return static_cast<double>(x); };
  m.accuracy = d(c.tp + c.tn) / d(c.total());
  if (c.tp + c.fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = d(c.tp) / d(c.tp + c.fp);
  }
  if (c.tp + c.fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = d(c.tp) / d(c.tp + c.fn);
  }
  if (m.precision + m.recall == 0.0) {
    m.f1_undefined = true;
  } else {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

ConfusionCounts tally(const std::vector<bool>& labels, const std::vector<Verdict>& verdicts,
                      PositiveClass positive) {
  if (labels.size() != verdicts.size()) {
    fail(Errc::kLengthMismatch, "labels and verdicts differ in length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool actual_pos = positive == PositiveClass::kFactualError ? !labels[i] : labels[i];
    if (verdicts[i] == Verdict::kInvalid) {
      ++(actual_pos ? c.fn : c.fp);
      continue;
    }
    const bool said_factual = verdicts[i] == Verdict::kTrue;
    const bool pred_pos = positive == PositiveClass::kFactualError ? !said_factual : said_factual;
    if (pred_pos && actual_pos) ++c.tp;
    else if (pred_pos) ++c.fp;
    else if (actual_pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

}  // namespace factstep::factcheck
