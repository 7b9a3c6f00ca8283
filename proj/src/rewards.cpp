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

#include "factstep/rewards.hpp"

#include <nlohmann/json.hpp>

#include "factstep/error.hpp"

namespace factstep::rewards {

void RewardConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) fail(Errc::kInvalidArgument, what);
  };
  check(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  check(delta > -1.0 && delta < 1.0, "delta must lie in (-1, 1)");
  check(alpha > 0.0 && beta_fmt > 0.0 && gamma > 0.0 && eta > 0.0 && sim_pass > 0.0 &&
            sim_fail > 0.0,
        "reward magnitudes must be positive");
  check(step_len_min <= step_len_max, "step_len_min > step_len_max");
  check(total_len_min <= total_len_max, "total_len_min > total_len_max");
  check(weights.fact >= 0.0 && weights.sim >= 0.0 && weights.format >= 0.0 &&
            weights.length >= 0.0,
        "weights must be non-negative");
}

FactualReward factual_reward(const std::vector<std::string>& steps,
                             const std::vector<double>& probs, const RewardConfig& cfg,
                             const TokenCounter& tokenizer) {
  if (steps.size() != probs.size()) {
    fail(Errc::kLengthMismatch, std::to_string(steps.size()) + " steps vs " +
                                    std::to_string(probs.size()) + " probabilities");
  }
  FactualReward r;
  std::size_t above = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::size_t len = tokenizer(steps[i]);
    if (len < cfg.step_len_min || len > cfg.step_len_max) continue;
    ++r.valid_steps;
    if (probs[i] > cfg.tau) ++above;
  }
  if (r.valid_steps > 0) {
    r.value = static_cast<double>(above) / static_cast<double>(r.valid_steps);
  }
  return r;
}

SemanticReward semantic_reward(std::string_view answer, std::string_view reference,
                               Embedder& embedder, const RewardConfig& cfg) {
  const Similarity sim = cosine_similarity(embedder.embed(answer), embedder.embed(reference));
  return {sim.value >= cfg.delta ? cfg.sim_pass : -cfg.sim_fail, sim.value, sim.zero_vector};
}

std::string answer_text(std::string_view text) {
  if (chains::count_occurrences(text, chains::kBoxedOpen) > 0) {
    return chains::extract_boxed(text);
  }
  return std::string(trim(text));
}

double format_reward(std::string_view raw, const RewardConfig& cfg) {
  try {
    chains::parse_response(raw);
    return cfg.alpha;
  } catch (const Error& e) {
    if (e.code() != Errc::kMalformedResponse) throw;
    return -cfg.beta_fmt;
  }
}

std::size_t response_length(std::string_view raw, const TokenCounter& tokenizer) {
  std::string text;
  text.reserve(raw.size());
  std::size_t pos = 0;
  while (pos < raw.size()) {
    if (raw.substr(pos, chains::kThinkOpen.size()) == chains::kThinkOpen) {
      text.push_back(' ');
      pos += chains::kThinkOpen.size();
    } else if (raw.substr(pos, chains::kThinkClose.size()) == chains::kThinkClose) {
      text.push_back(' ');
      pos += chains::kThinkClose.size();
    } else {
      text.push_back(raw[pos++]);
    }
  }
  return tokenizer(text);
}

double length_reward_for_count(std::size_t tokens, const RewardConfig& cfg) {
  return (tokens >= cfg.total_len_min && tokens <= cfg.total_len_max) ? cfg.gamma : -cfg.eta;
}

double length_reward(std::string_view raw, const RewardConfig& cfg,
                     const TokenCounter& tokenizer) {
  return length_reward_for_count(response_length(raw, tokenizer), cfg);
}

RewardBreakdown total_reward(const RewardComponents& c, const RewardConfig& cfg) {
  RewardBreakdown b;
  b.r_fact = c.fact;
  b.r_sim = c.sim;
  b.r_format = c.format;
  b.r_length = c.length;
  b.total = cfg.weights.fact * c.fact + cfg.weights.sim * c.sim +
            cfg.weights.format * c.format + cfg.weights.length * c.length;
  return b;
}

RewardBreakdown score_response(const ScoreInputs& in, factcheck::FactScorer& scorer,
                               Embedder& embedder, const RewardConfig& cfg,
                               const TokenCounter& tokenizer,
                               const chains::DelimiterSet& delims) {
  RewardComponents c;
  c.format = format_reward(in.raw, cfg);
  c.length = length_reward(in.raw, cfg, tokenizer);
  std::size_t valid = 0;
  double similarity = 0.0;
  try {
    const auto trace = chains::parse_response(in.raw, in.question, delims);
    std::vector<double> probs;
    probs.reserve(trace.steps.size());
    for (const auto& step : trace.steps) {
      probs.push_back(factcheck::fact_probability(scorer, in.question, step).value);
    }
    const auto fact = factual_reward(trace.steps, probs, cfg, tokenizer);
    c.fact = fact.value;
    valid = fact.valid_steps;
    const auto sem = semantic_reward(trace.final_answer, answer_text(in.reference), embedder, cfg);
    c.sim = sem.value;
    similarity = sem.similarity;
  } catch (const Error& e) {
    if (e.code() != Errc::kMalformedResponse) throw;
    c.fact = 0.0;
    c.sim = -cfg.sim_fail;
  }
  RewardBreakdown b = total_reward(c, cfg);
  b.valid_step_count = valid;
  b.similarity = similarity;
  return b;
}

std::string breakdown_to_json(const RewardBreakdown& b) {
  nlohmann::ordered_json j;
  j["r_fact"] = b.r_fact;
  j["r_sim"] = b.r_sim;
  j["r_format"] = b.r_format;
  j["r_length"] = b.r_length;
  j["total"] = b.total;
  j["valid_step_count"] = b.valid_step_count;
  j["similarity"] = b.similarity;
  return j.dump();
}

}  // namespace factstep::rewards
