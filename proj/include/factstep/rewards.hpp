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
#include <string>
#include <string_view>
#include <vector>

#include "factstep/chains.hpp"
#include "factstep/embedding.hpp"
#include "factstep/factcheck.hpp"
#include "factstep/text.hpp"

namespace factstep::rewards {

struct RewardWeights {
  double fact = 1.0;
  double sim = 1.0;
  double format = 1.0;
  double length = 1.0;
};

struct RewardConfig {
  double tau = 0.5;    // factuality threshold
  double delta = 0.75; // similarity threshold
  double alpha = 1.0;  // format pass
  double beta_fmt = 1.0;
  double gamma = 0.5;  // length pass
  double eta = 0.5;
  double sim_pass = 1.0;
  double sim_fail = 1.0;
  std::size_t step_len_min = 10;
  std::size_t step_len_max = 256;
  std::size_t total_len_min = 64;
  std::size_t total_len_max = 2048;
  RewardWeights weights;

  // Throws kInvalidArgument when a bound or magnitude is out of range.
  void validate() const;
};

struct FactualReward {
  double value = 0.0;
  std::size_t valid_steps = 0;
};

// Fraction of length-valid steps whose probability is strictly above tau;
// 0 when no step is length-valid. Throws kLengthMismatch.
FactualReward factual_reward(const std::vector<std::string>& steps,
                             const std::vector<double>& probs, const RewardConfig& cfg,
                             const TokenCounter& tokenizer = whitespace_tokenizer());

struct SemanticReward {
  double value = 0.0;
  double similarity = 0.0;
  bool zero_vector = false;
};

// +sim_pass when cosine(E(answer), E(reference)) >= delta, else -sim_fail.
SemanticReward semantic_reward(std::string_view answer, std::string_view reference,
                               Embedder& embedder, const RewardConfig& cfg);

// The boxed content when present, otherwise the trimmed text.
std::string answer_text(std::string_view text);

// alpha iff chains::parse_response accepts raw, else -beta_fmt.
double format_reward(std::string_view raw, const RewardConfig& cfg);

// Token count of the response with think tags removed.
std::size_t response_length(std::string_view raw,
                            const TokenCounter& tokenizer = whitespace_tokenizer());
double length_reward_for_count(std::size_t tokens, const RewardConfig& cfg);
double length_reward(std::string_view raw, const RewardConfig& cfg,
                     const TokenCounter& tokenizer = whitespace_tokenizer());

struct RewardComponents {
  double fact = 0.0;
  double sim = 0.0;
  double format = 0.0;
  double length = 0.0;
};

struct RewardBreakdown {
  double r_fact = 0.0;
  double r_sim = 0.0;
  double r_format = 0.0;
  double r_length = 0.0;
  double total = 0.0;
  std::size_t valid_step_count = 0;
  double similarity = 0.0;
};

RewardBreakdown total_reward(const RewardComponents& components, const RewardConfig& cfg);

struct ScoreInputs {
  std::string_view question;
  std::string_view raw;
  std::string_view reference;
};

// Full pipeline for one response. A malformed response scores r_fact = 0 and
// r_sim = -sim_fail because neither steps nor an answer can be extracted.
RewardBreakdown score_response(const ScoreInputs& in, factcheck::FactScorer& scorer,
                               Embedder& embedder, const RewardConfig& cfg,
                               const TokenCounter& tokenizer = whitespace_tokenizer(),
                               const chains::DelimiterSet& delims = {});

std::string breakdown_to_json(const RewardBreakdown& b);

}  // namespace factstep::rewards
