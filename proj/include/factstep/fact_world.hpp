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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factstep/embedding.hpp"
#include "factstep/factcheck.hpp"
#include "factstep/grpo.hpp"
#include "factstep/rewards.hpp"

namespace factstep::grpo {

struct CandidateChain {
  std::string raw;
  std::vector<std::string> steps;
  std::vector<bool> step_factual;
  bool answer_correct = true;
  bool well_formed = true;

  // Fraction of factual steps.
  double sfa() const;
};

// Synthetic environment: one question, a fixed table of candidate reasoning
// chains built from factual / counterfactual step variants, and the ground
// truth factuality of every step.
struct FactWorld {
  std::string question;
  std::string reference_answer;
  std::vector<CandidateChain> candidates;

  std::vector<std::string> alphabet() const;
  std::optional<std::size_t> index_of(std::string_view raw) const;
  // Expected SFA of a distribution over candidates.
  double expected_sfa(const std::vector<double>& probs) const;
};

// 16 factual/counterfactual step combinations x {correct, wrong} answer,
// plus 4 responses without a boxed answer: 36 candidates.
FactWorld make_fact_world();

// Scores steps from a table of known factuality: p_true for factual steps,
// p_false for counterfactual ones and p_unknown for anything else.
class StepTableScorer : public factcheck::FactScorer {
 public:
  struct Levels {
    double p_true = 0.9;
    double p_false = 0.1;
    double p_unknown = 0.5;
  };

  explicit StepTableScorer(const FactWorld& world) : StepTableScorer(world, Levels{}) {}
  StepTableScorer(const FactWorld& world, Levels levels);

  factcheck::FactProbability score(std::string_view question, std::string_view step) override;
  std::string identity() const override { return "step-table-scorer"; }

 private:
  std::map<std::string, bool, std::less<>> table_;
  Levels levels_;
};

struct TrainingRow {
  std::size_t step = 0;
  double objective = 0.0;
  double mean_reward = 0.0;
  double sfa = 0.0;
  double kl = 0.0;
};

struct TrainingTrace {
  std::vector<TrainingRow> rows;
  double initial_sfa = 0.0;
  double final_sfa = 0.0;
  std::vector<double> initial_probs;
  std::vector<double> final_probs;
};

struct ToyTrainOptions {
  std::size_t steps = 500;
  std::uint64_t seed = 0;
  double sampling_temperature = 1.0;
};

// Runs GRPO on the toy policy in place. Each iteration samples a group from
// the frozen old policy, scores it with the reward pipeline, normalizes
// advantages and takes inner_steps analytic-gradient ascent steps. The
// reference policy is the policy at entry. Throws kDivergenceDetected when
// the objective becomes non-finite.
TrainingTrace toy_train(const FactWorld& world, ToyPolicy& policy, const GrpoConfig& cfg,
                        const rewards::RewardConfig& reward_cfg, const ToyTrainOptions& options,
                        factcheck::FactScorer& scorer, Embedder& embedder);

// Convenience overload using StepTableScorer and HashingEmbedder.
TrainingTrace toy_train(const FactWorld& world, ToyPolicy& policy, const GrpoConfig& cfg,
                        const rewards::RewardConfig& reward_cfg, const ToyTrainOptions& options);

// One JSON object per row: {step, objective, mean_reward, sfa, kl}.
std::string training_trace_jsonl(const TrainingTrace& trace);

}  // namespace factstep::grpo
