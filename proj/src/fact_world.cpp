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

#include "factstep/fact_world.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "factstep/chains.hpp"
#include "factstep/error.hpp"

namespace factstep::grpo {

double CandidateChain::sfa() const {
  if (step_factual.empty()) return 0.0;
  std::size_t good = 0;
  for (bool f : step_factual) good += f ? 1 : 0;
  return static_cast<double>(good) / static_cast<double>(step_factual.size());
}

std::vector<std::string> FactWorld::alphabet() const {
  std::vector<std::string> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(c.raw);
  return out;
}

std::optional<std::size_t> FactWorld::index_of(std::string_view raw) const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].raw == raw) return i;
  }
  return std::nullopt;
}

double FactWorld::expected_sfa(const std::vector<double>& probs) const {
  if (probs.size() != candidates.size()) fail(Errc::kShapeMismatch, "policy size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) s += probs[i] * candidates[i].sfa();
  return s;
}

FactWorld make_fact_world() {
  struct StepVariants {
    std::string factual;
    std::string counterfactual;
  };
  static const std::vector<StepVariants> kSteps = {
      {"First, Albert Einstein received the Nobel Prize in Physics in 1921 for explaining "
       "the photoelectric effect.",
       "First, Albert Einstein received the Nobel Prize in Physics in 1915 for explaining "
       "the photoelectric effect."},
      {"Next, the Nobel Prize in Physics for 1922 was awarded to Niels Bohr for his work "
       "on atomic structure.",
       "Next, the Nobel Prize in Physics for 1922 was awarded to Max Planck for his work "
       "on atomic structure."},
      {"Next, Niels Bohr was born in Copenhagen in 1885 and later founded an institute "
       "for theoretical physics there.",
       "Next, Niels Bohr was born in Stockholm in 1885 and later founded an institute "
       "for theoretical physics there."},
      {"Finally, the award ceremony honouring Niels Bohr took place in Stockholm in "
       "December 1922 as is customary.",
       "Finally, the award ceremony honouring Niels Bohr took place in Oslo in December "
       "1922 as is customary."},
  };

  FactWorld world;
  world.question = "Who won the Nobel Prize in Physics the year after Albert Einstein?";
  world.reference_answer = "Niels Bohr";

  auto build = [&](unsigned mask, bool correct_answer, bool boxed) {
    CandidateChain c;
    for (std::size_t k = 0; k < kSteps.size(); ++k) {
      const bool factual = ((mask >> k) & 1U) != 0;
      c.steps.push_back(factual ? kSteps[k].factual : kSteps[k].counterfactual);
      c.step_factual.push_back(factual);
    }
    const std::string answer = correct_answer ? "Niels Bohr" : "Max Planck";
    c.raw = std::string(chains::kThinkOpen) + chains::join_steps(c.steps) +
            std::string(chains::kThinkClose) + " The answer is " +
            (boxed ? "boxed{" + answer + "}" : answer) + ".";
    c.answer_correct = correct_answer;
    c.well_formed = boxed;
    return c;
  };

  for (unsigned mask = 0; mask < 16; ++mask) {
    for (bool correct : {true, false}) world.candidates.push_back(build(mask, correct, true));
  }
  for (unsigned mask : {15U, 7U, 3U, 0U}) world.candidates.push_back(build(mask, true, false));
  return world;
}

StepTableScorer::StepTableScorer(const FactWorld& world, Levels levels) : levels_(levels) {
  for (const auto& c : world.candidates) {
    for (std::size_t k = 0; k < c.steps.size(); ++k) table_[c.steps[k]] = c.step_factual[k];
  }
}

factcheck::FactProbability StepTableScorer::score(std::string_view, std::string_view step) {
  const auto it = table_.find(step);
  if (it == table_.end()) return {levels_.p_unknown, false};
  return {it->second ? levels_.p_true : levels_.p_false, false};
}

TrainingTrace toy_train(const FactWorld& world, ToyPolicy& policy, const GrpoConfig& cfg,
                        const rewards::RewardConfig& reward_cfg, const ToyTrainOptions& options,
                        factcheck::FactScorer& scorer, Embedder& embedder) {
  cfg.validate();
  reward_cfg.validate();
  if (policy.logits.size() != world.candidates.size()) {
    fail(Errc::kShapeMismatch, "policy does not cover the candidate table");
  }

  std::vector<double> reward_of(world.candidates.size());
  for (std::size_t i = 0; i < world.candidates.size(); ++i) {
    reward_of[i] = rewards::score_response({world.question, world.candidates[i].raw,
                                            world.reference_answer},
                                           scorer, embedder, reward_cfg)
                       .total;
  }

  const std::vector<double> logprob_ref = policy.log_probs();
  Rng rng(options.seed);
  ToyPolicySampler sampler(policy, world.alphabet());

  TrainingTrace trace;
  trace.initial_probs = policy.probs();
  trace.initial_sfa = world.expected_sfa(trace.initial_probs);

  for (std::size_t step = 0; step < options.steps; ++step) {
    const std::vector<double> logprob_old = policy.log_probs();
    ToyGroup group;
    group.indices =
        sampler.sample_indices(cfg.group_size, options.sampling_temperature, rng.next_u64());
    std::vector<double> group_rewards;
    for (std::size_t i : group.indices) {
      group_rewards.push_back(reward_of[i]);
      group.logprob_old.push_back(logprob_old[i]);
      group.logprob_ref.push_back(logprob_ref[i]);
    }
    group.advantages = normalize_advantages(group_rewards, cfg);

    for (std::size_t inner = 0; inner < cfg.inner_steps; ++inner) {
      const auto grad = toy_objective_gradient(policy, group, cfg);
      for (std::size_t k = 0; k < grad.size(); ++k) policy.logits[k] += cfg.learning_rate * grad[k];
    }

    CompletionGroup g;
    const auto lp = policy.log_probs();
    for (std::size_t k = 0; k < group.indices.size(); ++k) {
      g.completions.push_back(world.candidates[group.indices[k]].raw);
      g.logprob_new.push_back(lp[group.indices[k]]);
    }
    g.query = world.question;
    g.rewards = group_rewards;
    g.advantages = group.advantages;
    g.logprob_old = group.logprob_old;
    g.logprob_ref = group.logprob_ref;
    const ObjectiveTerms terms = grpo_objective_terms(g, cfg);
    if (!std::isfinite(terms.objective)) {
      fail(Errc::kDivergenceDetected, "objective is not finite at step " + std::to_string(step));
    }

    TrainingRow row;
    row.step = step;
    row.objective = terms.objective;
    row.kl = terms.kl;
    double mean = 0.0;
    for (double r : group_rewards) mean += r;
    row.mean_reward = mean / static_cast<double>(group_rewards.size());
    row.sfa = world.expected_sfa(policy.probs());
    trace.rows.push_back(row);
  }

  trace.final_probs = policy.probs();
  trace.final_sfa = world.expected_sfa(trace.final_probs);
  return trace;
}

TrainingTrace toy_train(const FactWorld& world, ToyPolicy& policy, const GrpoConfig& cfg,
                        const rewards::RewardConfig& reward_cfg, const ToyTrainOptions& options) {
  StepTableScorer scorer(world);
  HashingEmbedder embedder;
  return toy_train(world, policy, cfg, reward_cfg, options, scorer, embedder);
}

std::string training_trace_jsonl(const TrainingTrace& trace) {
  std::string out;
  for (const auto& r : trace.rows) {
    nlohmann::ordered_json j;
    j["step"] = r.step;
    j["objective"] = r.objective;
    j["mean_reward"] = r.mean_reward;
    j["sfa"] = r.sfa;
    j["kl"] = r.kl;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace factstep::grpo
