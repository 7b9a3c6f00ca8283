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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factstep/rng.hpp"

namespace factstep::grpo {

enum class KlPlacement {
  // -beta * (1/G) * sum_i KL_i, the estimator evaluated per completion.
  kPerCompletion,
  // -beta * KL evaluated once at the group's geometric-mean reference ratio.
  kOutsideSum,
};

struct GrpoConfig {
  double epsilon = 0.2;
  double beta_kl = 0.04;
  std::size_t group_size = 8;
  double learning_rate = 0.5;
  double std_floor = 1e-8;
  // Gradient steps taken on each sampled group before re-sampling.
  std::size_t inner_steps = 2;
  KlPlacement kl_placement = KlPlacement::kPerCompletion;

  void validate() const;
};

struct CompletionGroup {
  std::string query;
  std::vector<std::string> completions;
  std::vector<double> rewards;
  std::vector<double> advantages;
  // Sequence log-probabilities (summed over tokens).
  std::vector<double> logprob_new;
  std::vector<double> logprob_old;
  std::vector<double> logprob_ref;

  std::size_t size() const { return completions.size(); }
  // Throws kShapeMismatch unless every list has the same length G >= 1.
  void check() const;
};

// (r - mean) / (population std + std_floor); constant groups and G = 1
// give zeros.
std::vector<double> normalize_advantages(const std::vector<double>& rewards,
                                         const GrpoConfig& cfg);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A). Throws kNonpositiveRatio.
double clipped_surrogate(double ratio, double advantage, double epsilon);

// d clipped_surrogate / d log pi_new: ratio * A on the unclipped branch,
// zero where the clipped branch is the active minimum.
double clipped_surrogate_dlogp(double ratio, double advantage, double epsilon);

// rho - log(rho) - 1 with rho = prob_ref / prob_theta.
// Throws kNonpositiveProbability.
double kl_penalty(double prob_ref, double prob_theta);
double kl_penalty_log(double logprob_ref, double logprob_theta);

struct ObjectiveTerms {
  double objective = 0.0;
  double surrogate = 0.0;  // mean clipped surrogate
  double kl = 0.0;         // KL term before the beta factor
};

ObjectiveTerms grpo_objective_terms(const CompletionGroup& group, const GrpoConfig& cfg);
double grpo_objective(const CompletionGroup& group, const GrpoConfig& cfg);

// d objective / d logprob_new[i] for each completion.
std::vector<double> grpo_objective_dlogp(const CompletionGroup& group, const GrpoConfig& cfg);

struct Completion {
  std::string text;
  double logprob = 0.0;
};

// Samples n completions for a prompt. Implementations must be deterministic
// for a fixed seed and safe to call concurrently.
class CompletionSampler {
 public:
  virtual ~CompletionSampler() = default;
  virtual std::vector<Completion> sample(std::string_view prompt, std::size_t n,
                                         double temperature, std::uint64_t seed) = 0;
  virtual std::string identity() const = 0;
};

using RefLogProb = std::function<double(std::string_view prompt, std::string_view completion)>;

// Draws G completions from the sampler (pi_theta_old). logprob_new starts
// equal to logprob_old; logprob_ref comes from ref when given, otherwise it
// equals logprob_old. Throws kGeneratorUnavailable on a short response.
CompletionGroup sample_group(CompletionSampler& sampler, std::string_view query, std::size_t g,
                             double temperature, Rng& rng, const RefLogProb& ref = {});

// Softmax policy over a finite completion alphabet.
struct ToyPolicy {
  std::vector<double> logits;
  double temperature = 1.0;

  std::vector<double> probs() const;
  std::vector<double> log_probs() const;
};

// Distribution used to draw at a given sampling temperature; temperature 0
// puts all mass on the first argmax.
std::vector<double> sampling_distribution(const ToyPolicy& policy, double temperature);

class ToyPolicySampler : public CompletionSampler {
 public:
  ToyPolicySampler(const ToyPolicy& policy, std::vector<std::string> alphabet)
      : policy_(policy), alphabet_(std::move(alphabet)) {}

  std::vector<Completion> sample(std::string_view prompt, std::size_t n, double temperature,
                                 std::uint64_t seed) override;
  std::vector<std::size_t> sample_indices(std::size_t n, double temperature,
                                          std::uint64_t seed) const;
  std::string identity() const override { return "toy-policy-sampler"; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }

 private:
  const ToyPolicy& policy_;
  std::vector<std::string> alphabet_;
};

// A toy GRPO instance: sampled indices into the policy alphabet with their
// advantages and frozen old / reference log-probabilities.
struct ToyGroup {
  std::vector<std::size_t> indices;
  std::vector<double> advantages;
  std::vector<double> logprob_old;
  std::vector<double> logprob_ref;
};

double toy_objective(const ToyPolicy& policy, const ToyGroup& group, const GrpoConfig& cfg);
// Analytic gradient of toy_objective with respect to the policy logits.
std::vector<double> toy_objective_gradient(const ToyPolicy& policy, const ToyGroup& group,
                                           const GrpoConfig& cfg);

}  // namespace factstep::grpo
