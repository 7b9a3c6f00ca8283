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

#include "factstep/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "factstep/error.hpp"

namespace factstep::grpo {

void GrpoConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(Errc::kInvalidArgument, "epsilon must lie in (0, 1)");
  if (!(beta_kl >= 0.0)) fail(Errc::kInvalidArgument, "beta_kl must be >= 0");
  if (group_size < 2) fail(Errc::kInvalidArgument, "group_size must be >= 2");
  if (!(learning_rate >= 0.0)) fail(Errc::kInvalidArgument, "learning_rate must be >= 0");
  if (!(std_floor > 0.0)) fail(Errc::kInvalidArgument, "std_floor must be > 0");
  if (inner_steps == 0) fail(Errc::kInvalidArgument, "inner_steps must be >= 1");
}

void CompletionGroup::check() const {
  const std::size_t g = completions.size();
  if (g == 0) fail(Errc::kShapeMismatch, "empty group");
  if (rewards.size() != g || advantages.size() != g || logprob_new.size() != g ||
      logprob_old.size() != g || logprob_ref.size() != g) {
    fail(Errc::kShapeMismatch, "group fields differ in length");
  }
}

std::vector<double> normalize_advantages(const std::vector<double>& rewards,
                                         const GrpoConfig& cfg) {
  const std::size_t g = rewards.size();
  std::vector<double> adv(g, 0.0);
  if (g < 2) return adv;
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  const bool constant = std::all_of(rewards.begin(), rewards.end(),
                                    [&](double r) { return r == rewards.front(); });
  if (constant) return adv;
  const double scale = std::sqrt(var) + cfg.std_floor;
  for (std::size_t i = 0; i < g; ++i) adv[i] = (rewards[i] - mean) / scale;
  return adv;
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  if (!(ratio > 0.0)) fail(Errc::kNonpositiveRatio, "ratio " + std::to_string(ratio));
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double clipped_surrogate_dlogp(double ratio, double advantage, double epsilon) {
  if (!(ratio > 0.0)) fail(Errc::kNonpositiveRatio, "ratio " + std::to_string(ratio));
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  if (ratio * advantage <= clipped * advantage) return ratio * advantage;
  return 0.0;
}

double kl_penalty(double prob_ref, double prob_theta) {
  if (!(prob_ref > 0.0) || !(prob_theta > 0.0)) {
    fail(Errc::kNonpositiveProbability, "probabilities must be > 0");
  }
  return kl_penalty_log(std::log(prob_ref), std::log(prob_theta));
}

double kl_penalty_log(double logprob_ref, double logprob_theta) {
  const double log_rho = logprob_ref - logprob_theta;
  if (!std::isfinite(log_rho)) fail(Errc::kNonpositiveProbability, "non-finite log ratio");
  // expm1 keeps precision near rho = 1.
  return std::expm1(log_rho) - log_rho;
}

namespace {

double group_kl(const CompletionGroup& g, const GrpoConfig& cfg) {
  const double n = static_cast<double>(g.size());
  if (cfg.kl_placement == KlPlacement::kPerCompletion) {
    double kl = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) kl += kl_penalty_log(g.logprob_ref[i], g.logprob_new[i]);
    return kl / n;
  }
  double mean_log_rho = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) mean_log_rho += g.logprob_ref[i] - g.logprob_new[i];
  mean_log_rho /= n;
  return std::expm1(mean_log_rho) - mean_log_rho;
}

}  // namespace

ObjectiveTerms grpo_objective_terms(const CompletionGroup& group, const GrpoConfig& cfg) {
  group.check();
  ObjectiveTerms t;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double ratio = std::exp(group.logprob_new[i] - group.logprob_old[i]);
    t.surrogate += clipped_surrogate(ratio, group.advantages[i], cfg.epsilon);
  }
  t.surrogate /= static_cast<double>(group.size());
  t.kl = group_kl(group, cfg);
  t.objective = t.surrogate - cfg.beta_kl * t.kl;
  return t;
}

double grpo_objective(const CompletionGroup& group, const GrpoConfig& cfg) {
  return grpo_objective_terms(group, cfg).objective;
}

std::vector<double> grpo_objective_dlogp(const CompletionGroup& group, const GrpoConfig& cfg) {
  group.check();
  const std::size_t g = group.size();
  const double n = static_cast<double>(g);
  std::vector<double> d(g);
  double mean_log_rho = 0.0;
  for (std::size_t i = 0; i < g; ++i) mean_log_rho += group.logprob_ref[i] - group.logprob_new[i];
  mean_log_rho /= n;
  for (std::size_t i = 0; i < g; ++i) {
    const double ratio = std::exp(group.logprob_new[i] - group.logprob_old[i]);
    d[i] = clipped_surrogate_dlogp(ratio, group.advantages[i], cfg.epsilon) / n;
    // d(rho - log rho - 1)/d logp_theta = 1 - rho
    if (cfg.kl_placement == KlPlacement::kPerCompletion) {
      const double rho = std::exp(group.logprob_ref[i] - group.logprob_new[i]);
      d[i] -= cfg.beta_kl * (1.0 - rho) / n;
    } else {
      d[i] -= cfg.beta_kl * (1.0 - std::exp(mean_log_rho)) / n;
    }
  }
  return d;
}

CompletionGroup sample_group(CompletionSampler& sampler, std::string_view query, std::size_t g,
                             double temperature, Rng& rng, const RefLogProb& ref) {
  if (g == 0) fail(Errc::kInvalidArgument, "group size must be >= 1");
  auto completions = sampler.sample(query, g, temperature, rng.next_u64());
  if (completions.size() != g) {
    fail(Errc::kGeneratorUnavailable, sampler.identity() + " returned " +
                                          std::to_string(completions.size()) + " of " +
                                          std::to_string(g) + " completions");
  }
  CompletionGroup group;
  group.query = std::string(query);
  for (auto& c : completions) {
    group.logprob_old.push_back(c.logprob);
    group.logprob_new.push_back(c.logprob);
    group.logprob_ref.push_back(ref ? ref(query, c.text) : c.logprob);
    group.completions.push_back(std::move(c.text));
  }
  group.rewards.assign(g, 0.0);
  group.advantages.assign(g, 0.0);
  return group;
}

std::vector<double> ToyPolicy::log_probs() const {
  if (logits.empty()) fail(Errc::kInvalidArgument, "empty policy");
  if (!(temperature > 0.0)) fail(Errc::kInvalidArgument, "policy temperature must be > 0");
  std::vector<double> z(logits.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    z[i] = logits[i] / temperature;
    mx = std::max(mx, z[i]);
  }
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  for (auto& v : z) v -= lse;
  return z;
}

std::vector<double> ToyPolicy::probs() const {
  auto lp = log_probs();
  for (auto& v : lp) v = std::exp(v);
  return lp;
}

std::vector<double> sampling_distribution(const ToyPolicy& policy, double temperature) {
  if (temperature < 0.0) fail(Errc::kInvalidArgument, "temperature must be >= 0");
  if (temperature == 0.0) {
    std::vector<double> p(policy.logits.size(), 0.0);
    const auto best = std::max_element(policy.logits.begin(), policy.logits.end());
    p[static_cast<std::size_t>(best - policy.logits.begin())] = 1.0;
    return p;
  }
  ToyPolicy tempered{policy.logits, temperature};
  return tempered.probs();
}

std::vector<std::size_t> ToyPolicySampler::sample_indices(std::size_t n, double temperature,
                                                          std::uint64_t seed) const {
  const auto p = sampling_distribution(policy_, temperature);
  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    double u = rng.uniform01();
    std::size_t i = 0;
    for (; i + 1 < p.size(); ++i) {
      if (u < p[i]) break;
      u -= p[i];
    }
    out.push_back(i);
  }
  return out;
}

std::vector<Completion> ToyPolicySampler::sample(std::string_view, std::size_t n,
                                                 double temperature, std::uint64_t seed) {
  if (alphabet_.size() != policy_.logits.size()) {
    fail(Errc::kGeneratorUnavailable, "alphabet and policy sizes differ");
  }
  const auto lp = policy_.log_probs();
  std::vector<Completion> out;
  for (std::size_t i : sample_indices(n, temperature, seed)) {
    out.push_back({alphabet_[i], lp[i]});
  }
  return out;
}

namespace {

CompletionGroup as_group(const ToyPolicy& policy, const ToyGroup& toy) {
  const auto lp = policy.log_probs();
  CompletionGroup g;
  for (std::size_t k = 0; k < toy.indices.size(); ++k) {
    const std::size_t i = toy.indices.at(k);
    if (i >= lp.size()) fail(Errc::kShapeMismatch, "completion index out of range");
    g.completions.push_back(std::to_string(i));
    g.logprob_new.push_back(lp[i]);
  }
  g.advantages = toy.advantages;
  g.logprob_old = toy.logprob_old;
  g.logprob_ref = toy.logprob_ref;
  g.rewards.assign(toy.indices.size(), 0.0);
  return g;
}

}  // namespace

double toy_objective(const ToyPolicy& policy, const ToyGroup& group, const GrpoConfig& cfg) {
  return grpo_objective(as_group(policy, group), cfg);
}

std::vector<double> toy_objective_gradient(const ToyPolicy& policy, const ToyGroup& group,
                                           const GrpoConfig& cfg) {
  const auto dlogp = grpo_objective_dlogp(as_group(policy, group), cfg);
  const auto p = policy.probs();
  std::vector<double> grad(p.size(), 0.0);
  // d log pi(o) / d logit_k = (1[k == o] - pi_k) / temperature
  for (std::size_t k = 0; k < group.indices.size(); ++k) {
    const std::size_t o = group.indices[k];
    for (std::size_t j = 0; j < p.size(); ++j) {
      grad[j] += dlogp[k] * ((j == o ? 1.0 : 0.0) - p[j]) / policy.temperature;
    }
  }
  return grad;
}

}  // namespace factstep::grpo
