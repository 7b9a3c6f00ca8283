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

#include "factstep/chains.hpp"
#include "factstep/factcheck.hpp"
#include "factstep/grpo.hpp"

namespace factstep::harness {

// Fraction of true verdicts. Throws kEmptyChain.
double sfa(const std::vector<bool>& verdicts);

struct StepDiagnostic {
  std::string step;
  double probability = 0.0;
  bool degenerate = false;
  bool factual = false;
};

struct ChainEvaluation {
  std::vector<StepDiagnostic> steps;
  std::string final_answer;
  double sfa = 0.0;
};

// Parses raw, scores every step and judges it factual when p >= tau.
// Throws kMalformedResponse or kScorerUnavailable.
ChainEvaluation evaluate_chain(std::string_view question, std::string_view raw,
                               factcheck::FactScorer& scorer, double tau,
                               const chains::DelimiterSet& delims = {});

inline const std::vector<double>& default_temperatures() {
  static const std::vector<double> kTemps{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0};
  return kTemps;
}

struct SweepOptions {
  std::vector<double> temperatures = default_temperatures();
  std::size_t samples_per_temp = 4;
  std::uint64_t seed = 0;
  double tau = 0.5;
  // Worker threads; the sampler and scorer must tolerate concurrent calls.
  std::size_t parallelism = 1;
  chains::DelimiterSet delims;
};

struct SweepSample {
  std::size_t question_index = 0;
  double temperature = 0.0;
  std::size_t sample_index = 0;
  std::string text;
  bool malformed = false;
  double sfa = 0.0;
};

struct TemperatureStats {
  double temperature = 0.0;
  double accuracy = 0.0;  // mean chain SFA over well-formed samples
  double variance = 0.0;  // population variance of those SFAs
  std::size_t sample_count = 0;
  std::size_t malformed = 0;
};

struct SweepResult {
  std::vector<double> temperatures;
  std::vector<TemperatureStats> per_temperature;
  double overall_accuracy = 0.0;  // sample-weighted mean
  double overall_variance = 0.0;  // pooled population variance of all SFAs
  // Population variance of per-temperature accuracies (temperatures with
  // at least one well-formed sample).
  double cross_temperature_variance = 0.0;
  std::vector<SweepSample> samples;
};

// Population variance; 0 for fewer than two values.
double population_variance(const std::vector<double>& values);

// For each (question, temperature) draws samples_per_temp completions with
// seed mix_seed(seed, question, temperature index) and evaluates them.
// Malformed completions are counted, not scored. Throws kGeneratorUnavailable
// when the sampler returns the wrong number of completions.
SweepResult temperature_sweep(grpo::CompletionSampler& generator, factcheck::FactScorer& scorer,
                              const std::vector<std::string>& questions,
                              const SweepOptions& options);

std::string sweep_to_json(const SweepResult& r, bool include_samples = false);
SweepResult sweep_from_json(std::string_view text);

}  // namespace factstep::harness
