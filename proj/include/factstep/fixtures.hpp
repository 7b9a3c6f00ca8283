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

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "factstep/factcheck.hpp"
#include "factstep/grpo.hpp"

namespace factstep::fixtures {

// Stores every (question, step) -> probability seen by the wrapped scorer.
// JSONL: {"question", "step", "probability", "degenerate"}, sorted by key.
class RecordingFactScorer : public factcheck::FactScorer {
 public:
  explicit RecordingFactScorer(factcheck::FactScorer& inner) : inner_(inner) {}
  factcheck::FactProbability score(std::string_view question, std::string_view step) override;
  std::string identity() const override { return inner_.identity(); }
  std::string to_jsonl() const;
  void save(const std::filesystem::path& path) const;

 private:
  factcheck::FactScorer& inner_;
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, factcheck::FactProbability> table_;
};

// Answers from a recorded table; unknown keys raise kScorerUnavailable.
class ReplayFactScorer : public factcheck::FactScorer {
 public:
  static ReplayFactScorer from_jsonl(std::string_view text, std::string identity = "replay");
  static ReplayFactScorer load(const std::filesystem::path& path);
  factcheck::FactProbability score(std::string_view question, std::string_view step) override;
  std::string identity() const override { return identity_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::string identity_;
  std::map<std::pair<std::string, std::string>, factcheck::FactProbability, std::less<>> table_;
};

using SampleKey = std::tuple<std::string, std::size_t, double, std::uint64_t>;

// JSONL: {"prompt", "n", "temperature", "seed", "completions": [{"text", "logprob"}]}.
class RecordingSampler : public grpo::CompletionSampler {
 public:
  explicit RecordingSampler(grpo::CompletionSampler& inner) : inner_(inner) {}
  std::vector<grpo::Completion> sample(std::string_view prompt, std::size_t n, double temperature,
                                       std::uint64_t seed) override;
  std::string identity() const override { return inner_.identity(); }
  std::string to_jsonl() const;
  void save(const std::filesystem::path& path) const;

 private:
  grpo::CompletionSampler& inner_;
  mutable std::mutex mu_;
  std::map<SampleKey, std::vector<grpo::Completion>> table_;
};

// Unknown keys raise kGeneratorUnavailable.
class ReplaySampler : public grpo::CompletionSampler {
 public:
  static ReplaySampler from_jsonl(std::string_view text, std::string identity = "replay");
  static ReplaySampler load(const std::filesystem::path& path);
  std::vector<grpo::Completion> sample(std::string_view prompt, std::size_t n, double temperature,
                                       std::uint64_t seed) override;
  std::string identity() const override { return identity_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::string identity_;
  std::map<SampleKey, std::vector<grpo::Completion>> table_;
};

}  // namespace factstep::fixtures
