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

#include "factstep/fixtures.hpp"

#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::fixtures {

factcheck::FactProbability RecordingFactScorer::score(std::string_view question,
                                                      std::string_view step) {
  const auto p = inner_.score(question, step);
  std::lock_guard lock(mu_);
  table_[{std::string(question), std::string(step)}] = p;
  return p;
}

std::string RecordingFactScorer::to_jsonl() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& [key, p] : table_) {
    nlohmann::ordered_json j;
    j["question"] = key.first;
    j["step"] = key.second;
    j["probability"] = p.value;
    j["degenerate"] = p.degenerate;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void RecordingFactScorer::save(const std::filesystem::path& path) const {
  write_text_file(path, to_jsonl());
}

ReplayFactScorer ReplayFactScorer::from_jsonl(std::string_view text, std::string identity) {
  ReplayFactScorer r;
  r.identity_ = std::move(identity);
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      r.table_[{j.at("question").get<std::string>(), j.at("step").get<std::string>()}] = {
          j.at("probability").get<double>(), j.value("degenerate", false)};
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::kParseError, std::string("scorer fixture: ") + e.what());
    }
  }
  return r;
}

ReplayFactScorer ReplayFactScorer::load(const std::filesystem::path& path) {
  return from_jsonl(read_text_file(path), "replay:" + path.filename().string());
}

factcheck::FactProbability ReplayFactScorer::score(std::string_view question,
                                                   std::string_view step) {
  const auto it = table_.find(std::pair<std::string, std::string>(question, step));
  if (it == table_.end()) fail(Errc::kScorerUnavailable, "no recorded score for step");
  return it->second;
}

namespace {

nlohmann::ordered_json completions_json(const std::vector<grpo::Completion>& cs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : cs) arr.push_back({{"text", c.text}, {"logprob", c.logprob}});
  return arr;
}

}  // namespace

std::vector<grpo::Completion> RecordingSampler::sample(std::string_view prompt, std::size_t n,
                                                       double temperature, std::uint64_t seed) {
  auto out = inner_.sample(prompt, n, temperature, seed);
  std::lock_guard lock(mu_);
  table_[{std::string(prompt), n, temperature, seed}] = out;
  return out;
}

std::string RecordingSampler::to_jsonl() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& [key, cs] : table_) {
    nlohmann::ordered_json j;
    j["prompt"] = std::get<0>(key);
    j["n"] = std::get<1>(key);
    j["temperature"] = std::get<2>(key);
    j["seed"] = std::get<3>(key);
    j["completions"] = completions_json(cs);
    out += j.dump();
    out += '\n';
  }
  return out;
}

void RecordingSampler::save(const std::filesystem::path& path) const {
  write_text_file(path, to_jsonl());
}

ReplaySampler ReplaySampler::from_jsonl(std::string_view text, std::string identity) {
  ReplaySampler r;
  r.identity_ = std::move(identity);
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      std::vector<grpo::Completion> cs;
      for (const auto& c : j.at("completions")) {
        cs.push_back({c.at("text").get<std::string>(), c.value("logprob", 0.0)});
      }
      r.table_[{j.at("prompt").get<std::string>(), j.at("n").get<std::size_t>(),
                j.at("temperature").get<double>(), j.at("seed").get<std::uint64_t>()}] =
          std::move(cs);
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::kParseError, std::string("sampler fixture: ") + e.what());
    }
  }
  return r;
}

ReplaySampler ReplaySampler::load(const std::filesystem::path& path) {
  return from_jsonl(read_text_file(path), "replay:" + path.filename().string());
}

std::vector<grpo::Completion> ReplaySampler::sample(std::string_view prompt, std::size_t n,
                                                    double temperature, std::uint64_t seed) {
  const auto it = table_.find({std::string(prompt), n, temperature, seed});
  if (it == table_.end()) fail(Errc::kGeneratorUnavailable, "no recorded completions for request");
  return it->second;
}

}  // namespace factstep::fixtures
