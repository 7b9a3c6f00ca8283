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

#include "factstep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/rng.hpp"

namespace factstep::harness {

double sfa(const std::vector<bool>& verdicts) {
  if (verdicts.empty()) fail(Errc::kEmptyChain, "no steps to judge");
  const auto good = std::count(verdicts.begin(), verdicts.end(), true);
  return static_cast<double>(good) / static_cast<double>(verdicts.size());
}

ChainEvaluation evaluate_chain(std::string_view question, std::string_view raw,
                               factcheck::FactScorer& scorer, double tau,
                               const chains::DelimiterSet& delims) {
  const auto trace = chains::parse_response(raw, question, delims);
  ChainEvaluation ev;
  ev.final_answer = trace.final_answer;
  std::vector<bool> verdicts;
  for (const auto& step : trace.steps) {
    const auto p = factcheck::fact_probability(scorer, question, step);
    StepDiagnostic d{step, p.value, p.degenerate, p.value >= tau};
    verdicts.push_back(d.factual);
    ev.steps.push_back(std::move(d));
  }
  ev.sfa = sfa(verdicts);
  return ev;
}

double population_variance(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return var / static_cast<double>(values.size());
}

SweepResult temperature_sweep(grpo::CompletionSampler& generator, factcheck::FactScorer& scorer,
                              const std::vector<std::string>& questions,
                              const SweepOptions& options) {
  if (options.temperatures.empty()) fail(Errc::kInvalidArgument, "no temperatures");
  if (questions.empty()) fail(Errc::kInvalidArgument, "no questions");
  if (options.samples_per_temp == 0) fail(Errc::kInvalidArgument, "samples_per_temp must be >= 1");

  const std::size_t n_temps = options.temperatures.size();
  const std::size_t n_tasks = questions.size() * n_temps;
  const std::size_t per = options.samples_per_temp;
  std::vector<SweepSample> samples(n_tasks * per);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      {
        std::lock_guard lock(error_mu);
        if (error) return;
      }
      try {
        const std::size_t q = task / n_temps;
        const std::size_t ti = task % n_temps;
        const double temp = options.temperatures[ti];
        auto completions =
            generator.sample(questions[q], per, temp, mix_seed(options.seed, q, ti));
        if (completions.size() != per) {
          fail(Errc::kGeneratorUnavailable,
               generator.identity() + " returned " + std::to_string(completions.size()) +
                   " of " + std::to_string(per) + " completions");
        }
        for (std::size_t k = 0; k < per; ++k) {
          SweepSample& s = samples[task * per + k];
          s.question_index = q;
          s.temperature = temp;
          s.sample_index = k;
          s.text = std::move(completions[k].text);
          try {
            s.sfa = evaluate_chain(questions[q], s.text, scorer, options.tau, options.delims).sfa;
          } catch (const Error& e) {
            if (e.code() != Errc::kMalformedResponse) throw;
            s.malformed = true;
          }
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.parallelism, 1, n_tasks);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SweepResult r;
  r.temperatures = options.temperatures;
  std::vector<double> all;
  std::vector<double> means;
  for (std::size_t ti = 0; ti < n_temps; ++ti) {
    TemperatureStats st;
    st.temperature = options.temperatures[ti];
    std::vector<double> vals;
    for (std::size_t q = 0; q < questions.size(); ++q) {
      for (std::size_t k = 0; k < per; ++k) {
        const SweepSample& s = samples[(q * n_temps + ti) * per + k];
        if (s.malformed) {
          ++st.malformed;
        } else {
          vals.push_back(s.sfa);
        }
      }
    }
    st.sample_count = vals.size();
    if (!vals.empty()) {
      for (double v : vals) st.accuracy += v;
      st.accuracy /= static_cast<double>(vals.size());
      st.variance = population_variance(vals);
      means.push_back(st.accuracy);
    }
    all.insert(all.end(), vals.begin(), vals.end());
    r.per_temperature.push_back(st);
  }
  if (!all.empty()) {
    for (double v : all) r.overall_accuracy += v;
    r.overall_accuracy /= static_cast<double>(all.size());
  }
  r.overall_variance = population_variance(all);
  r.cross_temperature_variance = population_variance(means);
  r.samples = std::move(samples);
  return r;
}

std::string sweep_to_json(const SweepResult& r, bool include_samples) {
  nlohmann::ordered_json j;
  j["temperatures"] = r.temperatures;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& t : r.per_temperature) {
    per.push_back({{"temperature", t.temperature},
                   {"accuracy", t.accuracy},
                   {"variance", t.variance},
                   {"sample_count", t.sample_count},
                   {"malformed", t.malformed}});
  }
  j["per_temperature"] = per;
  j["overall_accuracy"] = r.overall_accuracy;
  j["overall_variance"] = r.overall_variance;
  j["cross_temperature_variance"] = r.cross_temperature_variance;
  if (include_samples) {
    nlohmann::ordered_json s = nlohmann::ordered_json::array();
    for (const auto& x : r.samples) {
      s.push_back({{"question_index", x.question_index},
                   {"temperature", x.temperature},
                   {"sample_index", x.sample_index},
                   {"malformed", x.malformed},
                   {"sfa", x.sfa},
                   {"text", x.text}});
    }
    j["samples"] = s;
  }
  return j.dump(2);
}

SweepResult sweep_from_json(std::string_view text) {
  SweepResult r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.temperatures = j.at("temperatures").get<std::vector<double>>();
    for (const auto& t : j.at("per_temperature")) {
      TemperatureStats st;
      st.temperature = t.at("temperature").get<double>();
      st.accuracy = t.at("accuracy").get<double>();
      st.variance = t.value("variance", 0.0);
      st.sample_count = t.value("sample_count", std::size_t{0});
      st.malformed = t.value("malformed", std::size_t{0});
      r.per_temperature.push_back(st);
    }
    r.overall_accuracy = j.at("overall_accuracy").get<double>();
    r.overall_variance = j.value("overall_variance", 0.0);
    r.cross_temperature_variance = j.value("cross_temperature_variance", 0.0);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kParseError, std::string("sweep json: ") + e.what());
  }
  return r;
}

}  // namespace factstep::harness
