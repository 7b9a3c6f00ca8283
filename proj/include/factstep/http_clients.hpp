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

#include <string>
#include <string_view>
#include <vector>

#include "factstep/augment.hpp"
#include "factstep/embedding.hpp"
#include "factstep/factcheck.hpp"
#include "factstep/grpo.hpp"

namespace factstep::http {

// "http://host:port/path" split into its parts. Throws kInvalidArgument.
struct Url {
  std::string host;
  int port = 80;
  std::string path = "/";
};
Url parse_url(std::string_view url);

// All clients POST a JSON body and expect a JSON reply. Transport failures,
// non-200 replies and malformed bodies raise the client's *Unavailable code.
// A fresh connection is opened per call, so the clients are thread-safe.

// {"text"} -> {"spans": [{"surface", "type", "start", "end"}]}
class HttpEntityProvider : public augment::EntityProvider {
 public:
  explicit HttpEntityProvider(std::string url, int timeout_seconds = 30);
  std::vector<augment::EntitySpan> find(std::string_view text) const override;
  std::string identity() const override { return "http-ner:" + url_; }

 private:
  std::string url_;
  int timeout_;
};

// {"question", "step"} -> {"probability"}
class HttpFactScorer : public factcheck::FactScorer {
 public:
  explicit HttpFactScorer(std::string url, int timeout_seconds = 30);
  factcheck::FactProbability score(std::string_view question, std::string_view step) override;
  std::string identity() const override { return "http-scorer:" + url_; }

 private:
  std::string url_;
  int timeout_;
};

// {"text"} -> {"vector": [...]}
class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(std::string url, int timeout_seconds = 30);
  std::vector<double> embed(std::string_view text) override;
  std::string identity() const override { return "http-embedder:" + url_; }

 private:
  std::string url_;
  int timeout_;
};

// {"prompt", "n", "temperature", "seed"} -> {"completions": [{"text", "logprob"}]}
class HttpCompletionSampler : public grpo::CompletionSampler {
 public:
  explicit HttpCompletionSampler(std::string url, int timeout_seconds = 120);
  std::vector<grpo::Completion> sample(std::string_view prompt, std::size_t n, double temperature,
                                       std::uint64_t seed) override;
  std::string identity() const override { return "http-generator:" + url_; }

 private:
  std::string url_;
  int timeout_;
};

}  // namespace factstep::http
