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

#include "factstep/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep {

HashingEmbedder::HashingEmbedder(std::size_t dim, std::size_t ngram)
    : dim_(dim), ngram_(ngram) {
  if (dim_ == 0 || ngram_ == 0) fail(Errc::kInvalidArgument, "dim and ngram must be > 0");
}

std::vector<double> HashingEmbedder::embed(std::string_view text) {
  std::vector<double> v(dim_, 0.0);
  std::string padded;
  padded.reserve(text.size() + 2);
  padded.push_back('\x02');
  padded.append(text);
  padded.push_back('\x03');
  const std::size_t n = std::min(ngram_, padded.size());
  for (std::size_t i = 0; i + n <= padded.size(); ++i) {
    v[fnv1a64(std::string_view(padded).substr(i, n)) % dim_] += 1.0;
  }
  return v;
}

std::string HashingEmbedder::identity() const {
  return "hashing-embedder:dim=" + std::to_string(dim_) + ":n=" + std::to_string(ngram_);
}

Similarity cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    fail(Errc::kShapeMismatch, "embedding dimensions " + std::to_string(a.size()) + " vs " +
                                   std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  return {std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0), false};
}

}  // namespace factstep
