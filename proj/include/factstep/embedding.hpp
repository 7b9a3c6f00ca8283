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
#include <string>
#include <string_view>
#include <vector>

namespace factstep {

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
  virtual std::string identity() const = 0;
};

// Offline fallback: character n-grams of the text (padded with '\x02' and
// '\x03') hashed with FNV-1a into a fixed number of count buckets.
class HashingEmbedder : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  explicit HashingEmbedder(std::size_t dim = kDefaultDim, std::size_t ngram = 3);

  std::vector<double> embed(std::string_view text) override;
  std::string identity() const override;

 private:
  std::size_t dim_;
  std::size_t ngram_;
};

struct Similarity {
  double value = 0.0;
  // Either vector had zero norm; value is then 0.
  bool zero_vector = false;
};

// Throws kShapeMismatch on differing dimensions.
Similarity cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace factstep
