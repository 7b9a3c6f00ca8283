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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "factstep/augment.hpp"
#include "factstep/chains.hpp"
#include "factstep/grpo.hpp"
#include "factstep/harness.hpp"
#include "factstep/rewards.hpp"

namespace factstep::config {

using Value = std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>>;

// "section.key" -> value. Keys before the first [section] have no prefix.
using Document = std::map<std::string, Value>;

// TOML-style subset: [section] headers, key = value lines, # comments.
// Values: true/false, numbers, "strings" with \n \t \" \\ escapes, and
// single-line arrays of numbers or of strings. Throws kParseError.
Document parse(std::string_view text);

struct Endpoints {
  std::string ner;
  std::string scorer;
  std::string embedder;
  std::string generator;
};

struct SweepSettings {
  std::vector<double> temperatures = harness::default_temperatures();
  std::size_t samples_per_temp = 4;
  double tau = 0.5;
  std::size_t parallelism = 1;
};

struct AppConfig {
  rewards::RewardConfig reward;
  grpo::GrpoConfig grpo;
  chains::DelimiterSet delimiters;
  augment::DatasetOptions dataset;
  SweepSettings sweep;
  Endpoints endpoints;
};

// Overlays the document on defaults. Unknown keys and mistyped values throw
// kParseError; the result is validated.
AppConfig from_document(const Document& doc);
AppConfig load(const std::filesystem::path& path);

// Snapshot of every setting, for run manifests.
std::string to_json(const AppConfig& cfg);

}  // namespace factstep::config
