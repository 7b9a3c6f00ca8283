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
#include <string>
#include <vector>

namespace factstep {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config_json;  // full settings snapshot
  std::uint64_t seed = 0;
  std::map<std::string, std::string> dataset_hashes;      // input name -> fnv1a64 hex
  std::map<std::string, std::string> endpoint_identities;  // role -> identity
  std::map<std::string, std::string> artifact_versions;
  std::map<std::string, std::string> outputs;  // artifact name -> fnv1a64 hex
  std::string started_at;
  std::string finished_at;
};

// UTC timestamp, ISO 8601 with seconds.
std::string utc_now();

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(std::string_view text);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace factstep
