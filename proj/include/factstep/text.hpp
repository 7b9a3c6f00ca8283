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
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace factstep {

std::string_view trim(std::string_view s);

// Counts maximal runs of non-whitespace characters.
std::size_t count_whitespace_tokens(std::string_view s);

// Pluggable token counter; the default splits on whitespace.
using TokenCounter = std::function<std::size_t(std::string_view)>;
TokenCounter whitespace_tokenizer();

std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_text_file(const std::filesystem::path& path);
// Throws Error(kWriteFailure) when the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view data);

std::vector<std::string> split_lines(std::string_view text);

}  // namespace factstep
