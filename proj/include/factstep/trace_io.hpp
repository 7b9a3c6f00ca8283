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

#include <filesystem>
#include <string>
#include <string_view>

#include "factstep/trajectory.hpp"

namespace factstep::trajectory {

inline constexpr std::string_view kTraceMagic = "RLTRACE1";

// Header line (JSON, newline-terminated) followed by L*N*H float32
// little-endian values, layer-major, token-major, dimension-minor.
std::string encode_trace(const ActivationTrace& trace);
// Throws kParseError on a bad header, wrong magic/dtype or truncated data.
ActivationTrace decode_trace(std::string_view bytes);

void write_trace(const std::filesystem::path& path, const ActivationTrace& trace);
ActivationTrace read_trace(const std::filesystem::path& path);

}  // namespace factstep::trajectory
