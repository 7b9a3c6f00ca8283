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

#include "factstep/trace_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::trajectory {

namespace {

void put_f32le(std::string& out, float v) {
  std::uint32_t u = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xFFU));
}

float get_f32le(const char* p) {
  std::uint32_t u = 0;
  for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return std::bit_cast<float>(u);
}

}  // namespace

std::string encode_trace(const ActivationTrace& trace) {
  trace.validate();
  nlohmann::ordered_json h;
  h["magic"] = kTraceMagic;
  h["L"] = trace.layer_count;
  h["N"] = trace.token_count;
  h["H"] = trace.hidden_dim;
  h["dtype"] = "f32le";
  h["step_spans"] = trace.step_spans;
  h["model_tag"] = trace.model_tag;
  h["prompt_id"] = trace.prompt_id;
  std::string out = h.dump();
  out.push_back('\n');
  out.reserve(out.size() + 4 * trace.hiddens.data.size());
  for (double v : trace.hiddens.data) put_f32le(out, static_cast<float>(v));
  return out;
}

ActivationTrace decode_trace(std::string_view bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) fail(Errc::kParseError, "trace header is not terminated");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.substr(0, nl));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kParseError, std::string("trace header: ") + e.what());
  }
  ActivationTrace tr;
  try {
    if (h.at("magic").get<std::string>() != kTraceMagic) fail(Errc::kParseError, "bad trace magic");
    if (h.at("dtype").get<std::string>() != "f32le") fail(Errc::kParseError, "unsupported dtype");
    tr.layer_count = h.at("L").get<std::size_t>();
    tr.token_count = h.at("N").get<std::size_t>();
    tr.hidden_dim = h.at("H").get<std::size_t>();
    tr.step_spans = h.at("step_spans").get<std::vector<std::vector<std::size_t>>>();
    tr.model_tag = h.value("model_tag", "");
    tr.prompt_id = h.value("prompt_id", "");
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kParseError, std::string("trace header: ") + e.what());
  }
  const std::size_t count = tr.layer_count * tr.token_count * tr.hidden_dim;
  const std::string_view body = bytes.substr(nl + 1);
  if (body.size() != 4 * count) {
    fail(Errc::kParseError, "expected " + std::to_string(4 * count) + " payload bytes, got " +
                                std::to_string(body.size()));
  }
  tr.hiddens = Tensor3(tr.layer_count, tr.token_count, tr.hidden_dim);
  for (std::size_t i = 0; i < count; ++i) tr.hiddens.data[i] = get_f32le(body.data() + 4 * i);
  tr.validate();
  return tr;
}

void write_trace(const std::filesystem::path& path, const ActivationTrace& trace) {
  write_text_file(path, encode_trace(trace));
}

ActivationTrace read_trace(const std::filesystem::path& path) {
  return decode_trace(read_text_file(path));
}

}  // namespace factstep::trajectory
