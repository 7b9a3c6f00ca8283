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

#include "factstep/chains.hpp"

#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::chains {

std::string_view ReasoningTrace::solution_text() const {
  const std::size_t start = think_span.end + kThinkClose.size();
  if (start > raw.size()) return {};
  return std::string_view(raw).substr(start);
}

std::size_t count_occurrences(std::string_view haystack,
                              std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::vector<std::string> segment_steps(std::string_view reasoning,
                                       const DelimiterSet& delims) {
  // Leftmost scan; at a position the longest matching delimiter wins.
  std::vector<std::size_t> cuts;
  std::size_t pos = 0;
  while (pos < reasoning.size()) {
    std::size_t matched = 0;
    for (const auto& d : delims.delimiters) {
      if (!d.empty() && d.size() > matched &&
          reasoning.substr(pos, d.size()) == d) {
        matched = d.size();
      }
    }
    if (matched > 0) {
      if (pos > 0) cuts.push_back(pos);
      pos += matched;
    } else {
      ++pos;
    }
  }

  std::vector<std::string_view> pieces;
  std::size_t start = 0;
  for (std::size_t cut : cuts) {
    pieces.push_back(reasoning.substr(start, cut - start));
    start = cut;
  }
  pieces.push_back(reasoning.substr(start));

  std::vector<std::string> steps;
  std::string pending;
  for (std::string_view piece : pieces) {
    if (trim(piece).size() < delims.min_step_chars) {
      if (steps.empty()) {
        pending.append(piece);
      } else {
        steps.back().append(piece);
      }
      continue;
    }
    steps.push_back(pending + std::string(piece));
    pending.clear();
  }
  if (steps.empty() && !trim(pending).empty()) steps.push_back(pending);

  for (auto& s : steps) s = std::string(trim(s));
  return steps;
}

std::string join_steps(const std::vector<std::string>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += steps[i];
  }
  return out;
}

std::string extract_boxed(std::string_view solution) {
  const std::size_t n = count_occurrences(solution, kBoxedOpen);
  if (n == 0) fail(Errc::kNoAnswerFound, "no boxed{} marker");
  if (n > 1) fail(Errc::kAmbiguousAnswer, std::to_string(n) + " boxed{} markers");

  const std::size_t open = solution.find(kBoxedOpen);
  const std::size_t body = open + kBoxedOpen.size();
  int depth = 1;
  for (std::size_t i = body; i < solution.size(); ++i) {
    if (solution[i] == '{') {
      ++depth;
    } else if (solution[i] == '}') {
      if (--depth == 0) {
        return std::string(trim(solution.substr(body, i - body)));
      }
    }
  }
  fail(Errc::kNoAnswerFound, "unterminated boxed{} marker");
}

ReasoningTrace parse_response(std::string_view raw, std::string_view question,
                              const DelimiterSet& delims) {
  const std::size_t opens = count_occurrences(raw, kThinkOpen);
  const std::size_t closes = count_occurrences(raw, kThinkClose);
  if (opens != 1 || closes != 1) {
    fail(Errc::kMalformedResponse,
         "expected one think block, found " + std::to_string(opens) + " open / " +
             std::to_string(closes) + " close tags");
  }
  const std::size_t open = raw.find(kThinkOpen);
  const std::size_t close = raw.find(kThinkClose);
  if (close < open) fail(Errc::kMalformedResponse, "think tags out of order");

  if (count_occurrences(raw.substr(0, open), kBoxedOpen) != 0) {
    fail(Errc::kMalformedResponse, "boxed{} marker before the think block");
  }

  ReasoningTrace trace;
  trace.question = std::string(question);
  trace.raw = std::string(raw);
  trace.think_span = {open + kThinkOpen.size(), close};

  try {
    trace.final_answer = extract_boxed(raw.substr(close + kThinkClose.size()));
  } catch (const Error& e) {
    fail(Errc::kMalformedResponse, e.what());
  }

  trace.steps = segment_steps(trace.think_text(), delims);
  if (trace.steps.empty()) fail(Errc::kMalformedResponse, "empty think block");
  return trace;
}

std::string trace_to_jsonl(const ReasoningTrace& trace) {
  nlohmann::ordered_json j;
  j["question"] = trace.question;
  j["steps"] = trace.steps;
  j["final_answer"] = trace.final_answer;
  j["raw"] = trace.raw;
  return j.dump();
}

ReasoningTrace trace_from_jsonl(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kParseError, e.what());
  }
  ReasoningTrace trace;
  trace.question = j.at("question").get<std::string>();
  trace.steps = j.at("steps").get<std::vector<std::string>>();
  trace.final_answer = j.at("final_answer").get<std::string>();
  trace.raw = j.at("raw").get<std::string>();
  const std::size_t open = trace.raw.find(kThinkOpen);
  const std::size_t close = trace.raw.find(kThinkClose);
  if (open != std::string::npos && close != std::string::npos && open < close) {
    trace.think_span = {open + kThinkOpen.size(), close};
  }
  return trace;
}

}  // namespace factstep::chains
