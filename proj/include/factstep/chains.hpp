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

namespace factstep::chains {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kBoxedOpen = "boxed{";

struct DelimiterSet {
  std::vector<std::string> delimiters{"First,", "Next,", "Finally,", "Wait,",
                                      "\n\n"};
  std::size_t min_step_chars = 3;

  static DelimiterSet defaults() { return {}; }
};

struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct ReasoningTrace {
  std::string question;
  std::vector<std::string> steps;
  std::string final_answer;
  std::string raw;
  // Offsets of the think-block content inside raw, tags excluded.
  CharSpan think_span;

  std::string_view think_text() const {
    return std::string_view(raw).substr(think_span.begin,
                                        think_span.end - think_span.begin);
  }
  // Everything after the closing think tag.
  std::string_view solution_text() const;
};

// Splits reasoning at every literal delimiter occurrence. Steps keep their
// leading delimiter and are whitespace-trimmed; fragments shorter than
// min_step_chars fold into the previous step.
std::vector<std::string> segment_steps(std::string_view reasoning,
                                       const DelimiterSet& delims = {});

// Joins steps so that segment_steps on the result reproduces them.
std::string join_steps(const std::vector<std::string>& steps);

// Content of the single boxed{...} marker, braces balanced, trimmed.
// Throws kNoAnswerFound / kAmbiguousAnswer.
std::string extract_boxed(std::string_view solution);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// Throws kMalformedResponse unless raw holds exactly one think block followed
// by exactly one boxed answer.
ReasoningTrace parse_response(std::string_view raw,
                              std::string_view question = {},
                              const DelimiterSet& delims = {});

// One JSON object per line: {question, steps, final_answer, raw}.
std::string trace_to_jsonl(const ReasoningTrace& trace);
ReasoningTrace trace_from_jsonl(std::string_view line);

}  // namespace factstep::chains
