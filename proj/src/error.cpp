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

#include "factstep/error.hpp"

namespace factstep {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kMalformedResponse: return "MalformedResponse";
    case Errc::kNoAnswerFound: return "NoAnswerFound";
    case Errc::kAmbiguousAnswer: return "AmbiguousAnswer";
    case Errc::kProviderUnavailable: return "ProviderUnavailable";
    case Errc::kNoSubstitutable: return "NoSubstitutable";
    case Errc::kInsufficientData: return "InsufficientData";
    case Errc::kEmptyPart: return "EmptyPart";
    case Errc::kInvalidProbability: return "InvalidProbability";
    case Errc::kScorerUnavailable: return "ScorerUnavailable";
    case Errc::kEmptyConfusion: return "EmptyConfusion";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kEmbedderUnavailable: return "EmbedderUnavailable";
    case Errc::kNonpositiveRatio: return "NonpositiveRatio";
    case Errc::kNonpositiveProbability: return "NonpositiveProbability";
    case Errc::kGeneratorUnavailable: return "GeneratorUnavailable";
    case Errc::kDivergenceDetected: return "DivergenceDetected";
    case Errc::kEmptySpan: return "EmptySpan";
    case Errc::kOverlappingSpans: return "OverlappingSpans";
    case Errc::kTooFewSteps: return "TooFewSteps";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kEmptyChain: return "EmptyChain";
    case Errc::kWriteFailure: return "WriteFailure";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what),
      code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace factstep
