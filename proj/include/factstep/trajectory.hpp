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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace factstep::trajectory {

// Dense row-major 3-d array of doubles.
struct Tensor3 {
  std::size_t d0 = 0;
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t a, std::size_t b, std::size_t c, double fill = 0.0)
      : d0(a), d1(b), d2(c), data(a * b * c, fill) {}

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * d1 + j) * d2 + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * d1 + j) * d2 + k];
  }
  const double* row(std::size_t i, std::size_t j) const { return data.data() + (i * d1 + j) * d2; }
  double* row(std::size_t i, std::size_t j) { return data.data() + (i * d1 + j) * d2; }
};

struct ActivationTrace {
  std::size_t layer_count = 0;  // L
  std::size_t token_count = 0;  // N
  std::size_t hidden_dim = 0;   // H
  Tensor3 hiddens;              // L x N x H
  std::vector<std::vector<std::size_t>> step_spans;
  std::string model_tag;
  std::string prompt_id;

  std::size_t step_count() const { return step_spans.size(); }
  // Throws kShapeMismatch, kEmptySpan, kOverlappingSpans or kInvalidArgument.
  void validate() const;
};

// L x T x H means of each step's token hiddens.
Tensor3 step_activations(const ActivationTrace& trace);

// One layer's step means, T rows of H values.
using StepMatrix = std::vector<std::vector<double>>;
StepMatrix layer_rows(const Tensor3& means, std::size_t layer);

struct DistanceResult {
  std::vector<double> distances;  // T - 1
  double mean = 0.0;
};
// Throws kTooFewSteps for T < 2.
DistanceResult step_distances(const StepMatrix& a);

struct AngleResult {
  std::vector<double> angles;  // T - 2, NaN where undefined
  std::vector<bool> defined;
  double mean = 0.0;           // over defined angles, 0 when none
  std::size_t skipped = 0;
};
// Angle between consecutive difference vectors. Throws kTooFewSteps for T < 3.
AngleResult angular_deviation(const StepMatrix& a);

struct CoherenceResult {
  std::vector<std::vector<double>> matrix;  // T x T
  double adjacent_similarity = 0.0;
  bool zero_vector = false;
};
// Throws kTooFewSteps for T < 2.
CoherenceResult coherence(const StepMatrix& a);

struct PcaResult {
  std::vector<std::array<double, 2>> points;  // T rows
  std::array<double, 2> ratios{0.0, 0.0};
  bool degenerate = false;
};
// Top-2 principal components of the centered rows. The first non-zero
// loading of each component is positive. Throws kTooFewSteps for T < 2.
PcaResult pca_project(const StepMatrix& a);

struct AnalyzeOptions {
  bool exclude_final_step = false;
};

struct TrajectoryReport {
  std::string model_tag;
  std::string prompt_id;
  std::size_t layer_count = 0;
  std::size_t step_count = 0;
  std::size_t hidden_dim = 0;
  Tensor3 step_means;
  std::vector<DistanceResult> distances;
  std::vector<AngleResult> angles;  // empty when T < 3
  std::vector<CoherenceResult> coherence;
  std::vector<PcaResult> pca;

  std::vector<double> mean_distance() const;
  std::vector<double> mean_angle() const;
  std::vector<double> adjacent_similarity() const;
};

// Throws kTooFewSteps for T < 2 (after exclusion).
TrajectoryReport analyze_trace(const ActivationTrace& trace, const AnalyzeOptions& options = {});

struct Band {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Per-layer averages across prompts with min/max bands.
struct TrajectorySummary {
  std::string model_tag;
  std::size_t layer_count = 0;
  std::size_t prompt_count = 0;
  std::vector<Band> mean_distance;
  std::vector<Band> mean_angle;
  std::vector<Band> adjacent_similarity;
};

// Throws kShapeMismatch when layer counts differ, kInvalidArgument on empty input.
TrajectorySummary summarize(const std::vector<TrajectoryReport>& reports);

struct Delta {
  double base = 0.0;
  double enhanced = 0.0;
  double absolute = 0.0;
  double relative = 0.0;  // (enhanced - base) / |base|
  bool relative_defined = true;
};
Delta make_delta(double base, double enhanced);

struct LayerComparison {
  std::size_t layer = 0;
  Delta distance;
  Delta angle;
  Delta similarity;
};

struct Comparison {
  std::string base_tag;
  std::string enhanced_tag;
  std::vector<LayerComparison> layers;
};

// Throws kShapeMismatch when layer counts differ.
Comparison compare_summaries(const TrajectorySummary& base, const TrajectorySummary& enhanced);
Comparison compare_traces(const TrajectoryReport& base, const TrajectoryReport& enhanced);

// A single externally supplied readout, such as one layer's reference numbers.
struct ReadoutRow {
  std::string label;
  std::string metric;
  double base = 0.0;
  double enhanced = 0.0;
};
std::string render_readout_row(const ReadoutRow& row);

std::string render_comparison_table(const Comparison& c);
std::string report_to_jsonl(const TrajectoryReport& r);
std::string comparison_to_jsonl(const Comparison& c);
std::string summary_to_jsonl(const TrajectorySummary& s);

struct ToyTraceOptions {
  std::size_t layers = 4;
  std::size_t steps = 6;
  std::size_t tokens_per_step = 3;
  std::size_t hidden_dim = 8;
  // Scale of the per-step drift of the step centres.
  double step_scale = 1.0;
  // Scale of the per-token noise around a step centre.
  double token_noise = 0.1;
  std::string model_tag = "toy";
  std::string prompt_id = "p0";
};
// Random-walk trace with contiguous, equally sized step spans.
ActivationTrace make_toy_trace(const ToyTraceOptions& options, std::uint64_t seed);

}  // namespace factstep::trajectory
