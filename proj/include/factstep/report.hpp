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
#include <vector>

#include "factstep/harness.hpp"

namespace factstep::report {

// One row of an accuracy table, values in percent.
struct AccuracyRow {
  std::string label;
  std::vector<double> values;  // one per temperature
  double overall = 0.0;
};

struct AccuracyTable {
  std::vector<double> temperatures;
  std::vector<AccuracyRow> rows;
};

AccuracyRow row_from_sweep(const harness::SweepResult& r, std::string label);

// enhanced - base per column on the two-decimal values that are displayed.
AccuracyRow improvement_row(const AccuracyRow& base, const AccuracyRow& enhanced);

// Fixed-width text table; accuracies with two decimals, rows labelled
// "Improvement" rendered with an explicit sign.
std::string render_table(const AccuracyTable& table);

// Base, enhanced and improvement rows.
std::string render_comparison(const AccuracyRow& base, const AccuracyRow& enhanced,
                              const std::vector<double>& temperatures);

std::string render_sweep(const harness::SweepResult& r, std::string_view label);

// Score file: {"temperatures": [...], "rows": [{"label", "values", "overall"}]}.
AccuracyTable table_from_json(std::string_view text);
std::string table_to_json(const AccuracyTable& table);

// Writes text to path; throws kWriteFailure.
void emit(const std::filesystem::path& path, std::string_view text);

}  // namespace factstep::report
