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

#include "factstep/report.hpp"

#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::report {

namespace {

constexpr std::string_view kImprovement = "Improvement";

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// Avoids printing "-0.00".
double clean(double v) { return v == 0.0 ? 0.0 : v; }

std::string cell(double v, bool signed_value) {
  v = clean(round2(v));
  return signed_value ? fmt::format("{:+.2f}", v) : fmt::format("{:.2f}", v);
}

}  // namespace

AccuracyRow row_from_sweep(const harness::SweepResult& r, std::string label) {
  AccuracyRow row;
  row.label = std::move(label);
  for (const auto& t : r.per_temperature) row.values.push_back(100.0 * t.accuracy);
  row.overall = 100.0 * r.overall_accuracy;
  return row;
}

AccuracyRow improvement_row(const AccuracyRow& base, const AccuracyRow& enhanced) {
  if (base.values.size() != enhanced.values.size()) {
    fail(Errc::kShapeMismatch, "rows have different column counts");
  }
  AccuracyRow row;
  row.label = std::string(kImprovement);
  for (std::size_t i = 0; i < base.values.size(); ++i) {
    row.values.push_back(clean(round2(round2(enhanced.values[i]) - round2(base.values[i]))));
  }
  row.overall = clean(round2(round2(enhanced.overall) - round2(base.overall)));
  return row;
}

namespace {

std::string render_table_min(const AccuracyTable& table, std::size_t label_width) {
  for (const auto& r : table.rows) label_width = std::max(label_width, r.label.size());
  std::string out = fmt::format("{:<{}}", "Model", label_width);
  for (double t : table.temperatures) out += fmt::format(" | {:>7}", fmt::format("T={:.1f}", t));
  out += fmt::format(" | {:>8}\n", "Overall");
  out += std::string(out.size() - 1, '-') + "\n";
  for (const auto& r : table.rows) {
    if (r.values.size() != table.temperatures.size()) {
      fail(Errc::kShapeMismatch, "row '" + r.label + "' does not match the temperature list");
    }
    const bool sign = r.label == kImprovement;
    out += fmt::format("{:<{}}", r.label, label_width);
    for (double v : r.values) out += fmt::format(" | {:>7}", cell(v, sign));
    out += fmt::format(" | {:>8}\n", cell(r.overall, sign));
  }
  return out;
}

}  // namespace

std::string render_table(const AccuracyTable& table) { return render_table_min(table, 5); }

std::string render_comparison(const AccuracyRow& base, const AccuracyRow& enhanced,
                              const std::vector<double>& temperatures) {
  AccuracyTable t{temperatures, {base, enhanced, improvement_row(base, enhanced)}};
  return render_table(t);
}

std::string render_sweep(const harness::SweepResult& r, std::string_view label) {
  constexpr std::string_view kVariance = "Variance";
  const std::size_t width = std::max(kVariance.size(), label.size());
  AccuracyTable t{r.temperatures, {row_from_sweep(r, std::string(label))}};
  std::string out = render_table_min(t, width);
  out += fmt::format("{:<{}}", kVariance, width);
  for (const auto& s : r.per_temperature) out += fmt::format(" | {:>7.4f}", s.variance);
  out += fmt::format(" | {:>8.4f}\n", r.overall_variance);
  out += fmt::format("cross-temperature variance: {:.6f}\n", r.cross_temperature_variance);
  std::size_t malformed = 0;
  for (const auto& s : r.per_temperature) malformed += s.malformed;
  out += fmt::format("malformed samples: {}\n", malformed);
  return out;
}

AccuracyTable table_from_json(std::string_view text) {
  AccuracyTable t;
  try {
    const auto j = nlohmann::json::parse(text);
    t.temperatures = j.at("temperatures").get<std::vector<double>>();
    for (const auto& r : j.at("rows")) {
      t.rows.push_back({r.at("label").get<std::string>(), r.at("values").get<std::vector<double>>(),
                        r.at("overall").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kParseError, std::string("score file: ") + e.what());
  }
  return t;
}

std::string table_to_json(const AccuracyTable& table) {
  nlohmann::ordered_json j;
  j["temperatures"] = table.temperatures;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"label", r.label}, {"values", r.values}, {"overall", r.overall}});
  }
  j["rows"] = rows;
  return j.dump(2);
}

void emit(const std::filesystem::path& path, std::string_view text) {
  write_text_file(path, text);
}

}  // namespace factstep::report
