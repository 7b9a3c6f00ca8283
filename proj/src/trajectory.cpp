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

#include "factstep/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/rng.hpp"

namespace factstep::trajectory {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

void require_steps(const StepMatrix& a, std::size_t min_steps) {
  if (a.size() < min_steps) {
    fail(Errc::kTooFewSteps, "need at least " + std::to_string(min_steps) + " steps, got " +
                                 std::to_string(a.size()));
  }
  for (const auto& row : a) {
    if (row.size() != a.front().size()) fail(Errc::kShapeMismatch, "ragged step matrix");
  }
}

}  // namespace

void ActivationTrace::validate() const {
  if (hiddens.d0 != layer_count || hiddens.d1 != token_count || hiddens.d2 != hidden_dim ||
      hiddens.data.size() != layer_count * token_count * hidden_dim) {
    fail(Errc::kShapeMismatch, "hidden tensor does not match L x N x H");
  }
  std::vector<bool> used(token_count, false);
  std::size_t prev_first = 0;
  for (std::size_t t = 0; t < step_spans.size(); ++t) {
    const auto& span = step_spans[t];
    if (span.empty()) fail(Errc::kEmptySpan, "step " + std::to_string(t) + " has no tokens");
    for (std::size_t i : span) {
      if (i >= token_count) fail(Errc::kShapeMismatch, "token index out of range");
      if (used[i]) fail(Errc::kOverlappingSpans, "token " + std::to_string(i) + " reused");
      used[i] = true;
    }
    const std::size_t first = *std::min_element(span.begin(), span.end());
    if (t > 0 && first < prev_first) {
      fail(Errc::kInvalidArgument, "step spans are not ordered by first token");
    }
    prev_first = first;
  }
  for (double v : hiddens.data) {
    if (!std::isfinite(v)) fail(Errc::kInvalidArgument, "non-finite activation");
  }
}

Tensor3 step_activations(const ActivationTrace& trace) {
  trace.validate();
  const std::size_t t_count = trace.step_count();
  if (t_count == 0) fail(Errc::kTooFewSteps, "trace has no steps");
  Tensor3 out(trace.layer_count, t_count, trace.hidden_dim);
  for (std::size_t l = 0; l < trace.layer_count; ++l) {
    for (std::size_t t = 0; t < t_count; ++t) {
      double* dst = out.row(l, t);
      const auto& span = trace.step_spans[t];
      for (std::size_t i : span) {
        const double* src = trace.hiddens.row(l, i);
        for (std::size_t h = 0; h < trace.hidden_dim; ++h) dst[h] += src[h];
      }
      for (std::size_t h = 0; h < trace.hidden_dim; ++h) dst[h] /= static_cast<double>(span.size());
    }
  }
  return out;
}

StepMatrix layer_rows(const Tensor3& means, std::size_t layer) {
  if (layer >= means.d0) fail(Errc::kShapeMismatch, "layer out of range");
  StepMatrix rows(means.d1);
  for (std::size_t t = 0; t < means.d1; ++t) {
    rows[t].assign(means.row(layer, t), means.row(layer, t) + means.d2);
  }
  return rows;
}

DistanceResult step_distances(const StepMatrix& a) {
  require_steps(a, 2);
  DistanceResult r;
  for (std::size_t t = 0; t + 1 < a.size(); ++t) r.distances.push_back(norm(diff(a[t + 1], a[t])));
  for (double d : r.distances) r.mean += d;
  r.mean /= static_cast<double>(r.distances.size());
  return r;
}

AngleResult angular_deviation(const StepMatrix& a) {
  require_steps(a, 3);
  AngleResult r;
  double sum = 0.0;
  for (std::size_t t = 0; t + 2 < a.size(); ++t) {
    const auto u = diff(a[t + 1], a[t]);
    const auto v = diff(a[t + 2], a[t + 1]);
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) {
      r.angles.push_back(std::numeric_limits<double>::quiet_NaN());
      r.defined.push_back(false);
      ++r.skipped;
      continue;
    }
    const double c = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
    r.angles.push_back(std::acos(c));
    r.defined.push_back(true);
    sum += r.angles.back();
  }
  const std::size_t n = r.angles.size() - r.skipped;
  if (n > 0) r.mean = sum / static_cast<double>(n);
  return r;
}

CoherenceResult coherence(const StepMatrix& a) {
  require_steps(a, 2);
  const std::size_t t_count = a.size();
  CoherenceResult r;
  r.matrix.assign(t_count, std::vector<double>(t_count, 0.0));
  std::vector<double> norms(t_count);
  for (std::size_t i = 0; i < t_count; ++i) {
    norms[i] = norm(a[i]);
    if (norms[i] == 0.0) r.zero_vector = true;
  }
  for (std::size_t i = 0; i < t_count; ++i) {
    if (norms[i] > 0.0) r.matrix[i][i] = 1.0;
    for (std::size_t j = i + 1; j < t_count; ++j) {
      double c = 0.0;
      if (norms[i] > 0.0 && norms[j] > 0.0) {
        c = std::clamp(dot(a[i], a[j]) / (norms[i] * norms[j]), -1.0, 1.0);
      }
      r.matrix[i][j] = c;
      r.matrix[j][i] = c;
    }
  }
  for (std::size_t t = 0; t + 1 < t_count; ++t) r.adjacent_similarity += r.matrix[t][t + 1];
  r.adjacent_similarity /= static_cast<double>(t_count - 1);
  return r;
}

PcaResult pca_project(const StepMatrix& a) {
  require_steps(a, 2);
  const auto t_count = static_cast<Eigen::Index>(a.size());
  const auto h_dim = static_cast<Eigen::Index>(a.front().size());
  Eigen::MatrixXd x(t_count, h_dim);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    for (Eigen::Index h = 0; h < h_dim; ++h) x(t, h) = a[static_cast<std::size_t>(t)][static_cast<std::size_t>(h)];
  }
  x.rowwise() -= x.colwise().mean();

  PcaResult r;
  r.points.assign(a.size(), {0.0, 0.0});
  // T x T Gram matrix shares its non-zero spectrum with the H x H scatter.
  const Eigen::MatrixXd gram = x * x.transpose();
  const double total = gram.trace();
  const double scale = x.cwiseAbs().maxCoeff();
  if (!(total > 0.0) || scale == 0.0) {
    r.degenerate = true;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();
  const double tol = 1e-12 * total;
  for (int k = 0; k < 2 && k < t_count; ++k) {
    const Eigen::Index idx = t_count - 1 - k;
    const double lambda = evals(idx);
    if (!(lambda > tol)) continue;
    r.ratios[static_cast<std::size_t>(k)] = lambda / total;
    Eigen::VectorXd loading = x.transpose() * evecs.col(idx) / std::sqrt(lambda);
    const double lmax = loading.cwiseAbs().maxCoeff();
    for (Eigen::Index h = 0; h < loading.size(); ++h) {
      if (std::abs(loading(h)) > 1e-9 * lmax) {
        if (loading(h) < 0.0) loading = -loading;
        break;
      }
    }
    const Eigen::VectorXd proj = x * loading;
    for (Eigen::Index t = 0; t < t_count; ++t) {
      r.points[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] = proj(t);
    }
  }
  return r;
}

std::vector<double> TrajectoryReport::mean_distance() const {
  std::vector<double> out;
  for (const auto& d : distances) out.push_back(d.mean);
  return out;
}

std::vector<double> TrajectoryReport::mean_angle() const {
  std::vector<double> out;
  for (const auto& a : angles) out.push_back(a.mean);
  if (out.empty()) out.assign(layer_count, 0.0);
  return out;
}

std::vector<double> TrajectoryReport::adjacent_similarity() const {
  std::vector<double> out;
  for (const auto& c : coherence) out.push_back(c.adjacent_similarity);
  return out;
}

TrajectoryReport analyze_trace(const ActivationTrace& trace, const AnalyzeOptions& options) {
  Tensor3 means = step_activations(trace);
  if (options.exclude_final_step) {
    Tensor3 trimmed(means.d0, means.d1 - 1, means.d2);
    for (std::size_t l = 0; l < means.d0; ++l) {
      for (std::size_t t = 0; t + 1 < means.d1; ++t) {
        std::copy(means.row(l, t), means.row(l, t) + means.d2, trimmed.row(l, t));
      }
    }
    means = std::move(trimmed);
  }
  if (means.d1 < 2) fail(Errc::kTooFewSteps, "analysis needs at least 2 steps");

  TrajectoryReport r;
  r.model_tag = trace.model_tag;
  r.prompt_id = trace.prompt_id;
  r.layer_count = means.d0;
  r.step_count = means.d1;
  r.hidden_dim = means.d2;
  for (std::size_t l = 0; l < means.d0; ++l) {
    const auto rows = layer_rows(means, l);
    r.distances.push_back(step_distances(rows));
    if (rows.size() >= 3) r.angles.push_back(angular_deviation(rows));
    r.coherence.push_back(coherence(rows));
    r.pca.push_back(pca_project(rows));
  }
  r.step_means = std::move(means);
  return r;
}

namespace {

std::vector<Band> bands(const std::vector<std::vector<double>>& per_prompt, std::size_t layers) {
  std::vector<Band> out(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& v : per_prompt) {
      sum += v[l];
      lo = std::min(lo, v[l]);
      hi = std::max(hi, v[l]);
    }
    out[l] = {sum / static_cast<double>(per_prompt.size()), lo, hi};
  }
  return out;
}

}  // namespace

TrajectorySummary summarize(const std::vector<TrajectoryReport>& reports) {
  if (reports.empty()) fail(Errc::kInvalidArgument, "no reports to summarize");
  TrajectorySummary s;
  s.model_tag = reports.front().model_tag;
  s.layer_count = reports.front().layer_count;
  s.prompt_count = reports.size();
  std::vector<std::vector<double>> dist, ang, sim;
  for (const auto& r : reports) {
    if (r.layer_count != s.layer_count) fail(Errc::kShapeMismatch, "layer counts differ");
    dist.push_back(r.mean_distance());
    ang.push_back(r.mean_angle());
    sim.push_back(r.adjacent_similarity());
  }
  s.mean_distance = bands(dist, s.layer_count);
  s.mean_angle = bands(ang, s.layer_count);
  s.adjacent_similarity = bands(sim, s.layer_count);
  return s;
}

Delta make_delta(double base, double enhanced) {
  Delta d{base, enhanced, enhanced - base, 0.0, true};
  if (base == 0.0) {
    d.relative_defined = false;
  } else {
    d.relative = d.absolute / std::abs(base);
  }
  return d;
}

Comparison compare_summaries(const TrajectorySummary& base, const TrajectorySummary& enhanced) {
  if (base.layer_count != enhanced.layer_count) {
    fail(Errc::kShapeMismatch, "layer counts differ: " + std::to_string(base.layer_count) +
                                   " vs " + std::to_string(enhanced.layer_count));
  }
  Comparison c;
  c.base_tag = base.model_tag;
  c.enhanced_tag = enhanced.model_tag;
  for (std::size_t l = 0; l < base.layer_count; ++l) {
    c.layers.push_back({l, make_delta(base.mean_distance[l].mean, enhanced.mean_distance[l].mean),
                        make_delta(base.mean_angle[l].mean, enhanced.mean_angle[l].mean),
                        make_delta(base.adjacent_similarity[l].mean,
                                   enhanced.adjacent_similarity[l].mean)});
  }
  return c;
}

Comparison compare_traces(const TrajectoryReport& base, const TrajectoryReport& enhanced) {
  return compare_summaries(summarize({base}), summarize({enhanced}));
}

namespace {

std::string fmt_relative(const Delta& d) {
  if (!d.relative_defined) return "n/a";
  return fmt::format("{:+.2f}%", 100.0 * d.relative);
}

nlohmann::ordered_json delta_json(const Delta& d) {
  nlohmann::ordered_json j;
  j["base"] = d.base;
  j["enhanced"] = d.enhanced;
  j["absolute"] = d.absolute;
  if (d.relative_defined) {
    j["relative"] = d.relative;
  } else {
    j["relative"] = nullptr;
  }
  return j;
}

nlohmann::ordered_json band_json(const Band& b) {
  return nlohmann::ordered_json{{"mean", b.mean}, {"min", b.min}, {"max", b.max}};
}

}  // namespace

std::string render_readout_row(const ReadoutRow& row) {
  const Delta d = make_delta(row.base, row.enhanced);
  return fmt::format("{} | {} | base {} | enhanced {} | delta {:+.4g} | {}\n", row.label,
                     row.metric, row.base, row.enhanced, d.absolute, fmt_relative(d));
}

std::string render_comparison_table(const Comparison& c) {
  std::string out = fmt::format("base: {}  enhanced: {}\n", c.base_tag, c.enhanced_tag);
  out += fmt::format("{:>5} | {:>12} {:>12} {:>9} | {:>8} {:>8} {:>9} | {:>8} {:>8} {:>9}\n",
                     "layer", "dist base", "dist enh", "rel", "ang base", "ang enh", "rel",
                     "sim base", "sim enh", "rel");
  for (const auto& l : c.layers) {
    out += fmt::format(
        "{:>5} | {:>12.4f} {:>12.4f} {:>9} | {:>8.4f} {:>8.4f} {:>9} | {:>8.4f} {:>8.4f} {:>9}\n",
        l.layer, l.distance.base, l.distance.enhanced, fmt_relative(l.distance), l.angle.base,
        l.angle.enhanced, fmt_relative(l.angle), l.similarity.base, l.similarity.enhanced,
        fmt_relative(l.similarity));
  }
  return out;
}

std::string report_to_jsonl(const TrajectoryReport& r) {
  std::string out;
  for (std::size_t l = 0; l < r.layer_count; ++l) {
    nlohmann::ordered_json j;
    j["model_tag"] = r.model_tag;
    j["prompt_id"] = r.prompt_id;
    j["layer"] = l;
    j["distances"] = r.distances[l].distances;
    j["mean_distance"] = r.distances[l].mean;
    if (!r.angles.empty()) {
      nlohmann::ordered_json angles = nlohmann::ordered_json::array();
      for (std::size_t t = 0; t < r.angles[l].angles.size(); ++t) {
        if (r.angles[l].defined[t]) {
          angles.push_back(r.angles[l].angles[t]);
        } else {
          angles.push_back(nullptr);
        }
      }
      j["angles"] = angles;
      j["mean_angle"] = r.angles[l].mean;
      j["skipped_angles"] = r.angles[l].skipped;
    }
    j["coherence"] = r.coherence[l].matrix;
    j["adjacent_similarity"] = r.coherence[l].adjacent_similarity;
    j["zero_vector"] = r.coherence[l].zero_vector;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : r.pca[l].points) pts.push_back({p[0], p[1]});
    j["pca_points"] = pts;
    j["explained_variance"] = {r.pca[l].ratios[0], r.pca[l].ratios[1]};
    j["pca_degenerate"] = r.pca[l].degenerate;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string comparison_to_jsonl(const Comparison& c) {
  std::string out;
  for (const auto& l : c.layers) {
    nlohmann::ordered_json j;
    j["base_tag"] = c.base_tag;
    j["enhanced_tag"] = c.enhanced_tag;
    j["layer"] = l.layer;
    j["mean_distance"] = delta_json(l.distance);
    j["mean_angle"] = delta_json(l.angle);
    j["adjacent_similarity"] = delta_json(l.similarity);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string summary_to_jsonl(const TrajectorySummary& s) {
  std::string out;
  for (std::size_t l = 0; l < s.layer_count; ++l) {
    nlohmann::ordered_json j;
    j["model_tag"] = s.model_tag;
    j["prompts"] = s.prompt_count;
    j["layer"] = l;
    j["mean_distance"] = band_json(s.mean_distance[l]);
    j["mean_angle"] = band_json(s.mean_angle[l]);
    j["adjacent_similarity"] = band_json(s.adjacent_similarity[l]);
    out += j.dump();
    out += '\n';
  }
  return out;
}

ActivationTrace make_toy_trace(const ToyTraceOptions& o, std::uint64_t seed) {
  if (o.layers == 0 || o.steps == 0 || o.tokens_per_step == 0 || o.hidden_dim == 0) {
    fail(Errc::kInvalidArgument, "toy trace dimensions must be positive");
  }
  Rng rng(seed);
  ActivationTrace tr;
  tr.layer_count = o.layers;
  tr.token_count = o.steps * o.tokens_per_step;
  tr.hidden_dim = o.hidden_dim;
  tr.hiddens = Tensor3(o.layers, tr.token_count, o.hidden_dim);
  tr.model_tag = o.model_tag;
  tr.prompt_id = o.prompt_id;
  for (std::size_t t = 0; t < o.steps; ++t) {
    std::vector<std::size_t> span;
    for (std::size_t k = 0; k < o.tokens_per_step; ++k) span.push_back(t * o.tokens_per_step + k);
    tr.step_spans.push_back(std::move(span));
  }
  for (std::size_t l = 0; l < o.layers; ++l) {
    std::vector<double> centre(o.hidden_dim);
    for (auto& c : centre) c = rng.normal();
    for (std::size_t t = 0; t < o.steps; ++t) {
      for (auto& c : centre) c += o.step_scale * rng.normal();
      for (std::size_t i : tr.step_spans[t]) {
        for (std::size_t h = 0; h < o.hidden_dim; ++h) {
          tr.hiddens(l, i, h) = centre[h] + o.token_noise * rng.normal();
        }
      }
    }
  }
  return tr;
}

}  // namespace factstep::trajectory
