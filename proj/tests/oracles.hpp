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

// Independent reference computations used by the unit tests and the
// acceptance runner. They share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "factstep/rng.hpp"
#include "factstep/trajectory.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Step means by direct per-element loops.
inline std::vector<Matrix> step_means(const factstep::trajectory::ActivationTrace& tr) {
  std::vector<Matrix> out(tr.layer_count);
  for (std::size_t l = 0; l < tr.layer_count; ++l) {
    for (const auto& span : tr.step_spans) {
      std::vector<double> m(tr.hidden_dim, 0.0);
      for (std::size_t h = 0; h < tr.hidden_dim; ++h) {
        double s = 0.0;
        for (std::size_t i : span) s += tr.hiddens(l, i, h);
        m[h] = s / static_cast<double>(span.size());
      }
      out[l].push_back(m);
    }
  }
  return out;
}

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::max(-1.0, std::min(1.0, ab / std::sqrt(aa * bb)));
}

inline double mean_distance(const Matrix& m) {
  double s = 0.0;
  for (std::size_t t = 1; t < m.size(); ++t) s += dist(m[t], m[t - 1]);
  return s / static_cast<double>(m.size() - 1);
}

// Angles between successive displacement vectors; NaN when a displacement is zero.
inline std::vector<double> angles(const Matrix& m) {
  std::vector<double> out;
  for (std::size_t t = 0; t + 2 < m.size(); ++t) {
    std::vector<double> u(m[t].size()), v(m[t].size());
    double nu = 0.0, nv = 0.0;
    for (std::size_t h = 0; h < u.size(); ++h) {
      u[h] = m[t + 1][h] - m[t][h];
      v[h] = m[t + 2][h] - m[t + 1][h];
      nu += u[h] * u[h];
      nv += v[h] * v[h];
    }
    if (nu == 0.0 || nv == 0.0) {
      out.push_back(std::nan(""));
      continue;
    }
    // arccos amplifies a one-ulp cosine change near +-1 to ~1e-8, so the
    // cosine is formed exactly as defined: u.v / (|u| |v|).
    double uv = 0.0;
    for (std::size_t h = 0; h < u.size(); ++h) uv += u[h] * v[h];
    const double c = uv / (std::sqrt(nu) * std::sqrt(nv));
    out.push_back(std::acos(std::max(-1.0, std::min(1.0, c))));
  }
  return out;
}

inline double mean_angle(const Matrix& m) {
  double s = 0.0;
  std::size_t n = 0;
  for (double a : angles(m)) {
    if (std::isnan(a)) continue;
    s += a;
    ++n;
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

inline Matrix similarity(const Matrix& m) {
  Matrix s(m.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      double nn = 0.0;
      for (double x : m[i]) nn += x * x;
      s[i][j] = (i == j) ? (nn > 0.0 ? 1.0 : 0.0) : cosine(m[i], m[j]);
    }
  }
  return s;
}

// Cyclic Jacobi rotations on a symmetric matrix. Returns eigenvalues in
// descending order with eigenvectors as columns of vecs.
inline std::vector<double> jacobi_eigen(Matrix a, Matrix* vecs = nullptr) {
  const std::size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] > a[y][y]; });
  std::vector<double> evals;
  Matrix sorted(n, std::vector<double>(n));
  for (std::size_t c = 0; c < n; ++c) {
    evals.push_back(a[order[c]][order[c]]);
    for (std::size_t r = 0; r < n; ++r) sorted[r][c] = v[r][order[c]];
  }
  if (vecs) *vecs = sorted;
  return evals;
}

// Explained-variance ratios of the top two components from the H x H scatter.
inline std::array<double, 2> pca_ratios(const Matrix& m) {
  const std::size_t t = m.size(), h = m[0].size();
  std::vector<double> mu(h, 0.0);
  for (const auto& row : m)
    for (std::size_t j = 0; j < h; ++j) mu[j] += row[j] / static_cast<double>(t);
  Matrix c(h, std::vector<double>(h, 0.0));
  for (const auto& row : m)
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < h; ++j) c[i][j] += (row[i] - mu[i]) * (row[j] - mu[j]);
  const auto ev = jacobi_eigen(c);
  double total = 0.0;
  for (std::size_t i = 0; i < h; ++i) total += c[i][i];
  std::array<double, 2> r{0.0, 0.0};
  if (total <= 0.0) return r;
  for (std::size_t k = 0; k < 2 && k < ev.size(); ++k) r[k] = std::max(0.0, ev[k]) / total;
  return r;
}

// Random trace with scattered, disjoint spans and possibly unused tokens.
inline factstep::trajectory::ActivationTrace random_trace(factstep::Rng& rng, std::size_t max_l = 4,
                                                          std::size_t max_t = 6,
                                                          std::size_t max_h = 8) {
  factstep::trajectory::ActivationTrace tr;
  tr.layer_count = 1 + rng.uniform_index(max_l);
  const std::size_t steps = 2 + rng.uniform_index(max_t - 1);
  tr.hidden_dim = 1 + rng.uniform_index(max_h);
  tr.token_count = steps + rng.uniform_index(3 * steps + 1);
  std::vector<std::size_t> tokens(tr.token_count);
  for (std::size_t i = 0; i < tokens.size(); ++i) tokens[i] = i;
  rng.shuffle(std::span<std::size_t>(tokens));
  std::vector<std::vector<std::size_t>> spans(steps);
  for (std::size_t s = 0; s < steps; ++s) spans[s].push_back(tokens[s]);
  for (std::size_t i = steps; i < tokens.size(); ++i) {
    const std::size_t k = rng.uniform_index(steps + 1);
    if (k < steps) spans[k].push_back(tokens[i]);
  }
  for (auto& s : spans) std::sort(s.begin(), s.end());
  std::sort(spans.begin(), spans.end());
  tr.step_spans = spans;
  tr.hiddens = factstep::trajectory::Tensor3(tr.layer_count, tr.token_count, tr.hidden_dim);
  for (double& x : tr.hiddens.data) x = 10.0 * rng.normal();
  tr.model_tag = "random";
  tr.prompt_id = "r";
  return tr;
}

inline bool close(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol;
}

}  // namespace oracle
