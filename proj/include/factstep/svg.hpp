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

#include <string>
#include <vector>

namespace factstep::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  // Optional min/max band, same length as y.
  std::vector<double> lo;
  std::vector<double> hi;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool lines = true;  // false draws markers only
  int width = 640;
  int height = 400;
};

// Deterministic SVG document. Throws kShapeMismatch on ragged series.
std::string render(const Plot& plot);

}  // namespace factstep::svg
