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

#include <algorithm>
#include <cctype>

#include "factstep/augment.hpp"
#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::augment {

namespace {

constexpr std::array<std::string_view, kEntityTypeCount> kTypeNames = {
    "PERSON",  "DATE",     "ORG",      "WORK_OF_ART", "GPE",   "FAC",
    "EVENT",   "LOC",      "NORP",     "PRODUCT",     "CARDINAL",
    "QUANTITY", "LAW",     "ORDINAL",  "TIME",        "MONEY", "LANGUAGE",
    "PERCENT"};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool starts_on_boundary(std::string_view text, std::size_t pos) {
  return pos == 0 || !is_word_char(text[pos - 1]) || !is_word_char(text[pos]);
}

bool ends_on_boundary(std::string_view text, std::size_t end) {
  return end == text.size() || !is_word_char(text[end]) ||
         !is_word_char(text[end - 1]);
}

}  // namespace

const std::array<EntityType, kEntityTypeCount>& all_entity_types() {
  static const std::array<EntityType, kEntityTypeCount> kAll = [] {
    std::array<EntityType, kEntityTypeCount> a{};
    for (std::size_t i = 0; i < kEntityTypeCount; ++i) {
      a[i] = static_cast<EntityType>(i);
    }
    return a;
  }();
  return kAll;
}

std::string_view to_string(EntityType type) {
  return kTypeNames[static_cast<std::size_t>(type)];
}

std::optional<EntityType> parse_entity_type(std::string_view name) {
  for (std::size_t i = 0; i < kEntityTypeCount; ++i) {
    if (kTypeNames[i] == name) return static_cast<EntityType>(i);
  }
  return std::nullopt;
}

GazetteerProvider::GazetteerProvider(
    const std::vector<std::pair<std::string, EntityType>>& entries) {
  for (const auto& [surface, type] : entries) add(surface, type);
}

void GazetteerProvider::add(std::string_view surface, EntityType type) {
  if (surface.empty()) return;
  // First registration of a surface wins.
  if (!entries_.emplace(std::string(surface), type).second) return;
  std::size_t node = 0;
  for (unsigned char c : surface) {
    auto it = nodes_[node].next.find(c);
    if (it == nodes_[node].next.end()) {
      nodes_.push_back(Node{});
      it = nodes_[node].next.emplace(c, nodes_.size() - 1).first;
    }
    node = it->second;
  }
  nodes_[node].type = type;
}

GazetteerProvider GazetteerProvider::from_tsv(std::string_view tsv) {
  GazetteerProvider g;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(tsv)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(Errc::kParseError,
           "gazetteer line " + std::to_string(line_no) + ": missing tab");
    }
    const std::string_view type_name = trim(std::string_view(line).substr(tab + 1));
    auto type = parse_entity_type(type_name);
    if (!type) {
      fail(Errc::kParseError, "gazetteer line " + std::to_string(line_no) +
                                  ": unknown type " + std::string(type_name));
    }
    g.add(line.substr(0, tab), *type);
  }
  return g;
}

GazetteerProvider GazetteerProvider::load(const std::string& path) {
  return from_tsv(read_text_file(path));
}

std::vector<EntitySpan> GazetteerProvider::find(std::string_view text) const {
  std::vector<EntitySpan> spans;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t best_end = 0;
    std::optional<EntityType> best_type;
    if (starts_on_boundary(text, pos)) {
      std::size_t node = 0;
      for (std::size_t i = pos; i < text.size(); ++i) {
        auto it = nodes_[node].next.find(static_cast<unsigned char>(text[i]));
        if (it == nodes_[node].next.end()) break;
        node = it->second;
        if (nodes_[node].type && ends_on_boundary(text, i + 1)) {
          best_end = i + 1;
          best_type = nodes_[node].type;
        }
      }
    }
    if (best_type) {
      spans.push_back({std::string(text.substr(pos, best_end - pos)), *best_type,
                       pos, best_end});
      pos = best_end;
    } else {
      ++pos;
    }
  }
  return spans;
}

std::string GazetteerProvider::identity() const {
  std::string blob;
  for (const auto& [surface, type] : entries_) {
    blob += surface;
    blob += '\t';
    blob += to_string(type);
    blob += '\n';
  }
  return "gazetteer:" + std::to_string(entries_.size()) + ":" + hex64(fnv1a64(blob));
}

std::vector<EntitySpan> recognize_entities(std::string_view text,
                                           const EntityProvider& provider) {
  if (text.empty()) return {};
  std::vector<EntitySpan> raw = provider.find(text);
  std::vector<EntitySpan> valid;
  for (auto& span : raw) {
    if (span.start >= span.end || span.end > text.size()) continue;
    if (text.substr(span.start, span.end - span.start) != span.surface) continue;
    valid.push_back(std::move(span));
  }
  std::stable_sort(valid.begin(), valid.end(), [](const auto& a, const auto& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end > b.end;
  });
  std::vector<EntitySpan> out;
  for (auto& span : valid) {
    if (!out.empty() && span.start < out.back().end) continue;
    out.push_back(std::move(span));
  }
  return out;
}

EntityPool make_pool(const std::vector<EntitySpan>& spans) {
  EntityPool pool;
  for (const auto& s : spans) pool[s.type].push_back(s.surface);
  for (auto& [type, surfaces] : pool) {
    std::sort(surfaces.begin(), surfaces.end());
    surfaces.erase(std::unique(surfaces.begin(), surfaces.end()), surfaces.end());
  }
  return pool;
}

void merge_pool(EntityPool& into, const EntityPool& from) {
  for (const auto& [type, surfaces] : from) {
    auto& dst = into[type];
    dst.insert(dst.end(), surfaces.begin(), surfaces.end());
    std::sort(dst.begin(), dst.end());
    dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
  }
}

}  // namespace factstep::augment
