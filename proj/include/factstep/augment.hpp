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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factstep/rng.hpp"

namespace factstep::augment {

// OntoNotes-style categories, in descending corpus frequency.
enum class EntityType {
  kPerson,
  kDate,
  kOrg,
  kWorkOfArt,
  kGpe,
  kFac,
  kEvent,
  kLoc,
  kNorp,
  kProduct,
  kCardinal,
  kQuantity,
  kLaw,
  kOrdinal,
  kTime,
  kMoney,
  kLanguage,
  kPercent,
};

inline constexpr std::size_t kEntityTypeCount = 18;
const std::array<EntityType, kEntityTypeCount>& all_entity_types();
std::string_view to_string(EntityType type);
std::optional<EntityType> parse_entity_type(std::string_view name);

struct EntitySpan {
  std::string surface;
  EntityType type = EntityType::kPerson;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const EntitySpan&) const = default;
};

class EntityProvider {
 public:
  virtual ~EntityProvider() = default;
  virtual std::vector<EntitySpan> find(std::string_view text) const = 0;
  virtual std::string identity() const = 0;
};

// Offline provider backed by a surface -> type table. Matches are
// leftmost-longest and must sit on word boundaries.
class GazetteerProvider : public EntityProvider {
 public:
  GazetteerProvider() = default;
  explicit GazetteerProvider(const std::vector<std::pair<std::string, EntityType>>& entries);

  // TSV: surface<TAB>TYPE per line; blank lines and '#' comments ignored.
  static GazetteerProvider from_tsv(std::string_view tsv);
  static GazetteerProvider load(const std::string& path);

  void add(std::string_view surface, EntityType type);
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, EntityType>& entries() const { return entries_; }

  std::vector<EntitySpan> find(std::string_view text) const override;
  std::string identity() const override;

 private:
  struct Node {
    std::map<unsigned char, std::size_t> next;
    std::optional<EntityType> type;
  };
  std::vector<Node> nodes_{Node{}};
  std::map<std::string, EntityType> entries_;
};

// Runs the provider and normalizes: bounds and surfaces validated, sorted by
// start, overlapping spans dropped (earlier start wins, then longer).
std::vector<EntitySpan> recognize_entities(std::string_view text,
                                           const EntityProvider& provider);

using EntityPool = std::map<EntityType, std::vector<std::string>>;

// Sorted, de-duplicated surfaces per type.
EntityPool make_pool(const std::vector<EntitySpan>& spans);
void merge_pool(EntityPool& into, const EntityPool& from);

struct Swap {
  EntitySpan original;
  std::string replacement;
};

struct CounterfactualRecord {
  std::size_t id = 0;
  std::string question;
  std::string original_cot;
  std::optional<std::string> perturbed_cot;
  std::optional<Swap> swap;
  bool label = true;

  const std::string& cot() const {
    return perturbed_cot ? *perturbed_cot : original_cot;
  }
};

struct SourceSample {
  std::string question;
  std::string cot;
};

// Replaces exactly one span of the cot with a different same-type surface.
// Eligible spans and replacements are both drawn uniformly. The question is
// left untouched. Throws kNoSubstitutable.
CounterfactualRecord substitute_entity(const SourceSample& sample,
                                       const std::vector<EntitySpan>& spans,
                                       const EntityPool& pool, Rng& rng);

struct SkippedSample {
  std::size_t source_index = 0;
  std::string reason;
};

struct DatasetSplits {
  std::vector<CounterfactualRecord> train;
  std::vector<CounterfactualRecord> validation;
  std::vector<CounterfactualRecord> test;
  std::uint64_t seed = 0;
  std::vector<SkippedSample> skipped;
};

struct DatasetOptions {
  std::size_t val_size = 1000;
  std::size_t test_size = 1000;
  // Negatives generated as round(negative_ratio * positives), at most one per
  // source sample. Must lie in [0, 1].
  double negative_ratio = 1.0;
  std::uint64_t seed = 0;
};

// Positives keep label true; negatives come from substitute_entity. The
// combined record list is shuffled and carved into exact split sizes.
// The replacement pool is every entity recognized across the positives.
DatasetSplits build_dataset(const std::vector<SourceSample>& positives,
                            const EntityProvider& provider,
                            const DatasetOptions& options);

// JSONL record: {question, cot, label, swap:{surface,type,start,end,replacement}?}
std::string record_to_jsonl(const CounterfactualRecord& record);
CounterfactualRecord record_from_jsonl(std::string_view line);
std::string records_to_jsonl(const std::vector<CounterfactualRecord>& records);

std::vector<SourceSample> read_source_jsonl(std::string_view text);

// Templated corpus over a fixed gazetteer, for tests and demos.
struct SyntheticCorpus {
  std::vector<SourceSample> samples;
  GazetteerProvider gazetteer;
};
SyntheticCorpus make_synthetic_corpus(std::size_t count, std::uint64_t seed);

}  // namespace factstep::augment
