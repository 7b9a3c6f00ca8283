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

#include "factstep/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::augment {

CounterfactualRecord substitute_entity(const SourceSample& sample,
                                       const std::vector<EntitySpan>& spans,
                                       const EntityPool& pool, Rng& rng) {
  // (span index, candidate replacements) for every span with a same-type
  // alternative in the pool.
  std::vector<std::pair<std::size_t, std::vector<const std::string*>>> eligible;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto it = pool.find(spans[i].type);
    if (it == pool.end()) continue;
    std::vector<const std::string*> candidates;
    for (const auto& surface : it->second) {
      if (surface != spans[i].surface) candidates.push_back(&surface);
    }
    if (!candidates.empty()) eligible.emplace_back(i, std::move(candidates));
  }
  if (eligible.empty()) {
    fail(Errc::kNoSubstitutable, spans.empty()
                                     ? "no entities recognized"
                                     : "no same-type replacement available");
  }

  const auto& [span_index, candidates] = eligible[rng.uniform_index(eligible.size())];
  const EntitySpan& span = spans[span_index];
  if (span.end > sample.cot.size() ||
      sample.cot.compare(span.start, span.end - span.start, span.surface) != 0) {
    fail(Errc::kInvalidArgument, "span does not match the cot text");
  }
  const std::string& replacement = *candidates[rng.uniform_index(candidates.size())];

  CounterfactualRecord rec;
  rec.question = sample.question;
  rec.original_cot = sample.cot;
  std::string perturbed = sample.cot.substr(0, span.start);
  perturbed += replacement;
  perturbed += sample.cot.substr(span.end);
  rec.perturbed_cot = std::move(perturbed);
  rec.swap = Swap{span, replacement};
  rec.label = false;
  return rec;
}

DatasetSplits build_dataset(const std::vector<SourceSample>& positives,
                            const EntityProvider& provider,
                            const DatasetOptions& options) {
  if (positives.size() <= options.val_size + options.test_size) {
    fail(Errc::kInsufficientData,
         std::to_string(positives.size()) + " positives cannot fill val=" +
             std::to_string(options.val_size) +
             " test=" + std::to_string(options.test_size));
  }
  if (!(options.negative_ratio >= 0.0 && options.negative_ratio <= 1.0)) {
    fail(Errc::kInvalidArgument, "negative_ratio must lie in [0, 1]");
  }

  Rng rng(options.seed);
  DatasetSplits splits;
  splits.seed = options.seed;

  std::vector<std::vector<EntitySpan>> spans(positives.size());
  std::vector<EntitySpan> all_spans;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    spans[i] = recognize_entities(positives[i].cot, provider);
    all_spans.insert(all_spans.end(), spans[i].begin(), spans[i].end());
  }
  const EntityPool pool = make_pool(all_spans);

  std::vector<CounterfactualRecord> records;
  records.reserve(positives.size() * 2);
  for (std::size_t i = 0; i < positives.size(); ++i) {
    CounterfactualRecord rec;
    rec.id = i;
    rec.question = positives[i].question;
    rec.original_cot = positives[i].cot;
    rec.label = true;
    records.push_back(std::move(rec));
  }

  const auto wanted = static_cast<std::size_t>(
      std::llround(options.negative_ratio * static_cast<double>(positives.size())));
  std::vector<std::size_t> order(positives.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  std::size_t made = 0;
  for (std::size_t k = 0; k < order.size() && made < wanted; ++k) {
    const std::size_t src = order[k];
    try {
      CounterfactualRecord neg = substitute_entity(positives[src], spans[src], pool, rng);
      neg.id = positives.size() + made;
      records.push_back(std::move(neg));
      ++made;
    } catch (const Error& e) {
      if (e.code() != Errc::kNoSubstitutable) throw;
      splits.skipped.push_back({src, e.what()});
    }
  }

  rng.shuffle(std::span<CounterfactualRecord>(records));
  auto it = records.begin();
  splits.validation.assign(std::make_move_iterator(it),
                           std::make_move_iterator(it + static_cast<std::ptrdiff_t>(options.val_size)));
  it += static_cast<std::ptrdiff_t>(options.val_size);
  splits.test.assign(std::make_move_iterator(it),
                     std::make_move_iterator(it + static_cast<std::ptrdiff_t>(options.test_size)));
  it += static_cast<std::ptrdiff_t>(options.test_size);
  splits.train.assign(std::make_move_iterator(it), std::make_move_iterator(records.end()));
  return splits;
}

std::string record_to_jsonl(const CounterfactualRecord& record) {
  nlohmann::ordered_json j;
  j["question"] = record.question;
  j["cot"] = record.cot();
  j["label"] = record.label;
  if (record.swap) {
    const auto& s = *record.swap;
    nlohmann::ordered_json swap;
    swap["surface"] = s.original.surface;
    swap["type"] = std::string(to_string(s.original.type));
    swap["start"] = s.original.start;
    swap["end"] = s.original.end;
    swap["replacement"] = s.replacement;
    j["swap"] = std::move(swap);
  }
  return j.dump();
}

CounterfactualRecord record_from_jsonl(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kParseError, e.what());
  }
  CounterfactualRecord rec;
  rec.question = j.at("question").get<std::string>();
  const auto cot = j.at("cot").get<std::string>();
  rec.label = j.at("label").get<bool>();
  if (j.contains("swap") && !j["swap"].is_null()) {
    const auto& s = j["swap"];
    const auto type = parse_entity_type(s.at("type").get<std::string>());
    if (!type) fail(Errc::kParseError, "unknown entity type in swap");
    Swap swap;
    swap.original = {s.at("surface").get<std::string>(), *type,
                     s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>()};
    swap.replacement = s.at("replacement").get<std::string>();
    // Rebuild the original text from the recorded swap.
    if (swap.original.start > cot.size() ||
        cot.compare(swap.original.start, swap.replacement.size(), swap.replacement) != 0) {
      fail(Errc::kParseError, "swap offsets do not match the cot");
    }
    rec.original_cot = cot.substr(0, swap.original.start) + swap.original.surface +
                       cot.substr(swap.original.start + swap.replacement.size());
    rec.perturbed_cot = cot;
    rec.swap = std::move(swap);
  } else {
    rec.original_cot = cot;
  }
  return rec;
}

std::string records_to_jsonl(const std::vector<CounterfactualRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_jsonl(r);
    out += '\n';
  }
  return out;
}

std::vector<SourceSample> read_source_jsonl(std::string_view text) {
  std::vector<SourceSample> out;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("question").get<std::string>(), j.at("cot").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::kParseError, e.what());
    }
  }
  return out;
}

namespace {

struct TypedList {
  EntityType type;
  std::vector<std::string> surfaces;
};

const std::vector<TypedList>& synthetic_entities() {
  static const std::vector<TypedList> kLists = {
      {EntityType::kPerson,
       {"Adelaide Anne Procter", "Gene Wilder", "Marie Curie", "Niels Bohr",
        "Albert Einstein", "Ada Lovelace", "Alan Turing", "Rosalind Franklin",
        "Johannes Kepler", "Grace Hopper", "Emmy Noether", "Srinivasa Ramanujan"}},
      {EntityType::kDate,
       {"30 October 1825", "2 February 1864", "7 November 1867", "4 July 1776",
        "12 March 1921", "23 June 1912", "14 March 1879", "10 December 1815"}},
      {EntityType::kOrg,
       {"Royal Society", "United Nations", "University of Cambridge", "Bell Labs",
        "Pasteur Institute", "European Space Agency", "Nobel Committee"}},
      {EntityType::kWorkOfArt,
       {"Legends and Lyrics", "Moby-Dick", "Principia Mathematica",
        "On the Origin of Species", "Don Quixote", "Inception"}},
      {EntityType::kGpe,
       {"France", "Poland", "Denmark", "Germany", "England", "New York", "Tokyo",
        "Vienna"}},
      {EntityType::kFac,
       {"Eiffel Tower", "Brooklyn Bridge", "JFK Airport", "Hoover Dam"}},
      {EntityType::kEvent,
       {"World War II", "Olympics", "French Revolution", "Solvay Conference"}},
      {EntityType::kLoc, {"Himalayas", "Sahara Desert", "Amazon River", "Alps"}},
      {EntityType::kNorp, {"American", "Polish", "Danish", "Buddhist"}},
      {EntityType::kProduct, {"iPhone", "Tesla Model S", "Walkman", "Model T"}},
      {EntityType::kCardinal, {"forty-two", "one million", "three hundred", "seven"}},
      {EntityType::kQuantity, {"5 kilograms", "10 meters", "300 kilometers"}},
      {EntityType::kLaw, {"Magna Carta", "GDPR", "Bill of Rights"}},
      {EntityType::kOrdinal, {"second", "third", "tenth"}},
      {EntityType::kTime, {"midnight", "noon", "5:00 PM"}},
      {EntityType::kMoney, {"$100", "$2 billion", "50 million euros"}},
      {EntityType::kLanguage, {"English", "Mandarin", "Latin", "Esperanto"}},
      {EntityType::kPercent, {"50%", "20 percent", "75%"}},
  };
  return kLists;
}

struct Template {
  std::string question;
  std::string cot;
};

// Placeholders are {TYPE}; a repeated placeholder reuses the same draw.
const std::vector<Template>& synthetic_templates() {
  static const std::vector<Template> kTemplates = {
      {"Who was {PERSON}?",
       "First, {PERSON} was born in {GPE} on {DATE}.\n\nNext, {PERSON} joined the "
       "{ORG} and published {WORK_OF_ART}.\n\nFinally, the {ORDINAL} edition sold for "
       "{MONEY}."},
      {"Where did {PERSON} present the results?",
       "First, the {NORP} delegation travelled to {GPE} for the {EVENT}. Next, "
       "{PERSON} spoke at {TIME} near the {FAC}. Finally, about {PERCENT} of the "
       "audience read {LANGUAGE}."},
      {"What did the {ORG} fund?",
       "First, the {ORG} approved {MONEY} on {DATE}.\n\nNext, the survey covered "
       "{QUANTITY} of the {LOC}.\n\nWait, the report cites the {LAW} and {CARDINAL} "
       "witnesses."},
      {"Which product did {PERSON} endorse?",
       "First, {PERSON} endorsed the {PRODUCT} in {GPE}. Next, sales rose by "
       "{PERCENT} after the {EVENT}. Finally, the {ORG} confirmed it on {DATE}."},
      {"When was {WORK_OF_ART} translated?",
       "First, {WORK_OF_ART} was translated into {LANGUAGE} on {DATE}.\n\nNext, "
       "{PERSON} from {GPE} edited the {ORDINAL} printing.\n\nFinally, copies were "
       "stored near the {FAC}."},
  };
  return kTemplates;
}

std::string fill(const std::string& pattern,
                 const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const std::size_t open = pattern.find('{', pos);
    if (open == std::string::npos) {
      out.append(pattern, pos);
      break;
    }
    const std::size_t close = pattern.find('}', open);
    out.append(pattern, pos, open - pos);
    out += values.at(pattern.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
  return out;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(std::size_t count, std::uint64_t seed) {
  SyntheticCorpus corpus;
  for (const auto& list : synthetic_entities()) {
    for (const auto& s : list.surfaces) corpus.gazetteer.add(s, list.type);
  }
  Rng rng(seed);
  const auto& templates = synthetic_templates();
  corpus.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Template& t = templates[rng.uniform_index(templates.size())];
    std::map<std::string, std::string> values;
    for (const auto& list : synthetic_entities()) {
      values[std::string(to_string(list.type))] =
          list.surfaces[rng.uniform_index(list.surfaces.size())];
    }
    corpus.samples.push_back({fill(t.question, values), fill(t.cot, values)});
  }
  return corpus;
}

}  // namespace factstep::augment
