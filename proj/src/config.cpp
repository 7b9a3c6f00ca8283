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

#include "factstep/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>

#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/text.hpp"

namespace factstep::config {

namespace {

class LineParser {
 public:
  LineParser(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  Value value() {
    skip_ws();
    if (at_end()) error("missing value");
    Value v;
    const char c = s_[pos_];
    if (c == '"') {
      v = string();
    } else if (c == '[') {
      v = array();
    } else if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      v = true;
    } else if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      v = false;
    } else {
      v = number();
    }
    skip_ws();
    if (!at_end() && s_[pos_] != '#') error("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(Errc::kParseError, "config line " + std::to_string(line_) + ": " + what);
  }
  bool at_end() const { return pos_ >= s_.size(); }
  void skip_ws() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::string string() {
    ++pos_;
    std::string out;
    while (!at_end() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (at_end()) error("dangling escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: error(std::string("unknown escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (at_end()) error("unterminated string");
    ++pos_;
    return out;
  }

  double number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                         s_[pos_] == '-' || s_[pos_] == '+' || s_[pos_] == '_')) {
      ++pos_;
    }
    std::string token;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') token.push_back(c);
    }
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      error("bad number '" + token + "'");
    }
    return v;
  }

  Value array() {
    ++pos_;
    std::vector<double> nums;
    std::vector<std::string> strs;
    for (;;) {
      skip_ws();
      if (at_end()) error("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        break;
      }
      if (s_[pos_] == '"') {
        strs.push_back(string());
      } else {
        nums.push_back(number());
      }
      skip_ws();
      if (!at_end() && s_[pos_] == ',') ++pos_;
    }
    if (!nums.empty() && !strs.empty()) error("mixed array");
    if (!strs.empty()) return strs;
    return nums;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

}  // namespace

Document parse(std::string_view text) {
  Document doc;
  std::string section;
  std::size_t line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) {
        fail(Errc::kParseError, "config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = std::string(trim(line.substr(1, close - 1)));
      if (!valid_key(section)) {
        fail(Errc::kParseError, "config line " + std::to_string(line_no) + ": bad section name");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(Errc::kParseError, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) {
      fail(Errc::kParseError, "config line " + std::to_string(line_no) + ": bad key '" + key + "'");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (doc.count(full)) {
      fail(Errc::kParseError, "config line " + std::to_string(line_no) + ": duplicate key " + full);
    }
    doc[full] = LineParser(line.substr(eq + 1), line_no).value();
  }
  return doc;
}

namespace {

[[noreturn]] void type_error(const std::string& key, const char* want) {
  fail(Errc::kParseError, "config key " + key + " must be " + want);
}

double as_double(const std::string& key, const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  type_error(key, "a number");
}

std::size_t as_count(const std::string& key, const Value& v) {
  const double d = as_double(key, v);
  if (d < 0.0 || d != std::floor(d)) type_error(key, "a non-negative integer");
  return static_cast<std::size_t>(d);
}

std::string as_string(const std::string& key, const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  type_error(key, "a string");
}

std::vector<double> as_numbers(const std::string& key, const Value& v) {
  if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
  type_error(key, "an array of numbers");
}

std::vector<std::string> as_strings(const std::string& key, const Value& v) {
  if (const auto* a = std::get_if<std::vector<std::string>>(&v)) return *a;
  type_error(key, "an array of strings");
}

}  // namespace

AppConfig from_document(const Document& doc) {
  AppConfig c;
  using Setter = std::function<void(const std::string&, const Value&)>;
  auto num = [](double& field) {
    return Setter([&field](const std::string& k, const Value& v) { field = as_double(k, v); });
  };
  auto count = [](std::size_t& field) {
    return Setter([&field](const std::string& k, const Value& v) { field = as_count(k, v); });
  };
  auto str = [](std::string& field) {
    return Setter([&field](const std::string& k, const Value& v) { field = as_string(k, v); });
  };

  const std::map<std::string, Setter> setters{
      {"reward.tau", num(c.reward.tau)},
      {"reward.delta", num(c.reward.delta)},
      {"reward.alpha", num(c.reward.alpha)},
      {"reward.beta_fmt", num(c.reward.beta_fmt)},
      {"reward.gamma", num(c.reward.gamma)},
      {"reward.eta", num(c.reward.eta)},
      {"reward.sim_pass", num(c.reward.sim_pass)},
      {"reward.sim_fail", num(c.reward.sim_fail)},
      {"reward.step_len_min", count(c.reward.step_len_min)},
      {"reward.step_len_max", count(c.reward.step_len_max)},
      {"reward.total_len_min", count(c.reward.total_len_min)},
      {"reward.total_len_max", count(c.reward.total_len_max)},
      {"reward.weights.fact", num(c.reward.weights.fact)},
      {"reward.weights.sim", num(c.reward.weights.sim)},
      {"reward.weights.format", num(c.reward.weights.format)},
      {"reward.weights.length", num(c.reward.weights.length)},
      {"grpo.epsilon", num(c.grpo.epsilon)},
      {"grpo.beta_kl", num(c.grpo.beta_kl)},
      {"grpo.group_size", count(c.grpo.group_size)},
      {"grpo.learning_rate", num(c.grpo.learning_rate)},
      {"grpo.std_floor", num(c.grpo.std_floor)},
      {"grpo.inner_steps", count(c.grpo.inner_steps)},
      {"grpo.kl_placement",
       [&c](const std::string& k, const Value& v) {
         const std::string s = as_string(k, v);
         if (s == "per_completion") {
           c.grpo.kl_placement = grpo::KlPlacement::kPerCompletion;
         } else if (s == "outside_sum") {
           c.grpo.kl_placement = grpo::KlPlacement::kOutsideSum;
         } else {
           type_error(k, "\"per_completion\" or \"outside_sum\"");
         }
       }},
      {"delimiters.delimiters",
       [&c](const std::string& k, const Value& v) { c.delimiters.delimiters = as_strings(k, v); }},
      {"delimiters.min_step_chars", count(c.delimiters.min_step_chars)},
      {"dataset.val_size", count(c.dataset.val_size)},
      {"dataset.test_size", count(c.dataset.test_size)},
      {"dataset.negative_ratio", num(c.dataset.negative_ratio)},
      {"sweep.temperatures",
       [&c](const std::string& k, const Value& v) { c.sweep.temperatures = as_numbers(k, v); }},
      {"sweep.samples_per_temp", count(c.sweep.samples_per_temp)},
      {"sweep.tau", num(c.sweep.tau)},
      {"sweep.parallelism", count(c.sweep.parallelism)},
      {"endpoints.ner", str(c.endpoints.ner)},
      {"endpoints.scorer", str(c.endpoints.scorer)},
      {"endpoints.embedder", str(c.endpoints.embedder)},
      {"endpoints.generator", str(c.endpoints.generator)},
  };

  for (const auto& [key, value] : doc) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail(Errc::kParseError, "unknown config key " + key);
    it->second(key, value);
  }
  c.reward.validate();
  c.grpo.validate();
  if (c.sweep.temperatures.empty()) fail(Errc::kParseError, "sweep.temperatures is empty");
  if (c.delimiters.delimiters.empty()) fail(Errc::kParseError, "delimiters.delimiters is empty");
  return c;
}

AppConfig load(const std::filesystem::path& path) { return from_document(parse(read_text_file(path))); }

std::string to_json(const AppConfig& c) {
  nlohmann::ordered_json j;
  const auto& r = c.reward;
  j["reward"] = {{"tau", r.tau},
                 {"delta", r.delta},
                 {"alpha", r.alpha},
                 {"beta_fmt", r.beta_fmt},
                 {"gamma", r.gamma},
                 {"eta", r.eta},
                 {"sim_pass", r.sim_pass},
                 {"sim_fail", r.sim_fail},
                 {"step_len_min", r.step_len_min},
                 {"step_len_max", r.step_len_max},
                 {"total_len_min", r.total_len_min},
                 {"total_len_max", r.total_len_max},
                 {"weights",
                  {{"fact", r.weights.fact},
                   {"sim", r.weights.sim},
                   {"format", r.weights.format},
                   {"length", r.weights.length}}}};
  const auto& g = c.grpo;
  j["grpo"] = {{"epsilon", g.epsilon},
               {"beta_kl", g.beta_kl},
               {"group_size", g.group_size},
               {"learning_rate", g.learning_rate},
               {"std_floor", g.std_floor},
               {"inner_steps", g.inner_steps},
               {"kl_placement",
                g.kl_placement == grpo::KlPlacement::kPerCompletion ? "per_completion" : "outside_sum"}};
  j["delimiters"] = {{"delimiters", c.delimiters.delimiters},
                     {"min_step_chars", c.delimiters.min_step_chars}};
  j["dataset"] = {{"val_size", c.dataset.val_size},
                  {"test_size", c.dataset.test_size},
                  {"negative_ratio", c.dataset.negative_ratio}};
  j["sweep"] = {{"temperatures", c.sweep.temperatures},
                {"samples_per_temp", c.sweep.samples_per_temp},
                {"tau", c.sweep.tau},
                {"parallelism", c.sweep.parallelism}};
  j["endpoints"] = {{"ner", c.endpoints.ner},
                    {"scorer", c.endpoints.scorer},
                    {"embedder", c.endpoints.embedder},
                    {"generator", c.endpoints.generator}};
  return j.dump(2);
}

}  // namespace factstep::config
