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

#include "factstep/http_clients.hpp"

#include <charconv>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "factstep/error.hpp"

namespace factstep::http {

Url parse_url(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    fail(Errc::kInvalidArgument, "only http:// endpoints are supported: " + std::string(url));
  }
  std::string_view rest = url.substr(kScheme.size());
  Url u;
  const auto slash = rest.find('/');
  if (slash != std::string_view::npos) {
    u.path = std::string(rest.substr(slash));
    rest = rest.substr(0, slash);
  }
  const auto colon = rest.rfind(':');
  if (colon != std::string_view::npos) {
    const auto port = rest.substr(colon + 1);
    const auto res = std::from_chars(port.data(), port.data() + port.size(), u.port);
    if (res.ec != std::errc() || res.ptr != port.data() + port.size() || u.port <= 0 || u.port > 65535) {
      fail(Errc::kInvalidArgument, "bad port in " + std::string(url));
    }
    rest = rest.substr(0, colon);
  }
  if (rest.empty()) fail(Errc::kInvalidArgument, "missing host in " + std::string(url));
  u.host = std::string(rest);
  return u;
}

namespace {

nlohmann::json post_json(const std::string& url, int timeout, const nlohmann::json& body,
                         Errc unavailable) {
  const Url u = parse_url(url);
  httplib::Client cli(u.host, u.port);
  cli.set_connection_timeout(timeout, 0);
  cli.set_read_timeout(timeout, 0);
  cli.set_write_timeout(timeout, 0);
  auto res = cli.Post(u.path, body.dump(), "application/json");
  if (!res) fail(unavailable, url + ": " + httplib::to_string(res.error()));
  if (res->status != 200) fail(unavailable, url + ": HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    fail(unavailable, url + ": bad JSON reply: " + e.what());
  }
}

}  // namespace

HttpEntityProvider::HttpEntityProvider(std::string url, int timeout_seconds)
    : url_(std::move(url)), timeout_(timeout_seconds) {
  parse_url(url_);
}

std::vector<augment::EntitySpan> HttpEntityProvider::find(std::string_view text) const {
  const auto j = post_json(url_, timeout_, {{"text", text}}, Errc::kProviderUnavailable);
  std::vector<augment::EntitySpan> spans;
  try {
    for (const auto& s : j.at("spans")) {
      const auto type = augment::parse_entity_type(s.at("type").get<std::string>());
      if (!type) fail(Errc::kProviderUnavailable, url_ + ": unknown entity type");
      spans.push_back({s.at("surface").get<std::string>(), *type, s.at("start").get<std::size_t>(),
                       s.at("end").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kProviderUnavailable, url_ + ": " + e.what());
  }
  return spans;
}

HttpFactScorer::HttpFactScorer(std::string url, int timeout_seconds)
    : url_(std::move(url)), timeout_(timeout_seconds) {
  parse_url(url_);
}

factcheck::FactProbability HttpFactScorer::score(std::string_view question, std::string_view step) {
  const auto j =
      post_json(url_, timeout_, {{"question", question}, {"step", step}}, Errc::kScorerUnavailable);
  try {
    return {j.at("probability").get<double>(), j.value("degenerate", false)};
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kScorerUnavailable, url_ + ": " + e.what());
  }
}

HttpEmbedder::HttpEmbedder(std::string url, int timeout_seconds)
    : url_(std::move(url)), timeout_(timeout_seconds) {
  parse_url(url_);
}

std::vector<double> HttpEmbedder::embed(std::string_view text) {
  const auto j = post_json(url_, timeout_, {{"text", text}}, Errc::kEmbedderUnavailable);
  try {
    return j.at("vector").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kEmbedderUnavailable, url_ + ": " + e.what());
  }
}

HttpCompletionSampler::HttpCompletionSampler(std::string url, int timeout_seconds)
    : url_(std::move(url)), timeout_(timeout_seconds) {
  parse_url(url_);
}

std::vector<grpo::Completion> HttpCompletionSampler::sample(std::string_view prompt, std::size_t n,
                                                            double temperature,
                                                            std::uint64_t seed) {
  const auto j = post_json(
      url_, timeout_, {{"prompt", prompt}, {"n", n}, {"temperature", temperature}, {"seed", seed}},
      Errc::kGeneratorUnavailable);
  std::vector<grpo::Completion> out;
  try {
    for (const auto& c : j.at("completions")) {
      out.push_back({c.at("text").get<std::string>(), c.value("logprob", 0.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::kGeneratorUnavailable, url_ + ": " + e.what());
  }
  return out;
}

}  // namespace factstep::http
