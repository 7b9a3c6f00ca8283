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

#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "factstep/error.hpp"
#include "factstep/http_clients.hpp"

using namespace factstep;
using nlohmann::json;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::kInvalidArgument;
}

class LocalServer {
 public:
  LocalServer() {
    server_.Post("/ner", [](const httplib::Request& req, httplib::Response& res) {
      const auto text = json::parse(req.body).at("text").get<std::string>();
      json spans = json::array();
      if (const auto pos = text.find("Bohr"); pos != std::string::npos) {
        spans.push_back({{"surface", "Bohr"}, {"type", "PERSON"}, {"start", pos}, {"end", pos + 4}});
      }
      res.set_content(json{{"spans", spans}}.dump(), "application/json");
    });
    server_.Post("/score", [](const httplib::Request& req, httplib::Response& res) {
      const auto step = json::parse(req.body).at("step").get<std::string>();
      res.set_content(json{{"probability", step.size() > 5 ? 0.8 : 0.2}}.dump(), "application/json");
    });
    server_.Post("/embed", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"vector", {1.0, 2.0}}}.dump(), "application/json");
    });
    server_.Post("/generate", [](const httplib::Request& req, httplib::Response& res) {
      const auto n = json::parse(req.body).at("n").get<std::size_t>();
      json cs = json::array();
      for (std::size_t i = 0; i < n; ++i) cs.push_back({{"text", "c" + std::to_string(i)}, {"logprob", -1.0}});
      res.set_content(json{{"completions", cs}}.dump(), "application/json");
    });
    server_.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json", "text/plain");
    });
    server_.Post("/error", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace

TEST_CASE("url parsing") {
  const auto u = http::parse_url("http://localhost:8080/v1/score");
  CHECK(u.host == "localhost");
  CHECK(u.port == 8080);
  CHECK(u.path == "/v1/score");
  CHECK(http::parse_url("http://example.org").port == 80);
  CHECK(code_of([] { http::parse_url("ftp://x"); }) == Errc::kInvalidArgument);
}

TEST_CASE("clients against a local server") {
  LocalServer s;
  http::HttpEntityProvider ner(s.url("/ner"));
  const auto spans = ner.find("Niels Bohr won.");
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].surface == "Bohr");
  CHECK(spans[0].start == 6);

  http::HttpFactScorer scorer(s.url("/score"));
  CHECK(scorer.score("q", "a long step").value == 0.8);

  http::HttpEmbedder embedder(s.url("/embed"));
  CHECK(embedder.embed("x") == std::vector<double>{1.0, 2.0});

  http::HttpCompletionSampler gen(s.url("/generate"));
  const auto cs = gen.sample("p", 3, 0.7, 1);
  REQUIRE(cs.size() == 3);
  CHECK(cs[2].text == "c2");

  CHECK(code_of([&] { http::HttpFactScorer(s.url("/broken")).score("q", "s"); }) ==
        Errc::kScorerUnavailable);
  CHECK(code_of([&] { http::HttpEmbedder(s.url("/error")).embed("x"); }) ==
        Errc::kEmbedderUnavailable);
}

TEST_CASE("unreachable endpoints") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  const std::string url = "http://127.0.0.1:" + std::to_string(port) + "/x";
  CHECK(code_of([&] { http::HttpEntityProvider(url, 2).find("t"); }) == Errc::kProviderUnavailable);
  CHECK(code_of([&] { http::HttpCompletionSampler(url, 2).sample("p", 1, 1.0, 0); }) ==
        Errc::kGeneratorUnavailable);
}
