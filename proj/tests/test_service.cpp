#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <thread>

#include "golden.hpp"
#include "httplib.h"
#include "riskvest/cli.hpp"
#include "riskvest/service.hpp"

using namespace riskvest;
using io::json;

namespace {

class Running {
 public:
  explicit Running(service::ServiceOptions options = {}) : server_(options) {
    port_ = server_.bind("127.0.0.1", 0);
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_.run(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 200 && !client_->Get("/api/sweeps/none"); ++i)
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ~Running() {
    server_.stop();
    thread_.join();
  }
  httplib::Client& client() { return *client_; }
  service::Server& server() { return server_; }

  httplib::Result post(const std::string& path, const std::string& body) {
    return client_->Post(path, body, "application/json");
  }

  std::string upload(const std::string& casePath) {
    auto res = post("/api/cases", io::read_file(casePath));
    REQUIRE(res);
    REQUIRE(res->status == 201);
    return json::parse(res->body)["caseId"].get<std::string>();
  }

 private:
  service::Server server_;
  int port_ = -1;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST_CASE("case upload: 201, 422, 400") {
  Running s;
  auto res = s.post("/api/cases", io::read_file(golden::synthetic_case()));
  REQUIRE(res);
  CHECK(res->status == 201);
  auto body = json::parse(res->body);
  CHECK(body["controls"] == 10);
  CHECK(body["targets"] == 13);
  CHECK(!body["caseId"].get<std::string>().empty());

  auto cs = io::load_case(golden::synthetic_case()).study();
  cs.controls[0].levels[0].directCost = 2.0;
  cs.controls[1].levels[2].efficacy.begin()->second = 1.0;
  res = s.post("/api/cases", io::case_to_json(cs).dump());
  REQUIRE(res);
  CHECK(res->status == 422);
  body = json::parse(res->body);
  CHECK(body["errors"].size() == 2);
  CHECK(body["errors"][0]["code"] == "NonZeroLevelZero");

  res = s.post("/api/cases", R"({"sigma": 0.1, "targets": [], "controls": [], "x": 1})");
  REQUIRE(res);
  CHECK(res->status == 422);
  CHECK(json::parse(res->body)["errors"][0]["code"] == "SchemaError");

  res = s.post("/api/cases", "{ nope");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = s.post("/api/cases", "[1, 2]");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = s.post("/api/cases", "");
  REQUIRE(res);
  CHECK(res->status == 400);
}

TEST_CASE("solve: unknown case, bad arguments") {
  Running s;
  auto res = s.post("/api/solve", R"({"caseId": "missing", "budget": 5})");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = s.post("/api/solve", R"({"budget": 5})");
  REQUIRE(res);
  CHECK(res->status == 422);
  const auto id = s.upload(golden::synthetic_case());
  for (const char* extra : {R"("budget": -1)", R"("uncertainty": -0.1)", R"("budget": "five")", R"("seed": -3)",
                            R"("bins": 0)"}) {
    CAPTURE(extra);
    res = s.post("/api/solve", "{\"caseId\": \"" + id + "\", " + extra + "}");
    REQUIRE(res);
    CHECK(res->status == 422);
  }
}

TEST_CASE("solve payloads match the CLI byte for byte") {
  Running s;
  const auto id = s.upload(golden::synthetic_case());
  for (const auto& g : golden::kRequests) {
    CAPTURE(g.budget);
    CAPTURE(g.uncertainty);
    json req{{"caseId", id}, {"budget", g.budget}, {"uncertainty", g.uncertainty}, {"seed", g.seed}};
    auto res = s.post("/api/solve", req.dump());
    REQUIRE(res);
    REQUIRE(res->status == 200);
    std::ostringstream out, err;
    REQUIRE(cli::run(golden::solve_args(g), out, err) == cli::kExitOk);
    CHECK(json::parse(res->body) == json::parse(out.str()));
    CHECK(res->body == out.str());
  }
}

TEST_CASE("sweep jobs run to completion") {
  Running s;
  auto res = s.post("/api/sweeps", R"({"caseId": "nope"})");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = s.client().Get("/api/sweeps/job-999");
  REQUIRE(res);
  CHECK(res->status == 404);

  const auto id = s.upload(golden::synthetic_case());
  res = s.post("/api/sweeps", json{{"caseId", id}, {"trials", 0}}.dump());
  REQUIRE(res);
  CHECK(res->status == 422);

  json req{{"caseId", id}, {"budgets", {5, 10}}, {"uncertainties", {0, 0.1}}, {"trials", 2}, {"seed", 3}};
  res = s.post("/api/sweeps", req.dump());
  REQUIRE(res);
  REQUIRE(res->status == 202);
  const auto jobId = json::parse(res->body)["jobId"].get<std::string>();

  json body;
  for (int i = 0; i < 1200; ++i) {
    res = s.client().Get("/api/sweeps/" + jobId);
    REQUIRE(res);
    REQUIRE(res->status == 200);
    body = json::parse(res->body);
    if (body["status"] == "done" || body["status"] == "failed") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  REQUIRE(body["status"] == "done");
  CHECK(body["request"]["caseId"] == id);
  const auto& result = body["result"];
  CHECK(result["cells"].size() == 4);
  CHECK(result["plot"]["series"].size() == 2);

  const auto vc = io::load_case(golden::synthetic_case());
  const auto direct = io::sweep_to_json(sweep(vc, {5, 10}, {0, 0.1}, 2, 3));
  CHECK(result == direct);
}

TEST_CASE("CORS headers only when configured") {
  {
    Running s;
    auto res = s.client().Get("/api/sweeps/job-1");
    REQUIRE(res);
    CHECK_FALSE(res->has_header("Access-Control-Allow-Origin"));
  }
  Running s({1, "http://localhost:5173"});
  auto res = s.client().Get("/api/sweeps/job-1");
  REQUIRE(res);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
  res = s.client().Options("/api/solve");
  REQUIRE(res);
  CHECK(res->status == 204);
}
