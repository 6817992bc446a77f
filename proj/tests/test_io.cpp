#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>

#include "oracles.hpp"
#include "riskvest/io.hpp"

using namespace riskvest;
using io::json;

namespace {

const std::string kSynthetic = std::string(RISKVEST_DATA_DIR) + "/synthetic-10x13.json";

json small_doc() {
  return json::parse(R"({
    "sigma": 0.1,
    "targets": [{"id": "a", "impact": 10, "threat": 0.5}],
    "controls": [{"id": "c", "levels": [
      {"level": 0, "directCost": 0, "indirectCost": 0, "efficacy": {"a": 0}},
      {"level": 1, "directCost": 2, "indirectCost": 0.5, "efficacy": {"a": 0.4}}]}]
  })");
}

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidValue;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("riskvest-io-" + name)).string();
}

SweepCell cell(double b, double u, double mean, std::vector<int> levels) {
  SweepCell c;
  c.budget = b;
  c.uncertainty = u;
  c.meanDamage = mean;
  c.stdDamage = mean / 7.0;
  c.infeasibleRate = 0.13;
  c.modalFrequency = 0.31;
  c.modalLevels = std::move(levels);
  c.trials = 100;
  return c;
}

}  // namespace

TEST_CASE("synthetic case loads") {
  const auto vc = io::load_case(kSynthetic);
  CHECK(vc.control_count() == 10);
  CHECK(vc.target_count() == 13);
  CHECK(vc.study().sigma > 0.0);
}

TEST_CASE("minimal document parses") {
  const auto cs = io::case_from_json(small_doc());
  REQUIRE(cs.controls.size() == 1);
  CHECK(cs.controls[0].name == "c");
  CHECK(cs.targets[0].name == "a");
  CHECK(cs.controls[0].levels[1].efficacy.at("a") == 0.4);
  CHECK_FALSE(cs.controls[0].levels[1].sigma.has_value());
}

TEST_CASE("missing sigma names the key") {
  auto doc = small_doc();
  doc.erase("sigma");
  std::string msg;
  CHECK(code_of([&] { io::case_from_json(doc); }, &msg) == ErrorCode::SchemaError);
  CHECK(msg.find("sigma") != std::string::npos);
}

TEST_CASE("unknown keys are rejected at every depth") {
  auto doc = small_doc();
  doc["extra"] = 1;
  std::string msg;
  CHECK(code_of([&] { io::case_from_json(doc); }, &msg) == ErrorCode::SchemaError);
  CHECK(msg.find("extra") != std::string::npos);

  doc = small_doc();
  doc["controls"][0]["levels"][1]["cost"] = 3;
  CHECK(code_of([&] { io::case_from_json(doc); }, &msg) == ErrorCode::SchemaError);
  CHECK(msg.find("$.controls[0].levels[1].cost") != std::string::npos);
}

TEST_CASE("wrong types are schema errors") {
  auto doc = small_doc();
  doc["targets"][0]["impact"] = "big";
  CHECK(code_of([&] { io::case_from_json(doc); }) == ErrorCode::SchemaError);
  doc = small_doc();
  doc["controls"][0]["levels"][1]["level"] = 1.5;
  CHECK(code_of([&] { io::case_from_json(doc); }) == ErrorCode::SchemaError);
  doc = small_doc();
  doc["controls"] = json::object();
  CHECK(code_of([&] { io::case_from_json(doc); }) == ErrorCode::SchemaError);
}

TEST_CASE("malformed JSON reports line and column") {
  std::string msg;
  CHECK(code_of([&] { io::parse_case("{\n  \"sigma\": 0.1,\n  oops\n}", "bad.json"); }, &msg) ==
        ErrorCode::ParseError);
  CHECK(msg.find("bad.json") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("unreadable files are IoError") {
  CHECK(code_of([] { io::load_case("/nonexistent/case.json"); }) == ErrorCode::IoError);
}

TEST_CASE("save then load round-trips") {
  std::mt19937_64 rng(7);
  auto cs = fixture::random_case(rng, 3, 3, 4);
  cs.controls[1].levels[2].sigma = 0.02;
  cs.metadata["note"] = "round trip";
  const auto path = temp_path("roundtrip.json");
  io::save_case(path, cs);
  const auto back = io::load_case(path);
  CHECK(back.study() == cs);
  std::remove(path.c_str());

  const auto synthetic = io::load_case(kSynthetic);
  CHECK(io::case_from_json(io::case_to_json(synthetic.study())) == synthetic.study());
}

TEST_CASE("number and level formatting") {
  CHECK(io::format_number(0.05) == "0.05");
  CHECK(io::format_number(-0.0) == "0");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333");
  CHECK(io::levels_to_string({4, 0, 1, 0}) == "4-0-1-0");
  CHECK(io::levels_from_string("4-0-1-0") == std::vector<int>{4, 0, 1, 0});
  CHECK_THROWS_AS(io::levels_from_string("4-x-1"), Error);
  CHECK_THROWS_AS(io::levels_from_string("4-1b"), Error);
}

TEST_CASE("solution table rows") {
  std::map<double, std::vector<int>> rows;
  rows[0.1] = {1, 1, 0, 0, 0, 0, 0, 0, 0, 2};
  rows[0.0] = {4, 0, 1, 0, 0, 0, 0, 0, 0, 0};
  rows[0.05] = {};
  const auto text = io::solution_table(rows, 10);
  CHECK(text ==
        "Uncertainty | 1 2 3 4 5 6 7 8 9 10\n"
        "0% | 4 0 1 0 0 0 0 0 0 0\n"
        "5% | 0 0 0 0 0 0 0 0 0 0\n"
        "10% | 1 1 0 0 0 0 0 0 0 2\n");
  std::map<double, std::vector<int>> base{{25, {3, 2, 1}}, {5, {1, 0, 0}}};
  CHECK(io::base_table(base, 3) == "Budget | 1 2 3\n5 | 1 0 0\n25 | 3 2 1\n");
}

TEST_CASE("plot data groups by budget") {
  std::vector<SweepCell> cells;
  for (double b : {25.0, 5.0, 10.0, 15.0, 20.0})
    for (double u : {0.25, 0.0, 0.05, 0.1, 0.15, 0.2}) cells.push_back(cell(b, u, 100 - b - u, {1}));
  const auto plot = io::plot_data(cells);
  REQUIRE(plot["series"].size() == 5);
  double lastBudget = -1;
  for (const auto& s : plot["series"]) {
    CHECK(s["budget"].get<double>() > lastBudget);
    lastBudget = s["budget"].get<double>();
    REQUIRE(s["points"].size() == 6);
    double lastU = -1;
    for (const auto& p : s["points"]) {
      CHECK(p["uncertainty"].get<double>() > lastU);
      lastU = p["uncertainty"].get<double>();
      CHECK(p["mean"].get<double>() == 100 - lastBudget - lastU);
    }
  }
  const auto one = io::plot_data({cell(5, 0, 50, {1})});
  CHECK(one["series"].size() == 1);
  CHECK(one["series"][0]["points"].size() == 1);
  CHECK(io::plot_data({})["series"].empty());
}

TEST_CASE("sweep CSV round-trips to six significant digits") {
  SweepResult r;
  r.seed = 9;
  r.trials = 100;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 100.0);
  for (double b : {5.0, 10.0})
    for (double u : {0.0, 0.05}) r.cells.push_back(cell(b, u, d(rng), {1, 2, 0}));
  const auto text = io::sweep_to_csv(r);
  CHECK(text.rfind("# ", 0) == 0);
  const auto table = io::sweep_from_csv(text);
  CHECK(table.metadata.at("seed") == "9");
  CHECK(table.metadata.at("trials") == "100");
  REQUIRE(table.cells.size() == r.cells.size());
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto& a = r.cells[i];
    const auto& b = table.cells[i];
    CHECK(b.budget == a.budget);
    CHECK(b.uncertainty == a.uncertainty);
    CHECK(b.meanDamage == doctest::Approx(a.meanDamage).epsilon(5e-6));
    CHECK(b.stdDamage == doctest::Approx(a.stdDamage).epsilon(5e-6));
    CHECK(b.infeasibleRate == a.infeasibleRate);
    CHECK(b.modalFrequency == a.modalFrequency);
    CHECK(b.modalLevels == a.modalLevels);
  }
}

TEST_CASE("malformed sweep CSV") {
  CHECK(code_of([] { io::sweep_from_csv(""); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::sweep_from_csv("budget,u\n1,2\n"); }) == ErrorCode::ParseError);
  const std::string h = std::string(io::kSweepHeader) + "\n";
  CHECK(code_of([&] { io::sweep_from_csv(h + "5,0,1,2\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { io::sweep_from_csv(h + "5,0,x,0,0,1,1-2\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { io::sweep_from_csv(h + "5,0,1,0,0,1,1-?\n"); }) == ErrorCode::ParseError);
  CHECK(io::sweep_from_csv(h).cells.empty());
  CHECK(io::sweep_from_csv(h + "5,0,1,0,0,1,1-2\r\n").cells.size() == 1);
}

TEST_CASE("report renders tables and refuses an empty sweep") {
  CHECK(code_of([] { io::render_report({}); }) == ErrorCode::InvalidValue);
  io::SweepTable t;
  t.metadata["seed"] = "0";
  t.cells = {cell(5, 0, 50, {2, 1}), cell(5, 0.05, 51, {1, 2}), cell(10, 0, 25, {3, 1})};
  const auto md = io::render_report(t);
  CHECK(md.find("## Optimal solutions for budget 5") != std::string::npos);
  CHECK(md.find("## Optimal solutions for budget 10") != std::string::npos);
  CHECK(md.find("0% | 2 1\n5% | 1 2\n") != std::string::npos);
  CHECK(md.find("Budget | 1 2\n5 | 1 1\n10 | 3 1\n") != std::string::npos);
  CHECK(md.find("\"series\"") != std::string::npos);
}

TEST_CASE("fixture of reference modal rows gives the published base rows") {
  const auto t = io::sweep_from_csv(io::read_file(std::string(RISKVEST_FIXTURE_DIR) + "/reference-modal.csv"));
  CHECK(t.cells.size() == 30);
  const auto md = io::render_report(t);
  CHECK(md.find("\n25 | 3 2 1 3 0") != std::string::npos);
}
