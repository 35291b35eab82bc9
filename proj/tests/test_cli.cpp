#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "ncmart/cli.hpp"

using namespace ncmart::cli;

namespace {

ExperimentConfig make(const std::string& cmd) {
  ExperimentConfig c;
  c.command = cmd;
  return c;
}

std::string render(const ExperimentResult& r) {
  std::ostringstream os;
  write(r, os);
  return os.str();
}

}  // namespace

TEST_CASE("tn-bounds grid") {
  ExperimentConfig c = make("tn-bounds");
  c.n_list = {1, 2, 5};
  c.p_list = {0.25, 0.4};
  const ExperimentResult r = run(c);
  CHECK(r.rows.size() == 6);
  CHECK(r.passed);
  CHECK(std::get<double>(r.rows[0][3]) == doctest::Approx(1.0));
  CHECK(std::get<double>(r.rows[1][3]) == doctest::Approx(1.0));
}

TEST_CASE("mu rows and determinism") {
  ExperimentConfig c = make("mu");
  c.n_list = {8, 12};
  c.t = 1e-3;
  c.budget = 100;
  c.seed = 5;
  const ExperimentResult r = run(c);
  REQUIRE(r.rows.size() == 2);
  CHECK(std::get<bool>(r.rows[0][3]));  // certificate applies at t = 1e-3
  CHECK(std::get<double>(r.rows[0][2]) <= std::get<double>(r.rows[0][5]));
  CHECK(r.passed);
  c.format = "json";
  CHECK(render(run(c)) == render(run(c)));
  c.t = 0.1;
  c.format = "csv";
  CHECK(render(run(c)) == render(run(c)));
  CHECK(render(run(c)).find("# summary slope=") != std::string::npos);
}

TEST_CASE("chain rows") {
  ExperimentConfig c = make("chain");
  c.seed = 2;
  const ExperimentResult r = run(c);
  CHECK(r.rows.size() == 50);
  CHECK(r.passed);
  c.p_list = {0.5};
  CHECK_THROWS_AS(run(c), std::invalid_argument);
}

TEST_CASE("obstruction") {
  ExperimentConfig c = make("obstruction");
  const ExperimentResult r = run(c);
  CHECK(r.passed);
  CHECK(r.rows.size() == 100);
  c.p_list = {2.0};
  CHECK_THROWS_WITH_AS(run(c), doctest::Contains("p >= 2"), std::invalid_argument);
}

TEST_CASE("ergodic reports a minimal K") {
  ExperimentConfig c = make("ergodic");
  c.n_list = {2};
  c.trials = 20;
  const ExperimentResult r = run(c);
  CHECK(r.passed);
  bool found = false;
  for (const auto& [k, v] : r.summary)
    if (k == "N=2:minimal_K") found = std::holds_alternative<long long>(v);
  CHECK(found);
}

TEST_CASE("json output follows the documented schema") {
  ExperimentConfig c = make("tn-bounds");
  c.n_list = {3};
  c.p_list = {0.1};
  c.format = "json";
  c.seed = 99;
  const auto j = nlohmann::json::parse(render(run(c)));
  CHECK(j.contains("config"));
  CHECK(j["config"]["seed"] == "99");
  CHECK(j["rows"].size() == 1);
  CHECK(j["rows"][0]["pass"] == true);
  CHECK(j["summary"]["passed"] == true);
  CHECK(j["version"] == version());
}

TEST_CASE("csv output is self-describing") {
  ExperimentConfig c = make("obstruction");
  c.n_list = {6};
  const std::string s = render(run(c));
  CHECK(s.rfind("# ncmart ", 0) == 0);
  CHECK(s.find("# config seed=0") != std::string::npos);
  CHECK(s.find("N,log_bound,bound\n") != std::string::npos);
  CHECK(s.find("# summary passed=true") != std::string::npos);
}

TEST_CASE("bad input") {
  CHECK_THROWS_AS(run(make("nope")), std::invalid_argument);
  ExperimentConfig c = make("tn-bounds");
  c.format = "xml";
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c.format = "csv";
  c.n_list = {5000};
  CHECK_THROWS_AS(run(c), std::invalid_argument);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(INFINITY) == "inf");
}
