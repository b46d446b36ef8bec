#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "flowctl/report.hpp"

using namespace flowctl;

namespace {

RunReport run_of(const std::string& agent, double cost_scale) {
  RunReport r;
  r.scenario = "0";
  r.agent = agent;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    SeedResult x;
    x.seed = s;
    x.status = "completed";
    x.completed = true;
    x.duration = 88 + static_cast<int>(s);
    x.progress = 1.0;
    x.labor_cost = 600'000.0 * cost_scale;
    x.material_cost = 7'400'000.0 * cost_scale + 1000.0 * static_cast<double>(s);
    x.total_cost = x.labor_cost + x.material_cost;
    x.npv = 1'500'000.0 / cost_scale;
    x.reward = 0.9 + 0.01 * static_cast<double>(s);
    r.seeds.push_back(x);
  }
  r.recompute();
  return r;
}

}  // namespace

TEST_CASE("simulated reports satisfy the cost identity and cash ledger") {
  const Scenario sc = load_scenario({"0", {}});
  Rng rng(0);
  const Agent agent = Agent::make(AgentKind::Empirical, rng);
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t logs = 0;
  const RunReport rep = simulate(sc, agent, seeds, [&](std::uint64_t, const std::vector<DayRecord>& days) {
    CHECK_FALSE(days.empty());
    ++logs;
  });
  CHECK(logs == 5);
  CHECK(rep.seeds.size() == 5);
  for (const auto& s : rep.seeds) {
    CHECK(std::abs(s.total_cost - (s.labor_cost + s.material_cost)) <= 1e-6 * s.total_cost);
    CHECK(s.completed == (s.status == "completed"));
  }
  CHECK(rep.aggregate.completion_rate >= 0.0);
  CHECK(rep.aggregate.completion_rate <= 1.0);
}

TEST_CASE("daily logs are byte-identical for a repeated seed") {
  const Scenario sc = load_scenario({"0", {}});
  Rng rng(0);
  const Agent agent = Agent::make(AgentKind::Empirical, rng);
  const std::vector<std::uint64_t> seeds{42};
  std::string first, second;
  simulate(sc, agent, seeds, [&](std::uint64_t, const std::vector<DayRecord>& d) { first = daily_log_csv(d); });
  simulate(sc, agent, seeds, [&](std::uint64_t, const std::vector<DayRecord>& d) { second = daily_log_csv(d); });
  CHECK_FALSE(first.empty());
  CHECK(first == second);
  const auto header = daily_log_header();
  CHECK(first.rfind(header, 0) == 0);
  const auto columns = std::count(header.begin(), header.end(), ',') + 1;
  const std::string row = first.substr(header.size() + 1, first.find('\n', header.size() + 1) - header.size() - 1);
  CHECK(std::count(row.begin(), row.end(), ',') + 1 == columns);
}

TEST_CASE("aggregates are seed means") {
  const RunReport r = run_of("empirical", 1.0);
  CHECK(r.aggregate.duration == doctest::Approx(90.0));
  CHECK(r.aggregate.completion_rate == 1.0);
  CHECK(r.aggregate.reward == doctest::Approx(0.92));
}

TEST_CASE("report JSON round trip") {
  const RunReport r = run_of("smpn", 0.95);
  const RunReport back = RunReport::from_json(r.to_json());
  CHECK(back.scenario == r.scenario);
  CHECK(back.agent == r.agent);
  REQUIRE(back.seeds.size() == r.seeds.size());
  CHECK(back.seeds[1].material_cost == r.seeds[1].material_cost);
  CHECK(back.aggregate.total_cost == r.aggregate.total_cost);
  CHECK_THROWS_AS(RunReport::from_json("{\"scenario\": 1}"), Error);
  CHECK_THROWS_AS(RunReport::from_json("not json"), Error);
}

TEST_CASE("comparison gains against the first run") {
  const RunReport base = run_of("empirical", 1.0);
  const RunReport agent = run_of("smpn", 0.9);
  const auto rows = compare({base, agent});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].gain.total_cost == 0.0);
  CHECK(rows[0].gain.duration == 0.0);
  CHECK(rows[1].gain.total_cost == doctest::Approx((agent.aggregate.total_cost - base.aggregate.total_cost) /
                                                   base.aggregate.total_cost));
  CHECK(rows[1].gain.total_cost == doctest::Approx(-0.1).epsilon(1e-3));
}

TEST_CASE("a single run has zero gains") {
  const auto rows = compare({run_of("empirical", 1.0)});
  REQUIRE(rows.size() == 1);
  const Aggregate& g = rows[0].gain;
  for (double v : {g.completion_rate, g.duration, g.labor_cost, g.material_cost, g.total_cost, g.npv, g.reward}) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("mismatched scenarios produce a warning, not an error") {
  RunReport other = run_of("sfpn1", 1.0);
  other.scenario = "2";
  std::vector<std::string> warnings;
  const auto rows = compare({run_of("empirical", 1.0), other}, &warnings);
  CHECK(rows.size() == 2);
  CHECK(warnings.size() == 1);
}

TEST_CASE("comparison CSV round trip equals the JSON values") {
  const auto rows = compare({run_of("empirical", 1.0), run_of("smpn", 0.93)});
  const auto back = comparison_from_csv(comparison_csv(rows));
  REQUIRE(back.size() == rows.size());
  const auto json_text = comparison_json(rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].label == rows[i].label);
    CHECK(back[i].mean.total_cost == rows[i].mean.total_cost);
    CHECK(back[i].gain.total_cost == rows[i].gain.total_cost);
    CHECK(back[i].mean.npv == rows[i].mean.npv);
  }
  CHECK(json_text.find("\"gain\"") != std::string::npos);
  CHECK_THROWS_AS(comparison_from_csv("header\n1,2,3\n"), Error);
}
