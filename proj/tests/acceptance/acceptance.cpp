#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flowctl/baseline_ga.hpp"
#include "flowctl/report.hpp"
#include "flowctl/trainer.hpp"

namespace fs = std::filesystem;
using namespace flowctl;
using Clock = std::chrono::steady_clock;

namespace {

const std::vector<std::uint64_t> kEvalSeeds = {1, 2, 3, 4, 5};
constexpr double kBudgetMinutes = 30.0;

int failures = 0;
nlohmann::json summary = nlohmann::json::array();

void verdict(const std::string& id, const char* level, const std::string& detail) {
  std::printf("%s %s: %s\n", level, id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (std::string(level) == "FAIL") ++failures;
  summary.push_back({{"criterion", id}, {"result", level}, {"detail", detail}});
}

void check(const std::string& id, bool ok, const std::string& detail) { verdict(id, ok ? "PASS" : "FAIL", detail); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double minutes_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count() / 60.0;
}

Scenario scenario(int id) { return load_scenario(ScenarioSpec{std::to_string(id), {}}); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

struct Trained {
  TrainResult result;
  RunReport eval;
  double minutes = 0.0;
};

Trained train_and_eval(int scenario_id, AgentKind kind, const fs::path& dir) {
  const Scenario s = scenario(scenario_id);
  fs::create_directories(dir);
  TrainConfig cfg;
  std::printf("  training %s on #%d (%d updates)\n", std::string(to_string(kind)).c_str(), scenario_id, cfg.updates);
  std::fflush(stdout);
  const auto t0 = Clock::now();
  Trained t{train(s, kind, cfg, dir.string(), [](const CurvePoint& p) {
              if (p.update % 50 == 0) {
                std::printf("    update %4d  reward %+.4f  duration %.1f  completed %.2f\n", p.update, p.mean_reward,
                            p.mean_duration, p.completion_rate);
                std::fflush(stdout);
              }
            }),
            {},
            0.0};
  t.minutes = minutes_since(t0);
  t.eval = simulate(s, t.result.agent, kEvalSeeds);
  write_text(dir / "report.json", t.eval.to_json());
  return t;
}

std::string describe(const RunReport& r) {
  return fmt("completion %.0f%%, duration %.1f d, cost %.1fK, npv %.1fK, reward %.3f", 100.0 * r.aggregate.completion_rate,
             r.aggregate.duration, r.aggregate.total_cost / 1e3, r.aggregate.npv / 1e3, r.aggregate.reward);
}

bool has_cost_overrun(const RunReport& r) {
  for (const auto& s : r.seeds) {
    if (s.status == "failed_cost") return true;
  }
  return false;
}

double curve_mean(const std::vector<CurvePoint>& curve, std::size_t first, std::size_t last) {
  double sum = 0.0;
  for (std::size_t i = first; i < last && i < curve.size(); ++i) sum += curve[i].mean_reward;
  return sum / static_cast<double>(last - first);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite: one PASS/FAIL line per criterion"};
  std::string out = "acceptance_runs";
  std::string unit_tests = FLOWCTL_UNIT_TESTS;
  app.add_option("--out", out, "Directory for run artifacts");
  app.add_option("--unit-tests", unit_tests, "Path of the unit test binary used for the property suites");
  CLI11_PARSE(app, argc, argv);
  const fs::path root(out);
  fs::create_directories(root);

  // 1. Dimensions.
  {
    const Scenario s0 = scenario(0);
    Episode ep(s0, 1);
    Rng rng(1);
    const Agent sf = Agent::make(AgentKind::SFPN1, rng);
    const auto& spec = sf.heads.front().net.spec();
    const bool ok = ep.observation().size() == 59 && kObservationSize == 59 && kActionSize == 6 &&
                    spec.input_dim() == 59 && spec.action_dim == 6;
    check("1 dimensions", ok,
          fmt("observation %zu, network input %zu, action %zu", ep.observation().size(), spec.input_dim(),
              spec.action_dim));
  }

  // 2. Empirical policy on #0.
  const Scenario s0 = scenario(0);
  Rng agent_rng(0);
  const Agent empirical = Agent::make(AgentKind::Empirical, agent_rng);
  RunReport emp0;
  {
    const auto t0 = Clock::now();
    fs::create_directories(root / "empirical_s0");
    emp0 = simulate(s0, empirical, kEvalSeeds, [&](std::uint64_t seed, const std::vector<DayRecord>& days) {
      write_text(root / "empirical_s0" / ("daily_seed" + std::to_string(seed) + ".csv"), daily_log_csv(days));
    });
    write_text(root / "empirical_s0" / "report.json", emp0.to_json());
    const double secs = minutes_since(t0) * 60.0;
    const auto& a = emp0.aggregate;
    const bool ok = a.completion_rate == 1.0 && std::abs(a.duration - 89.6) <= 10.0 &&
                    std::abs(a.total_cost - 8083.46e3) <= 0.15 * 8083.46e3 && secs < 10.0;
    std::string statuses;
    for (const auto& r : emp0.seeds) statuses += fmt(" %llu:%s", static_cast<unsigned long long>(r.seed), r.status.c_str());
    check("2 empirical #0", ok, describe(emp0) + fmt(", %.2f s;", secs) + statuses);
  }

  // 3. Empirical internals: every day of a #0 episode.
  {
    Episode ep(s0, 1);
    bool hours_ok = true;
    bool orders_ok = true;
    double rebar = 0.0;
    double concrete = 0.0;
    while (!ep.done()) {
      const Decision d = empirical.act(ep.observation(), s0.model, nullptr, ActMode::Mean);
      for (double h : d.action.hours) hours_ok = hours_ok && h == 8.0;
      rebar = std::max(rebar, d.action.orders[kRebar]);
      concrete = std::max(concrete, d.action.orders[kConcrete]);
      orders_ok = orders_ok && (d.action.orders[kRebar] == 0.0 || d.action.orders[kRebar] == 131.0) &&
                  (d.action.orders[kConcrete] == 0.0 || d.action.orders[kConcrete] == 68.0);
      ep.step(d.action);
    }
    check("3 empirical internals", hours_ok && orders_ok && rebar == 131.0 && concrete == 68.0,
          fmt("hours all 8: %s, rebar order %g, concrete order %g", hours_ok ? "yes" : "no", rebar, concrete));
  }

  // 5. Training on #0 with default hyperparameters.
  const Trained sfpn0 = train_and_eval(0, AgentKind::SFPN1, root / "sfpn1_s0");
  write_text(root / "sfpn1_s0" / "eval.json", sfpn0.eval.to_json());
  {
    const auto& c = sfpn0.result.curve;
    const double early = curve_mean(c, 0, 10);
    const double late = curve_mean(c, 90, 100);
    const auto& a = sfpn0.eval.aggregate;
    bool all_positive = true;
    for (const auto& r : sfpn0.eval.seeds) all_positive = all_positive && r.npv > 0.0;
    const bool progress = c.size() >= 100 && late > early;
    const bool ok = progress && a.completion_rate == 1.0 && all_positive && a.duration <= 110.0 &&
                    sfpn0.minutes <= kBudgetMinutes;
    check("5 training #0", ok,
          fmt("reward updates 1-10 %+.4f, 91-100 %+.4f (%s); after %zu updates: ", early, late,
              progress ? "improved" : "not improved", c.size()) +
              describe(sfpn0.eval) + fmt(", %.1f min", sfpn0.minutes));
  }

  // 4. GA baseline on #0 against the trained agent.
  {
    GaConfig cfg;
    const auto t0 = Clock::now();
    const GaResult ga = evolve(cfg, s0, [](const GenerationStats& g) {
      if (g.generation % 128 == 0) {
        std::printf("    generation %4d  best %+.4f  mean %+.4f\n", g.generation, g.best, g.mean);
        std::fflush(stdout);
      }
    });
    const double ga_minutes = minutes_since(t0);
    fs::create_directories(root / "ga_s0");
    write_text(root / "ga_s0" / "ga_history.csv", ga_history_csv(ga.history));
    const auto plan = decode(ga.best, s0.model);
    int completed = 0;
    double progress = 0.0;
    for (std::uint64_t seed : kEvalSeeds) {
      const PlanOutcome o = run_plan(plan, s0, reward_preset(1), seed);
      completed += o.status == StepStatus::Completed ? 1 : 0;
      progress += o.progress / static_cast<double>(kEvalSeeds.size());
    }
    const double drl = sfpn0.eval.aggregate.reward;
    const bool ok = completed == 0 && ga.best_fitness < drl && ga_minutes <= kBudgetMinutes &&
                    sfpn0.minutes <= kBudgetMinutes;
    check("4 GA vs DRL", ok,
          fmt("GA best %+.4f, completes %d/5 (mean progress %.1f%%); trained SFPN mean reward %+.4f; "
              "GA %.1f min, training %.1f min",
              ga.best_fitness, completed, 100.0 * progress, drl, ga_minutes, sfpn0.minutes));
  }

  // 6. Robustness on #1-#3.
  {
    bool ok = true;
    std::string detail;
    for (int id : {1, 2, 3}) {
      const Trained t = train_and_eval(id, AgentKind::SFPN1, root / ("sfpn1_s" + std::to_string(id)));
      const RunReport emp = simulate(scenario(id), empirical, kEvalSeeds);
      write_text(root / ("empirical_s" + std::to_string(id) + ".json"), emp.to_json());
      ok = ok && t.eval.aggregate.completion_rate == 1.0 && t.minutes <= kBudgetMinutes;
      if (id != 3) ok = ok && has_cost_overrun(emp);
      detail += fmt("#%d trained completion %.0f%%, empirical completion %.0f%%%s; ", id,
                    100.0 * t.eval.aggregate.completion_rate, 100.0 * emp.aggregate.completion_rate,
                    has_cost_overrun(emp) ? " with cost overrun" : "");
    }
    check("6 robustness", ok, detail);
  }

  // 7. Chromosome length.
  {
    const std::size_t len = chromosome_length(s0.model);
    check("7 chromosome length", len == 2100 && std::abs(static_cast<double>(len) - 2000.0) <= 300.0,
          fmt("%zu bits", len));
  }

  // 8. Property suites, run from the unit test binary.
  {
    const std::string filter =
        "*ledger*,GAE*,backward matches central finite differences,discount ratio,piecewise curves*,"
        "*byte-identical*,an episode is reproducible*,training writes*";
    const std::string cmd = "\"" + unit_tests + "\" --no-version -tc=\"" + filter + "\" 2>&1";
    const auto t0 = Clock::now();
    std::string text;
    int rc = -1;
    if (FILE* pipe = popen(cmd.c_str(), "r")) {
      char buf[4096];
      while (std::fgets(buf, sizeof(buf), pipe)) text += buf;
      rc = pclose(pipe);
    }
    const double secs = minutes_since(t0) * 60.0;
    // A filter that matches nothing would also exit 0; require every suite to have run.
    int cases = 0;
    int passed = 0;
    const auto at = text.find("test cases:");
    if (at != std::string::npos) std::sscanf(text.c_str() + at, "test cases: %d | %d passed", &cases, &passed);
    constexpr int kSuites = 12;
    check("8 property suites", rc == 0 && cases == kSuites && passed == kSuites && secs < 60.0,
          fmt("%d/%d cases passed (%d expected), exit %d, %.1f s", passed, cases, kSuites, rc, secs));
    if (rc != 0) std::fputs(text.c_str(), stdout);
  }

  // 9. SMPN vs empirical cost on #0 (soft).
  {
    const Trained smpn = train_and_eval(0, AgentKind::SMPN, root / "smpn_s0");
    const auto& sm = smpn.eval.aggregate;
    const auto& em = emp0.aggregate;
    const double gap = (sm.total_cost - em.total_cost) / em.total_cost;
    // A bankrupt run spends less by stopping early, so cost only ranks when
    // SMPN finishes at least as often as the empirical policy.
    const bool comparable = sm.completion_rate >= em.completion_rate;
    verdict("9 SMPN cost ranking", comparable && gap <= 0.0 ? "PASS" : "WARN",
            fmt("SMPN cost %.1fK vs empirical %.1fK (gap %+.2f%%), completion %.0f%% vs %.0f%%%s; SMPN ",
                sm.total_cost / 1e3, em.total_cost / 1e3, 100.0 * gap, 100.0 * sm.completion_rate,
                100.0 * em.completion_rate, comparable ? "" : " (not comparable)") +
                describe(smpn.eval));
  }

  write_text(root / "summary.json", summary.dump(2));
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
