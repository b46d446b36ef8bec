#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "flowctl/baseline_ga.hpp"
#include "flowctl/kernels.hpp"
#include "flowctl/report.hpp"
#include "flowctl/trainer.hpp"

namespace fs = std::filesystem;
using namespace flowctl;

namespace {

struct Common {
  std::string scenario = "0";
  std::string config;
  std::uint64_t seed = 1;
  bool deterministic = false;
};

Scenario resolve_scenario(const Common& c) {
  ScenarioSpec spec;
  if (!c.config.empty()) {
    spec = read_scenario_config(c.config);
  } else {
    spec.id = c.scenario;
  }
  return load_scenario(spec);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("io", "cannot create output directory '" + dir + "'");
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw Error("io", "output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw Error("io", "write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Agent load_agent(AgentKind kind, const std::string& checkpoint) {
  if (!is_network(kind)) {
    Rng rng(0);
    return Agent::make(kind, rng);
  }
  if (checkpoint.empty()) throw Error("missing_checkpoint", "agent '" + std::string(to_string(kind)) + "' needs --checkpoint");
  Checkpoint ck = load_checkpoint(checkpoint);
  if (ck.agent.kind() != kind) {
    throw Error("agent_mismatch", "checkpoint '" + checkpoint + "' holds agent " + std::string(to_string(ck.agent.kind())));
  }
  return std::move(ck.agent);
}

void print_scenarios() {
  for (const auto& info : builtin_scenarios()) {
    const Scenario s = load_scenario(ScenarioSpec{std::to_string(info.id), {}});
    const ModelParams& p = s.model;
    std::printf("%d  %-28s floors=%d zones/floor=%d zone_area=%g max_days=%d start_day=%d init_cash=%.0f  %s\n", info.id,
                info.label, p.floors, p.zones_per_floor, p.zone_area, p.max_days, p.start_day, p.initial_cash,
                info.summary);
  }
}

int run_simulate(const Common& c, const std::string& agent_name, const std::vector<std::uint64_t>& seeds,
                 const std::string& checkpoint, const std::string& out) {
  const Scenario scenario = resolve_scenario(c);
  const Agent agent = load_agent(parse_agent_kind(agent_name), checkpoint);
  std::vector<std::uint64_t> run_seeds = seeds.empty() ? std::vector<std::uint64_t>{c.seed} : seeds;
  if (!out.empty()) ensure_dir(out);
  const RunReport rep = simulate(scenario, agent, run_seeds, [&](std::uint64_t seed, const std::vector<DayRecord>& days) {
    if (!out.empty()) write_file(fs::path(out) / ("daily_seed" + std::to_string(seed) + ".csv"), daily_log_csv(days));
  });
  if (!out.empty()) write_file(fs::path(out) / "report.json", rep.to_json());
  std::cout << rep.to_json() << '\n';
  return 0;
}

int run_train(const Common& c, const std::string& agent_name, TrainConfig cfg, const std::string& out,
              const std::vector<std::uint64_t>& eval_seeds) {
  const Scenario scenario = resolve_scenario(c);
  const AgentKind kind = parse_agent_kind(agent_name);
  if (!is_network(kind)) throw Error("invalid_parameter", "agent: only network agents can be trained");
  if (out.empty()) throw Error("invalid_parameter", "out: training needs an output directory");
  ensure_dir(out);
  cfg.seed = c.seed;
  const TrainResult res = train(scenario, kind, cfg, out, [](const CurvePoint& p) {
    std::printf("update %4d  episodes %3d  reward %+.4f  duration %.1f  completed %.2f\n", p.update, p.episodes,
                p.mean_reward, p.mean_duration, p.completion_rate);
    std::fflush(stdout);
  });
  const RunReport rep = simulate(scenario, res.agent, eval_seeds);
  write_file(fs::path(out) / "report.json", rep.to_json());
  std::printf("evaluation: completion %.2f  duration %.1f  total cost %.0f  npv %.0f  reward %.4f\n",
              rep.aggregate.completion_rate, rep.aggregate.duration, rep.aggregate.total_cost, rep.aggregate.npv,
              rep.aggregate.reward);
  return 0;
}

int run_ga(const Common& c, GaConfig cfg, const std::string& out) {
  const Scenario scenario = resolve_scenario(c);
  cfg.seed = c.seed;
  if (!out.empty()) ensure_dir(out);
  const GaResult res = evolve(cfg, scenario, [](const GenerationStats& g) {
    if (g.generation % 16 == 0) {
      std::printf("generation %5d  best %+.4f  current %+.4f  mean %+.4f\n", g.generation, g.best, g.current, g.mean);
      std::fflush(stdout);
    }
  });
  const auto plan = decode(res.best, scenario.model);
  const RewardWeights weights = reward_preset(1);
  Episode ep(scenario, c.seed);
  std::vector<DayRecord> days;
  while (!ep.done() && static_cast<std::size_t>(ep.state().t - 1) < plan.size()) {
    DayRecord rec;
    rec.action = plan[static_cast<std::size_t>(ep.state().t - 1)];
    rec.before = ep.state();
    rec.result = ep.step(rec.action);
    rec.reward = reward(rec.before, rec.result.next, rec.result.status, weights, scenario.model);
    days.push_back(rec);
  }
  const PlanOutcome replay = run_plan(plan, scenario, weights, c.seed);
  nlohmann::json j = {{"scenario", scenario.id},
                      {"best_fitness", res.best_fitness},
                      {"generations", cfg.generations},
                      {"population", cfg.population},
                      {"replay",
                       {{"seed", c.seed},
                        {"status", std::string(to_string(replay.status))},
                        {"duration", replay.duration},
                        {"progress", replay.progress},
                        {"reward", replay.reward}}}};
  if (!out.empty()) {
    write_file(fs::path(out) / "ga_history.csv", ga_history_csv(res.history));
    write_file(fs::path(out) / "best_daily.csv", daily_log_csv(days));
    write_file(fs::path(out) / "ga_result.json", j.dump(2));
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_report(const std::vector<std::string>& dirs, const std::string& out, const std::string& format) {
  std::vector<RunReport> runs;
  for (const auto& d : dirs) {
    const fs::path p = fs::is_directory(d) ? fs::path(d) / "report.json" : fs::path(d);
    runs.push_back(RunReport::from_json(read_file(p)));
  }
  std::vector<std::string> warnings;
  const auto rows = compare(runs, &warnings);
  for (const auto& w : warnings) std::cerr << nlohmann::json{{"warning", w}}.dump() << '\n';
  const std::string text = format == "json" ? comparison_json(rows) : comparison_csv(rows);
  if (!out.empty()) {
    write_file(out, text);
  } else {
    std::cout << text;
  }
  return 0;
}

void fail(const std::string& code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construction flow control: environment, agents, PPO training and GA baseline"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--scenario", c.scenario, "Built-in scenario id (0-6)");
  app.add_option("--config", c.config, "Scenario config file (overrides --scenario)");
  app.add_option("--seed", c.seed, "Base seed");
  app.add_flag("--deterministic", c.deterministic, "Use scalar kernels only");

  auto* scen = app.add_subcommand("scenarios", "Scenario catalog");
  scen->add_subcommand("list", "One line per built-in scenario");
  scen->require_subcommand(1);

  std::string agent = "empirical";
  std::string checkpoint;
  std::string out;
  std::vector<std::uint64_t> seeds;

  auto* sim = app.add_subcommand("simulate", "Run an agent over evaluation seeds");
  sim->add_option("--agent", agent, "empirical, sfpn1, sfpn2, swpn, smpn, dpn");
  sim->add_option("--checkpoint", checkpoint, "Checkpoint for network agents");
  sim->add_option("--seeds", seeds, "Episode seeds (default: --seed)");
  sim->add_option("--out", out, "Directory for daily logs and report.json");

  TrainConfig train_cfg;
  std::vector<std::uint64_t> eval_seeds = {1, 2, 3, 4, 5};
  auto* tr = app.add_subcommand("train", "PPO training of a network agent");
  tr->add_option("--agent", agent, "sfpn1, sfpn2, swpn, smpn, dpn")->required();
  tr->add_option("--updates", train_cfg.updates, "Number of policy updates");
  tr->add_option("--horizon", train_cfg.horizon, "Steps collected per update");
  tr->add_option("--batch", train_cfg.batch, "Minibatch size");
  tr->add_option("--epochs", train_cfg.epochs, "Epochs per update");
  tr->add_option("--minibatches", train_cfg.minibatches_per_epoch, "Minibatches per epoch");
  tr->add_option("--lr", train_cfg.lr, "Adam learning rate");
  tr->add_option("--entropy-coef", train_cfg.entropy_coef);
  tr->add_option("--checkpoint-every", train_cfg.checkpoint_every);
  tr->add_flag("--normalize-advantages", train_cfg.normalize_advantages);
  tr->add_option("--seeds", eval_seeds, "Evaluation seeds for the final report");
  tr->add_option("--out", out, "Output directory")->required();

  GaConfig ga_cfg;
  auto* ga = app.add_subcommand("ga", "Genetic-algorithm open-loop baseline");
  ga->add_option("--generations", ga_cfg.generations);
  ga->add_option("--population", ga_cfg.population);
  ga->add_option("--crossover", ga_cfg.crossover);
  ga->add_option("--mutation", ga_cfg.mutation, "Per-bit probability (negative: 1/length)");
  ga->add_option("--tournament", ga_cfg.tournament);
  ga->add_option("--elites", ga_cfg.elites);
  ga->add_option("--repetitions", ga_cfg.repetitions);
  ga->add_option("--out", out, "Output directory");

  std::vector<std::string> runs;
  std::string format = "csv";
  auto* rep = app.add_subcommand("report", "Compare runs against the first one");
  rep->add_option("runs", runs, "Run directories or report.json files; the first is the baseline")->required();
  rep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  rep->add_option("--out", out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("usage", e.what());
    return 2;
  }

  try {
    if (c.deterministic) kernels::select(kernels::Backend::Scalar);
    if (scen->parsed()) {
      print_scenarios();
      return 0;
    }
    if (sim->parsed()) return run_simulate(c, agent, seeds, checkpoint, out);
    if (tr->parsed()) return run_train(c, agent, train_cfg, out, eval_seeds);
    if (ga->parsed()) return run_ga(c, ga_cfg, out);
    if (rep->parsed()) return run_report(runs, out, format);
  } catch (const Error& e) {
    fail(e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    fail("internal", e.what());
    return 1;
  }
  return 0;
}
