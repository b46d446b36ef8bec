#include "flowctl/report.hpp"

#include "json.hpp"
#include <sstream>

namespace flowctl {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 7> kMetricNames = {"completion_rate", "duration",  "labor_cost", "material_cost",
                                                      "total_cost",      "npv",       "reward"};

std::array<double*, 7> fields(Aggregate& a) {
  return {&a.completion_rate, &a.duration, &a.labor_cost, &a.material_cost, &a.total_cost, &a.npv, &a.reward};
}

std::array<double, 7> values(const Aggregate& a) {
  return {a.completion_rate, a.duration, a.labor_cost, a.material_cost, a.total_cost, a.npv, a.reward};
}

json aggregate_json(const Aggregate& a) {
  json j;
  const auto v = values(a);
  for (std::size_t i = 0; i < v.size(); ++i) j[kMetricNames[i]] = v[i];
  return j;
}

Aggregate aggregate_from(const json& j) {
  Aggregate a;
  const auto f = fields(a);
  for (std::size_t i = 0; i < f.size(); ++i) *f[i] = j.at(kMetricNames[i]).get<double>();
  return a;
}

}  // namespace

void RunReport::recompute() {
  aggregate = {};
  if (seeds.empty()) return;
  for (const auto& s : seeds) {
    aggregate.completion_rate += s.completed ? 1.0 : 0.0;
    aggregate.duration += s.duration;
    aggregate.labor_cost += s.labor_cost;
    aggregate.material_cost += s.material_cost;
    aggregate.total_cost += s.total_cost;
    aggregate.npv += s.npv;
    aggregate.reward += s.reward;
  }
  for (double* f : fields(aggregate)) *f /= static_cast<double>(seeds.size());
}

std::string RunReport::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["agent"] = agent;
  j["aggregate"] = aggregate_json(aggregate);
  j["seeds"] = json::array();
  for (const auto& s : seeds) {
    j["seeds"].push_back({{"seed", s.seed},
                          {"status", s.status},
                          {"completed", s.completed},
                          {"duration", s.duration},
                          {"progress", s.progress},
                          {"labor_cost", s.labor_cost},
                          {"material_cost", s.material_cost},
                          {"total_cost", s.total_cost},
                          {"npv", s.npv},
                          {"reward", s.reward}});
  }
  return j.dump(2);
}

RunReport RunReport::from_json(const std::string& text) {
  RunReport r;
  try {
    const json j = json::parse(text);
    r.scenario = j.at("scenario").get<std::string>();
    r.agent = j.at("agent").get<std::string>();
    for (const auto& s : j.at("seeds")) {
      SeedResult x;
      x.seed = s.at("seed").get<std::uint64_t>();
      x.status = s.at("status").get<std::string>();
      x.completed = s.at("completed").get<bool>();
      x.duration = s.at("duration").get<int>();
      x.progress = s.at("progress").get<double>();
      x.labor_cost = s.at("labor_cost").get<double>();
      x.material_cost = s.at("material_cost").get<double>();
      x.total_cost = s.at("total_cost").get<double>();
      x.npv = s.at("npv").get<double>();
      x.reward = s.at("reward").get<double>();
      r.seeds.push_back(x);
    }
    r.aggregate = aggregate_from(j.at("aggregate"));
  } catch (const json::exception& e) {
    throw Error("bad_report", std::string("malformed report: ") + e.what());
  }
  return r;
}

RunReport simulate(const Scenario& scenario, const Agent& agent, std::span<const std::uint64_t> seeds,
                   const DailyLogSink& sink) {
  RunReport rep;
  rep.scenario = scenario.id;
  rep.agent = std::string(to_string(agent.kind()));
  const ModelParams& p = scenario.model;
  const RewardWeights weights = agent.report_weights();
  for (std::uint64_t seed : seeds) {
    Episode ep(scenario, seed);
    std::vector<DayRecord> days;
    double total_reward = 0.0;
    while (!ep.done()) {
      const Observation obs = ep.observation();
      const Decision d = agent.act(obs, p, nullptr, ActMode::Mean);
      DayRecord rec;
      rec.action = d.action;
      rec.before = ep.state();
      rec.result = ep.step(d.action);
      rec.reward = reward(rec.before, rec.result.next, rec.result.status, weights, p);
      total_reward += rec.reward.total;
      if (sink) days.push_back(std::move(rec));
    }
    const State& s = ep.state();
    SeedResult r;
    r.seed = seed;
    r.status = std::string(to_string(ep.status()));
    r.completed = ep.status() == StepStatus::Completed;
    r.duration = s.t - 1;
    r.progress = s.area[kConcrete] / p.total_area();
    r.labor_cost = s.labor_cost;
    r.material_cost = s.material_cost;
    r.total_cost = s.labor_cost + s.material_cost;
    r.npv = s.cash - p.initial_cash;
    r.reward = total_reward;
    rep.seeds.push_back(r);
    if (sink) sink(seed, days);
  }
  rep.recompute();
  return rep;
}

std::string daily_log_csv(const std::vector<DayRecord>& days) {
  std::ostringstream os;
  os << daily_log_header() << '\n';
  for (const auto& d : days) write_daily_log_row(os, d);
  return os.str();
}

std::vector<ComparisonRow> compare(const std::vector<RunReport>& runs, std::vector<std::string>* warnings) {
  std::vector<ComparisonRow> rows;
  if (runs.empty()) return rows;
  const auto base = values(runs.front().aggregate);
  for (const auto& run : runs) {
    if (warnings && run.scenario != runs.front().scenario) {
      warnings->push_back("run '" + run.agent + "' is on scenario " + run.scenario + ", baseline on " +
                          runs.front().scenario);
    }
    ComparisonRow row;
    row.label = run.agent;
    row.scenario = run.scenario;
    row.mean = run.aggregate;
    const auto v = values(run.aggregate);
    const auto g = fields(row.gain);
    for (std::size_t i = 0; i < v.size(); ++i) *g[i] = base[i] == 0.0 ? 0.0 : (v[i] - base[i]) / base[i];
    rows.push_back(row);
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "label,scenario";
  for (const char* m : kMetricNames) os << ",mean_" << m;
  for (const char* m : kMetricNames) os << ",gain_" << m;
  os << '\n';
  for (const auto& r : rows) {
    os << r.label << ',' << r.scenario;
    for (double v : values(r.mean)) os << ',' << v;
    for (double v : values(r.gain)) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

std::string comparison_json(const std::vector<ComparisonRow>& rows) {
  json j = json::array();
  for (const auto& r : rows) {
    j.push_back({{"label", r.label}, {"scenario", r.scenario}, {"mean", aggregate_json(r.mean)},
                 {"gain", aggregate_json(r.gain)}});
  }
  return j.dump(2);
}

std::vector<ComparisonRow> comparison_from_csv(const std::string& text) {
  std::vector<ComparisonRow> rows;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 2 + 2 * kMetricNames.size()) throw Error("bad_report", "comparison row has wrong width");
    ComparisonRow r;
    r.label = cells[0];
    r.scenario = cells[1];
    const auto m = fields(r.mean);
    const auto g = fields(r.gain);
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
      *m[i] = std::stod(cells[2 + i]);
      *g[i] = std::stod(cells[2 + kMetricNames.size() + i]);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace flowctl
