#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowctl/agents.hpp"
#include "flowctl/episode.hpp"

namespace flowctl {

struct SeedResult {
  std::uint64_t seed = 0;
  std::string status;
  bool completed = false;
  int duration = 0;
  double progress = 0.0;
  double labor_cost = 0.0;
  double material_cost = 0.0;
  double total_cost = 0.0;
  double npv = 0.0;
  double reward = 0.0;
};

struct Aggregate {
  double completion_rate = 0.0;
  double duration = 0.0;
  double labor_cost = 0.0;
  double material_cost = 0.0;
  double total_cost = 0.0;
  double npv = 0.0;
  double reward = 0.0;
};

struct RunReport {
  std::string scenario;
  std::string agent;
  std::vector<SeedResult> seeds;
  Aggregate aggregate;

  void recompute();
  std::string to_json() const;
  static RunReport from_json(const std::string& text);
};

using DailyLogSink = std::function<void(std::uint64_t seed, const std::vector<DayRecord>& days)>;

// One episode per seed; network agents act on their mean action.
RunReport simulate(const Scenario& scenario, const Agent& agent, std::span<const std::uint64_t> seeds,
                   const DailyLogSink& sink = {});

std::string daily_log_csv(const std::vector<DayRecord>& days);

// Mean/gain comparison of several runs against the first one.
struct ComparisonRow {
  std::string label;
  std::string scenario;
  Aggregate mean;
  Aggregate gain;  // (run - baseline) / baseline; 0 where the baseline is 0
};

std::vector<ComparisonRow> compare(const std::vector<RunReport>& runs, std::vector<std::string>* warnings = nullptr);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::string comparison_json(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> comparison_from_csv(const std::string& text);

}  // namespace flowctl
