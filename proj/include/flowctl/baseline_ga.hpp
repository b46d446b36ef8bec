#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowctl/env.hpp"
#include "flowctl/reward.hpp"
#include "flowctl/scenario.hpp"

namespace flowctl {

// Per day: 2 bits of work hours per trade, 3 bits rebar, 3 bits formwork,
// 2 bits concrete. Fields are most-significant bit first.
inline constexpr std::size_t kBitsPerDay = 14;

using Chromosome = std::vector<std::uint8_t>;

struct GaConfig {
  int population = 256;
  int generations = 1024;
  double crossover = 0.8;
  double mutation = -1.0;  // per-bit; negative means 1 / length
  int tournament = 2;
  int elites = 1;
  int repetitions = 3;
  std::uint64_t seed = 1;

  void validate() const;
};

std::size_t chromosome_length(const ModelParams& params);
Action decode_day(std::span<const std::uint8_t> bits, const ModelParams& params);
// Throws Error("dimension") for a wrong length.
std::vector<Action> decode(const Chromosome& c, const ModelParams& params);
// Nearest grid point per field.
Chromosome encode(const std::vector<Action>& plan, const ModelParams& params);

struct PlanOutcome {
  StepStatus status = StepStatus::Running;
  int duration = 0;
  double reward = 0.0;
  double progress = 0.0;  // poured fraction of the total area
  double cash = 0.0;
};

// Feeds the plan day by day into one episode; curves may be pre-sampled for
// `seed` to avoid re-drawing them.
PlanOutcome run_plan(const std::vector<Action>& plan, const Scenario& scenario, const RewardWeights& weights,
                     std::uint64_t seed, const AnnualCurves* curves = nullptr);

// Mean cumulative reward over one episode per seed.
double evaluate(const Chromosome& c, const Scenario& scenario, const RewardWeights& weights,
                std::span<const std::uint64_t> seeds);

struct GenerationStats {
  int generation = 0;
  double best = 0.0;      // best-ever fitness so far
  double current = 0.0;   // best fitness in this generation
  double mean = 0.0;
};

struct GaResult {
  Chromosome best;
  double best_fitness = 0.0;
  std::vector<GenerationStats> history;  // entry 0 is the initial population
};

GaResult evolve(const GaConfig& config, const Scenario& scenario,
                const std::function<void(const GenerationStats&)>& progress = {});

std::string ga_history_csv(const std::vector<GenerationStats>& history);

}  // namespace flowctl
