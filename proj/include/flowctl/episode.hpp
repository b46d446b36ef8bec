#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "flowctl/env.hpp"
#include "flowctl/observe.hpp"
#include "flowctl/reward.hpp"
#include "flowctl/scenario.hpp"

namespace flowctl {

// One project run: sampled exogenous curves plus the evolving state. The
// curves, the transition noise and the forecast noise come from separate
// streams derived from one seed, so a fixed action sequence sees the same
// dynamics whether or not observations are drawn.
class Episode {
 public:
  Episode(const Scenario& scenario, std::uint64_t seed);
  // Reuses curves previously drawn by sample_curves(scenario, seed).
  Episode(const Scenario& scenario, std::uint64_t seed, const AnnualCurves& curves);

  static AnnualCurves sample_curves(const Scenario& scenario, std::uint64_t seed);

  const Scenario& scenario() const { return *scenario_; }
  const ModelParams& params() const { return scenario_->model; }
  const AnnualCurves& curves() const { return curves_; }
  const State& state() const { return state_; }
  StepStatus status() const { return status_; }
  bool done() const { return is_terminal(status_); }

  // Draws forecasts for today and assembles the observation.
  Observation observation();
  StepResult step(const Action& action);

 private:
  const Scenario* scenario_;
  AnnualCurves curves_;
  State state_;
  StepStatus status_ = StepStatus::Running;
  Rng dynamics_rng_;
  Rng forecast_rng_;
};

// Days of exogenous data sampled per episode: the horizon plus forecast reach.
std::size_t curve_length(const ModelParams& params);

struct DayRecord {
  Action action;
  State before;
  StepResult result;
  RewardBreakdown reward;
};

std::string daily_log_header();
void write_daily_log_row(std::ostream& os, const DayRecord& day);

}  // namespace flowctl
