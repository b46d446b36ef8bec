#pragma once

#include "flowctl/env.hpp"

namespace flowctl {

struct RewardWeights {
  double progress = 0.0;
  double labor_dense = 0.0;
  double material_dense = 0.0;
  double duration_dense = 0.0;
  double labor_sparse = 0.0;
  double material_sparse = 0.0;
  double duration_sparse = 0.0;
  double failure = 0.0;

  bool operator==(const RewardWeights&) const = default;
};

// Agents 1..4: full-policy (cost-balanced), full-policy (labor-heavy),
// work-hour policy, material policy. Throws Error("invalid_parameter").
RewardWeights reward_preset(int agent);

struct RewardBreakdown {
  double progress = 0.0;          // dense, area poured today / total
  double duration_dense = 0.0;    // late-stage time pressure
  double labor_dense = 0.0;       // share of the cash delta
  double material_dense = 0.0;
  double failure = 0.0;           // -1 on failure
  double duration_sparse = 0.0;   // late completion penalty
  double labor_sparse = 0.0;      // labor budget left on completion
  double material_sparse = 0.0;
  double total = 0.0;
};

RewardBreakdown reward(const State& prev, const State& next, StepStatus status, const RewardWeights& weights,
                       const ModelParams& params);

}  // namespace flowctl
