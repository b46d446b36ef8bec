#include "flowctl/reward.hpp"

#include <algorithm>
#include <string>

namespace flowctl {

RewardWeights reward_preset(int agent) {
  switch (agent) {
    case 1:
      return {0.5, 0.25, 0.25, 0.5, 2.0, 2.0, 1.0, 0.15};
    case 2:
      return {0.5, 1.0, 0.125, 0.5, 8.0, 1.0, 1.0, 0.15};
    case 3:
      return {0.5, 2.0, 0.0, 0.5, 16.0, 0.0, 1.0, 0.15};
    case 4:
      return {0.5, 0.0, 0.25, 0.5, 0.0, 2.0, 1.0, 0.15};
    default:
      throw Error("invalid_parameter", "reward preset must be 1..4, got " + std::to_string(agent));
  }
}

RewardBreakdown reward(const State& prev, const State& next, StepStatus status, const RewardWeights& w,
                       const ModelParams& p) {
  RewardBreakdown r;
  const double max_t = p.max_days;
  const double milestones = p.milestone_total();
  const int day = prev.t;

  r.progress = (next.area[kConcrete] - prev.area[kConcrete]) / p.total_area();
  if (day >= 0.85 * max_t) {
    r.duration_dense = -4.0 / max_t;
  } else if (day >= 0.7 * max_t) {
    r.duration_dense = -1.0 / max_t;
  }
  const double cash_delta = next.cash - prev.cash;
  r.labor_dense = p.labor_cost_ratio * cash_delta / milestones;
  r.material_dense = p.material_cost_ratio * cash_delta / milestones;

  if (is_failure(status)) r.failure = -1.0;
  if (status == StepStatus::Completed) {
    r.duration_sparse = std::min(0.0, 0.7 - static_cast<double>(next.t - 1) / max_t);
    r.labor_sparse = std::max(0.0, p.labor_cost_ratio * milestones - next.labor_cost) / milestones;
    r.material_sparse = std::max(0.0, p.material_cost_ratio * milestones - next.material_cost) / milestones;
  }

  r.total = w.progress * r.progress + w.duration_dense * r.duration_dense + w.labor_dense * r.labor_dense +
            w.material_dense * r.material_dense + w.failure * r.failure + w.duration_sparse * r.duration_sparse +
            w.labor_sparse * r.labor_sparse + w.material_sparse * r.material_sparse;
  return r;
}

}  // namespace flowctl
