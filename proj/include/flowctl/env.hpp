#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "flowctl/common.hpp"
#include "flowctl/exogenous.hpp"
#include "flowctl/scenario.hpp"

namespace flowctl {

// One day's decision: work hours per trade and order quantities per material
// (rebar in 0.1 t, formwork in m², concrete in m³).
struct Action {
  Triple hours{8.0, 8.0, 8.0};
  Triple orders{0.0, 0.0, 0.0};

  bool operator==(const Action&) const = default;
};

bool within_bounds(const Action& action, const ModelParams& params);

enum class StepStatus { Running, Completed, FailedCost, FailedTime };

std::string_view to_string(StepStatus status);
inline bool is_terminal(StepStatus s) { return s != StepStatus::Running; }
inline bool is_failure(StepStatus s) { return s == StepStatus::FailedCost || s == StepStatus::FailedTime; }

struct State {
  int t = 1;
  Triple area{};  // completed m² per trade
  double cash = 0.0;
  double opening_cash = 0.0;  // cash before the last day's flows
  double inflow = 0.0;        // last day's inflow
  double outflow = 0.0;       // last day's outflow
  double week_wages = 0.0;    // wages accrued since the last payday
  double weather_efficiency = 1.0;
  Triple fatigue{};
  Triple stock{};
  double formwork_in_use = 0.0;
  Triple price{};
  Weather weather{};
  std::vector<PendingPayment> pay_queue;
  double labor_cost = 0.0;
  double material_cost = 0.0;

  // Oldest first: days t-3, t-2, t-1 and t-2, t-1.
  std::array<Triple, 3> hours_history{};
  std::array<Weather, 2> weather_history{};

  // Ledgers.
  double total_inflow = 0.0;
  double total_outflow = 0.0;
  Triple ordered{};
  Triple consumed{};
  Triple wasted{};
  double recycled = 0.0;
  double formwork_removed = 0.0;
  double formwork_lost = 0.0;
};

// Per-draw noise for the transition. A default-constructed source returns
// zero perturbations and the midpoint payment lead time.
class Noise {
 public:
  Noise() = default;
  explicit Noise(Rng& rng) : rng_(&rng) {}

  double uniform(double half_width);
  int lead_time();
  bool enabled() const { return rng_ != nullptr; }

 private:
  Rng* rng_ = nullptr;
};

State init_state(const ModelParams& params, const AnnualCurves& curves);

double discount_ratio(double quantity, double full_discount_quantity, double min_ratio);
double daily_wage(double attendance, double hourly_wage, double overtime_surcharge, double hours);
// Sum of per-hour effectiveness; a fractional last hour counts pro rata.
double effective_hours(const ModelParams& params, double hours);
double absence_ratio(const ModelParams& params, double fatigue);
// Zones fully covered by `area`, tolerant of floating-point residue.
double whole_zones(double area, double zone_area);

struct LaborResult {
  Triple fatigue_next{};
  Triple fatigue_effect{};
  Triple attendance{};
  double weather_efficiency = 1.0;
};

struct WorkResult {
  Triple delta{};
  Triple labor_cap{};
  Triple material_cap{};
  Triple precedence_cap{};
};

struct MaterialResult {
  Triple stock{};
  Triple consumed{};
  Triple wasted{};
  double formwork_in_use = 0.0;
  double formwork_removed = 0.0;
  double recycled = 0.0;
};

struct CashResult {
  double inflow = 0.0;
  double outflow = 0.0;
  double cash = 0.0;
  double order_payment = 0.0;
  double wages_paid = 0.0;
  double week_wages = 0.0;
  Triple wages_today{};
  std::vector<PendingPayment> queue;
};

LaborResult labor_update(const State& state, const Action& action, const ModelParams& params);
WorkResult work_update(const State& state, const Action& action, const LaborResult& labor, const ModelParams& params,
                       Noise& noise);
MaterialResult material_update(const State& state, const WorkResult& work, const Action& action,
                               const ModelParams& params, Noise& noise);
// `concrete_after` is the poured area at the end of the day; reaching the
// total area settles outstanding wages and pending payments.
CashResult cash_update(const State& state, const Action& action, const LaborResult& labor, double concrete_after,
                       const ModelParams& params, Noise& noise);

StepStatus status(const State& state, const ModelParams& params);

struct StepResult {
  State next;
  StepStatus status = StepStatus::Running;
  LaborResult labor;
  WorkResult work;
  MaterialResult material;
  CashResult cash;
};

// Advances one day. Throws Error("action_out_of_bounds") for a raw action
// outside the decision bounds.
StepResult step(const State& state, const Action& action, const AnnualCurves& curves, const ModelParams& params,
                Noise& noise);

}  // namespace flowctl
