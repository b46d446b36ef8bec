#include "flowctl/env.hpp"

#include <algorithm>
#include <cmath>

namespace flowctl {

namespace {

constexpr double kAreaTolerance = 1e-9;

double snap(double value, double target) {
  return std::abs(value - target) <= kAreaTolerance * std::max(1.0, target) ? target : value;
}

}  // namespace

std::string_view to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Running:
      return "running";
    case StepStatus::Completed:
      return "completed";
    case StepStatus::FailedCost:
      return "failed_cost";
    case StepStatus::FailedTime:
      return "failed_time";
  }
  return "unknown";
}

bool within_bounds(const Action& a, const ModelParams& p) {
  for (std::size_t i = 0; i < kTrades; ++i) {
    if (!(a.hours[i] >= p.min_work_hours && a.hours[i] <= p.max_work_hours)) return false;
    if (!(a.orders[i] >= 0.0 && a.orders[i] <= p.max_order[i])) return false;
  }
  return true;
}

double Noise::uniform(double half_width) {
  if (rng_ == nullptr) return 0.0;
  return std::uniform_real_distribution<double>(-half_width, half_width)(*rng_);
}

int Noise::lead_time() {
  if (rng_ == nullptr) return 3;
  return std::uniform_int_distribution<int>(2, 4)(*rng_);
}

State init_state(const ModelParams& params, const AnnualCurves& curves) {
  if (!curves.covers(1)) throw Error("curves", "exogenous curves do not cover the start day");
  State s;
  s.t = 1;
  s.cash = params.initial_cash;
  s.opening_cash = params.initial_cash;
  s.price = curves.prices(1);
  s.weather = curves.weather(1);
  s.hours_history.fill({8.0, 8.0, 8.0});
  s.weather_history.fill(s.weather);
  return s;
}

double discount_ratio(double quantity, double full_discount_quantity, double min_ratio) {
  if (quantity <= full_discount_quantity) return 1.0 - quantity / full_discount_quantity * (1.0 - min_ratio);
  return min_ratio;
}

double daily_wage(double attendance, double hourly_wage, double overtime_surcharge, double hours) {
  if (hours <= 8.0) return attendance * hourly_wage * hours;
  return attendance * hourly_wage * (hours + overtime_surcharge * (hours - 8.0));
}

double effective_hours(const ModelParams& params, double hours) {
  double total = 0.0;
  const auto& per_hour = params.hour_effectiveness;
  for (std::size_t i = 0; i < per_hour.size(); ++i) {
    const double covered = std::clamp(hours - static_cast<double>(i), 0.0, 1.0);
    if (covered <= 0.0) break;
    total += covered * per_hour[i];
  }
  return total;
}

double absence_ratio(const ModelParams& params, double fatigue) {
  return std::min(1.0, params.normal_absence * (1.0 + params.absence_fatigue_slope * fatigue));
}

double whole_zones(double area, double zone_area) { return std::floor(area / zone_area + kAreaTolerance); }

LaborResult labor_update(const State& s, const Action& a, const ModelParams& p) {
  LaborResult r;
  for (std::size_t i = 0; i < kTrades; ++i) {
    r.fatigue_effect[i] = p.fatigue_effect(s.fatigue[i]);
    r.attendance[i] = p.workers[i] * (1.0 - absence_ratio(p, s.fatigue[i]));
    r.fatigue_next[i] = std::max(0.0, 0.5 * s.fatigue[i] + a.hours[i] - 8.0);
  }
  r.weather_efficiency = std::min({1.0, s.weather_efficiency + 0.3, p.temperature_effect(s.weather.temperature),
                                   p.rainfall_effect(s.weather.rainfall), p.wind_effect(s.weather.wind)});
  return r;
}

WorkResult work_update(const State& s, const Action& a, const LaborResult& labor, const ModelParams& p, Noise& noise) {
  WorkResult r;
  const double za = p.zone_area;
  const double total = p.total_area();
  r.precedence_cap[kRebar] = (whole_zones(s.area[kConcrete], za) + p.zones_per_floor) * za - s.area[kRebar];
  r.precedence_cap[kFormwork] = whole_zones(s.area[kRebar], za) * za - s.area[kFormwork];
  r.precedence_cap[kConcrete] = whole_zones(s.area[kFormwork], za) * za - s.area[kConcrete];

  for (std::size_t i = 0; i < kTrades; ++i) {
    r.labor_cap[i] = (1.0 + noise.uniform(0.05)) * labor.fatigue_effect[i] * labor.weather_efficiency *
                     p.area_per_worker_hour[i] * labor.attendance[i] * effective_hours(p, a.hours[i]);
  }
  for (std::size_t i = 0; i < kTrades; ++i) {
    r.material_cap[i] = (1.0 + noise.uniform(0.05)) * p.area_per_material[i] * s.stock[i];
  }
  for (std::size_t i = 0; i < kTrades; ++i) {
    const double d = std::min({r.labor_cap[i], r.material_cap[i], r.precedence_cap[i], total - s.area[i]});
    r.delta[i] = std::max(0.0, d);
  }
  return r;
}

MaterialResult material_update(const State& s, const WorkResult& w, const Action& a, const ModelParams& p,
                               Noise& noise) {
  MaterialResult r;
  for (std::size_t i = 0; i < kTrades; ++i) {
    double c = 0.0;
    if (w.material_cap[i] > 0.0) c = (1.0 + noise.uniform(0.05)) * (w.delta[i] / w.material_cap[i]) * s.stock[i];
    r.consumed[i] = std::clamp(c, 0.0, s.stock[i]);
  }

  // Formwork is stripped from zones whose concrete was completed today.
  const double za = p.zone_area;
  const double poured_zones_before = whole_zones(s.area[kConcrete], za);
  const double poured_zones_after = whole_zones(s.area[kConcrete] + w.delta[kConcrete], za);
  const double stripped_area = (poured_zones_after - poured_zones_before) * za;
  const double open_area = s.area[kFormwork] - poured_zones_before * za;
  double removed = 0.0;
  if (open_area > 0.0 && stripped_area > 0.0) {
    removed = std::clamp(stripped_area / open_area, 0.0, 1.0) * s.formwork_in_use;
  }
  r.formwork_removed = removed;
  r.recycled = (1.0 - (1.0 + noise.uniform(0.1)) * p.formwork_loss) * removed;
  r.formwork_in_use = std::max(0.0, s.formwork_in_use + r.consumed[kFormwork] - removed);

  const double rebar = s.stock[kRebar] - r.consumed[kRebar] + a.orders[kRebar];
  r.stock[kRebar] = std::min(p.storage_cap[0], rebar);
  r.wasted[kRebar] = rebar - r.stock[kRebar];

  const double formwork = s.stock[kFormwork] - r.consumed[kFormwork] + r.recycled + a.orders[kFormwork];
  r.stock[kFormwork] = std::min(p.storage_cap[1], formwork);
  r.wasted[kFormwork] = formwork - r.stock[kFormwork];

  // Concrete cannot be stored: leftovers are discarded, today's order is
  // tomorrow's stock.
  r.wasted[kConcrete] = s.stock[kConcrete] - r.consumed[kConcrete];
  r.stock[kConcrete] = a.orders[kConcrete];
  return r;
}

CashResult cash_update(const State& s, const Action& a, const LaborResult& labor, double concrete_after,
                       const ModelParams& p, Noise& noise) {
  CashResult r;
  const bool completed = concrete_after >= p.total_area();

  double landed = 0.0;
  for (const auto& pay : s.pay_queue) {
    if (pay.landing_day <= s.t) {
      landed += pay.amount;
    } else {
      r.queue.push_back(pay);
    }
  }

  const double floor_area = p.floor_area();
  const auto floors_before = static_cast<int>(whole_zones(s.area[kConcrete], floor_area));
  const auto floors_after = static_cast<int>(whole_zones(concrete_after, floor_area));
  for (int f = floors_before; f < floors_after; ++f) {
    const int lead = noise.lead_time();
    r.queue.push_back({s.t, s.t + lead, p.floor_payment});
  }

  for (std::size_t i = 0; i < kTrades; ++i) {
    r.order_payment += discount_ratio(a.orders[i], p.discount_quantity[i], p.min_discount_ratio) * s.price[i] *
                       p.price_unit_scale[i] * a.orders[i];
    r.wages_today[i] = daily_wage(labor.attendance[i], p.hourly_wage[i], p.overtime_surcharge, a.hours[i]);
  }

  double accrued = s.week_wages;
  if (s.t % 7 == 1) {
    r.wages_paid = accrued;
    accrued = 0.0;
  }
  accrued += r.wages_today[0] + r.wages_today[1] + r.wages_today[2];

  if (completed) {
    // Final settlement: the last partial week is paid and the client pays
    // every milestone still in transit.
    r.wages_paid += accrued;
    accrued = 0.0;
    for (const auto& pay : r.queue) landed += pay.amount;
    r.queue.clear();
  }
  r.week_wages = accrued;

  r.inflow = p.interest_rate * s.cash + landed;
  r.outflow = p.inventory_fee + r.order_payment + r.wages_paid;
  r.cash = s.cash + r.inflow - r.outflow;
  return r;
}

StepStatus status(const State& s, const ModelParams& p) {
  if (s.area[kConcrete] >= p.total_area()) return StepStatus::Completed;
  if (s.t >= p.max_days) return StepStatus::FailedTime;
  if (s.opening_cash < s.outflow) return StepStatus::FailedCost;
  return StepStatus::Running;
}

StepResult step(const State& s, const Action& a, const AnnualCurves& curves, const ModelParams& p, Noise& noise) {
  if (!within_bounds(a, p)) throw Error("action_out_of_bounds", "action outside the decision bounds");
  if (!curves.covers(s.t + 1)) throw Error("curves", "exogenous curves end before the next day");

  StepResult r;
  r.labor = labor_update(s, a, p);
  r.work = work_update(s, a, r.labor, p, noise);
  r.material = material_update(s, r.work, a, p, noise);

  State& n = r.next;
  n = s;
  const double total = p.total_area();
  for (std::size_t i = 0; i < kTrades; ++i) n.area[i] = snap(s.area[i] + r.work.delta[i], total);

  r.cash = cash_update(s, a, r.labor, n.area[kConcrete], p, noise);

  n.t = s.t + 1;
  n.opening_cash = s.cash;
  n.cash = r.cash.cash;
  n.inflow = r.cash.inflow;
  n.outflow = r.cash.outflow;
  n.week_wages = r.cash.week_wages;
  n.pay_queue = r.cash.queue;
  n.labor_cost += r.cash.wages_paid;
  n.material_cost += r.cash.order_payment + p.inventory_fee;
  n.total_inflow += r.cash.inflow;
  n.total_outflow += r.cash.outflow;

  n.weather_efficiency = r.labor.weather_efficiency;
  n.fatigue = r.labor.fatigue_next;
  n.stock = r.material.stock;
  n.formwork_in_use = r.material.formwork_in_use;
  for (std::size_t i = 0; i < kTrades; ++i) {
    n.ordered[i] += a.orders[i];
    n.consumed[i] += r.material.consumed[i];
    n.wasted[i] += r.material.wasted[i];
  }
  n.recycled += r.material.recycled;
  n.formwork_removed += r.material.formwork_removed;
  n.formwork_lost += r.material.formwork_removed - r.material.recycled;

  n.hours_history = {s.hours_history[1], s.hours_history[2], a.hours};
  n.weather_history = {s.weather_history[1], s.weather};
  n.price = curves.prices(n.t);
  n.weather = curves.weather(n.t);

  r.status = status(n, p);
  return r;
}

}  // namespace flowctl
