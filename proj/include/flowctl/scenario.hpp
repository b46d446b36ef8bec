#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "flowctl/common.hpp"
#include "flowctl/exogenous.hpp"
#include "flowctl/piecewise.hpp"

namespace flowctl {

// Project and environment constants. Defaults are the Beijing residential
// project (scenario 0).
struct ModelParams {
  int floors = 25;
  int zones_per_floor = 12;
  double zone_area = 50.0;  // m²
  int max_days = 150;
  int start_day = 151;  // calendar day, 1..365
  double initial_cash = 1'000'000.0;
  double floor_payment = 400'000.0;
  double interest_rate = 0.0001;  // daily

  Triple hourly_wage{27.5, 27.5, 22.5};
  double overtime_surcharge = 2.0;  // overtime hour costs (1 + surcharge) x normal
  double inventory_fee = 1000.0;    // per day
  Triple discount_quantity{400.0, 800.0, 150.0};
  double min_discount_ratio = 0.9;

  Triple workers{12.0, 20.0, 8.0};
  double normal_absence = 0.05;
  double absence_fatigue_slope = 0.25;

  std::array<double, 2> storage_cap{500.0, 2000.0};  // rebar, formwork
  double formwork_loss = 0.05;

  Triple area_per_worker_hour{2.5, 1.51, 3.84};
  Triple area_per_material{1.54, 0.25, 3.0};
  // Unit price is quoted per ton for rebar but rebar is ordered in 0.1 t.
  Triple price_unit_scale{0.1, 1.0, 1.0};

  PiecewiseLinear fatigue_effect{{0, 2, 4, 6, 8}, {1, 0.95, 0.85, 0.7, 0.4}};
  PiecewiseLinear temperature_effect{{0, 10, 20, 30, 40, 50}, {0, 0.5, 1, 1, 0.5, 0}};
  PiecewiseLinear rainfall_effect{{2, 10, 20, 50}, {1, 0.8, 0.5, 0}};
  PiecewiseLinear wind_effect{{5, 10, 20}, {1, 0.7, 0}};
  std::array<double, 12> hour_effectiveness{1, 1, 1, 1, 1, 1, 1, 1, 0.9, 0.8, 0.7, 0.6};

  double labor_cost_ratio = 0.1;
  double material_cost_ratio = 0.9;

  double min_work_hours = 4.0;
  double max_work_hours = 12.0;
  Triple max_order{500.0, 2000.0, 300.0};

  double floor_area() const { return zones_per_floor * zone_area; }
  double total_area() const { return floors * floor_area(); }
  double milestone_total() const { return floors * floor_payment; }

  bool operator==(const ModelParams&) const = default;
};

struct Violation {
  std::string field;
  std::string message;
};

std::vector<Violation> validate(const ModelParams& params);

struct Scenario {
  std::string id;
  std::string label;
  ModelParams model;
  BaselineParams exogenous;
};

// A built-in id ("0".."6") or a custom name, plus key = value overrides using
// the config-file grammar.
struct ScenarioSpec {
  std::string id = "0";
  std::map<std::string, std::string> overrides;
};

struct BuiltinInfo {
  int id;
  const char* label;
  const char* summary;
};

const std::vector<BuiltinInfo>& builtin_scenarios();

// Throws Error("unknown_scenario") or Error("invalid_parameter") naming the field.
Scenario load_scenario(const ScenarioSpec& spec);

// Parses the flat config grammar; `base = <id>` selects the starting scenario.
ScenarioSpec parse_scenario_config(const std::string& text);
ScenarioSpec read_scenario_config(const std::string& path);

// Applies one key = value assignment; throws Error("unknown_key"/"bad_value").
void apply_setting(Scenario& scenario, const std::string& key, const std::string& value);

std::vector<std::string> setting_keys();

}  // namespace flowctl
