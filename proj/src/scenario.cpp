#include "flowctl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace flowctl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& token) {
  const std::string t = trim(token);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw Error("bad_value", key + ": cannot parse '" + t + "' as a number");
  }
  if (used != t.size() || !std::isfinite(v)) throw Error("bad_value", key + ": cannot parse '" + t + "'");
  return v;
}

std::vector<std::string> list_items(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) throw Error("bad_value", key + ": empty value");
  if (v.front() != '[') return {v};
  if (v.back() != ']') throw Error("bad_value", key + ": unterminated list");
  std::vector<std::string> items;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) items.push_back(trim(item));
  }
  return items;
}

std::vector<double> numbers(const std::string& key, const std::string& raw, std::size_t expected) {
  std::vector<double> out;
  for (const auto& item : list_items(key, raw)) out.push_back(parse_number(key, item));
  if (expected != 0 && out.size() != expected) {
    throw Error("bad_value", key + ": expected " + std::to_string(expected) + " values, got " +
                                 std::to_string(out.size()));
  }
  return out;
}

int integer(const std::string& key, const std::string& raw) {
  const double v = numbers(key, raw, 1)[0];
  if (v != std::floor(v)) throw Error("bad_value", key + ": expected an integer");
  return static_cast<int>(v);
}

// Curves are written as a list of x:y points, e.g. [0:1, 2:0.95].
PiecewiseLinear curve(const std::string& key, const std::string& raw) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& item : list_items(key, raw)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error("bad_value", key + ": curve points are written x:y");
    xs.push_back(parse_number(key, item.substr(0, colon)));
    ys.push_back(parse_number(key, item.substr(colon + 1)));
  }
  if (xs.empty()) throw Error("bad_value", key + ": curve needs at least one point");
  return {std::move(xs), std::move(ys)};
}

template <std::size_t N>
void assign(std::array<double, N>& dst, const std::vector<double>& src) {
  std::copy(src.begin(), src.end(), dst.begin());
}

using Setter = std::function<void(Scenario&, const std::string& key, const std::string& value)>;

template <std::size_t N>
Setter array_setter(std::array<double, N> ModelParams::*field) {
  return [field](Scenario& s, const std::string& k, const std::string& v) { assign(s.model.*field, numbers(k, v, N)); };
}

template <std::size_t N>
Setter exo_array_setter(std::array<double, N> BaselineParams::*field) {
  return [field](Scenario& s, const std::string& k, const std::string& v) {
    assign(s.exogenous.*field, numbers(k, v, N));
  };
}

Setter scalar_setter(double ModelParams::*field) {
  return [field](Scenario& s, const std::string& k, const std::string& v) { s.model.*field = numbers(k, v, 1)[0]; };
}

Setter exo_scalar_setter(double BaselineParams::*field) {
  return [field](Scenario& s, const std::string& k, const std::string& v) {
    s.exogenous.*field = numbers(k, v, 1)[0];
  };
}

Setter int_setter(int ModelParams::*field) {
  return [field](Scenario& s, const std::string& k, const std::string& v) { s.model.*field = integer(k, v); };
}

Setter curve_setter(PiecewiseLinear ModelParams::*field) {
  return [field](Scenario& s, const std::string& k, const std::string& v) { s.model.*field = curve(k, v); };
}

const std::vector<std::pair<std::string, Setter>>& registry() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"floors", int_setter(&ModelParams::floors)},
      {"zones_per_floor", int_setter(&ModelParams::zones_per_floor)},
      {"zone_area", scalar_setter(&ModelParams::zone_area)},
      {"max_days", int_setter(&ModelParams::max_days)},
      {"start_day", int_setter(&ModelParams::start_day)},
      {"initial_cash", scalar_setter(&ModelParams::initial_cash)},
      {"floor_payment", scalar_setter(&ModelParams::floor_payment)},
      {"interest_rate", scalar_setter(&ModelParams::interest_rate)},
      {"hourly_wage", array_setter(&ModelParams::hourly_wage)},
      {"overtime_surcharge", scalar_setter(&ModelParams::overtime_surcharge)},
      {"inventory_fee", scalar_setter(&ModelParams::inventory_fee)},
      {"discount_quantity", array_setter(&ModelParams::discount_quantity)},
      {"min_discount_ratio", scalar_setter(&ModelParams::min_discount_ratio)},
      {"workers", array_setter(&ModelParams::workers)},
      {"normal_absence", scalar_setter(&ModelParams::normal_absence)},
      {"absence_fatigue_slope", scalar_setter(&ModelParams::absence_fatigue_slope)},
      {"storage_cap", array_setter(&ModelParams::storage_cap)},
      {"formwork_loss", scalar_setter(&ModelParams::formwork_loss)},
      {"area_per_worker_hour", array_setter(&ModelParams::area_per_worker_hour)},
      {"area_per_material", array_setter(&ModelParams::area_per_material)},
      {"price_unit_scale", array_setter(&ModelParams::price_unit_scale)},
      {"fatigue_effect", curve_setter(&ModelParams::fatigue_effect)},
      {"temperature_effect", curve_setter(&ModelParams::temperature_effect)},
      {"rainfall_effect", curve_setter(&ModelParams::rainfall_effect)},
      {"wind_effect", curve_setter(&ModelParams::wind_effect)},
      {"hour_effectiveness", array_setter(&ModelParams::hour_effectiveness)},
      {"labor_cost_ratio", scalar_setter(&ModelParams::labor_cost_ratio)},
      {"material_cost_ratio", scalar_setter(&ModelParams::material_cost_ratio)},
      {"min_work_hours", scalar_setter(&ModelParams::min_work_hours)},
      {"max_work_hours", scalar_setter(&ModelParams::max_work_hours)},
      {"max_order", array_setter(&ModelParams::max_order)},
      {"exo.base_price", exo_array_setter(&BaselineParams::base_price)},
      {"exo.peak_day", exo_array_setter(&BaselineParams::peak_day)},
      {"exo.inflation", exo_array_setter(&BaselineParams::inflation)},
      {"exo.amplitude", exo_array_setter(&BaselineParams::amplitude)},
      {"exo.price_noise", exo_scalar_setter(&BaselineParams::price_noise)},
      {"exo.temp_mean", exo_scalar_setter(&BaselineParams::temp_mean)},
      {"exo.temp_amplitude", exo_scalar_setter(&BaselineParams::temp_amplitude)},
      {"exo.temp_peak_day", exo_scalar_setter(&BaselineParams::temp_peak_day)},
      {"exo.monthly_rain_mm", exo_array_setter(&BaselineParams::monthly_rain_mm)},
      {"exo.rain_probability", exo_array_setter(&BaselineParams::rain_probability)},
      {"exo.wind_mean", exo_scalar_setter(&BaselineParams::wind_mean)},
      {"exo.wind_amplitude", exo_scalar_setter(&BaselineParams::wind_amplitude)},
      {"exo.wind_peak_day", exo_scalar_setter(&BaselineParams::wind_peak_day)},
      {"exo.rain_temp_coeff", exo_scalar_setter(&BaselineParams::rain_temp_coeff)},
      {"exo.rain_temp_cap", exo_scalar_setter(&BaselineParams::rain_temp_cap)},
      {"exo.rain_wind_coeff", exo_scalar_setter(&BaselineParams::rain_wind_coeff)},
      {"exo.rain_wind_cap", exo_scalar_setter(&BaselineParams::rain_wind_cap)},
      {"exo.rain_forecast_noise", exo_array_setter(&BaselineParams::rain_forecast_noise)},
      {"exo.forecast_temp_coeff", exo_scalar_setter(&BaselineParams::forecast_temp_coeff)},
      {"exo.forecast_wind_coeff", exo_scalar_setter(&BaselineParams::forecast_wind_coeff)},
      {"exo.price_forecast_noise", exo_array_setter(&BaselineParams::price_forecast_noise)},
  };
  return table;
}

void check_curve(std::vector<Violation>& out, const char* name, const PiecewiseLinear& c, bool non_increasing) {
  if (c.empty()) {
    out.push_back({name, "curve has no breakpoints"});
    return;
  }
  if (!c.strictly_increasing_x()) out.push_back({name, "breakpoints must be strictly increasing"});
  if (non_increasing && !c.non_increasing_y()) out.push_back({name, "values must be non-increasing"});
}

}  // namespace

std::vector<Violation> validate(const ModelParams& p) {
  std::vector<Violation> out;
  auto need = [&out](bool ok, const char* field, const char* msg) {
    if (!ok) out.push_back({field, msg});
  };
  need(p.floors >= 1, "floors", "must be >= 1");
  need(p.zones_per_floor >= 1, "zones_per_floor", "must be >= 1");
  need(p.zone_area > 0.0, "zone_area", "must be > 0");
  need(p.max_days >= 1, "max_days", "must be >= 1");
  need(p.start_day >= 1 && p.start_day <= 365, "start_day", "must be in 1..365");
  need(p.initial_cash >= 0.0, "initial_cash", "must be >= 0");
  need(p.floor_payment >= 0.0, "floor_payment", "must be >= 0");
  need(p.interest_rate >= 0.0, "interest_rate", "must be >= 0");
  need(p.overtime_surcharge >= 0.0, "overtime_surcharge", "must be >= 0");
  need(p.inventory_fee >= 0.0, "inventory_fee", "must be >= 0");
  need(p.min_discount_ratio > 0.0 && p.min_discount_ratio <= 1.0, "min_discount_ratio", "must be in (0, 1]");
  need(p.normal_absence >= 0.0 && p.normal_absence < 1.0, "normal_absence", "must be in [0, 1)");
  need(p.absence_fatigue_slope >= 0.0, "absence_fatigue_slope", "must be >= 0");
  need(p.formwork_loss >= 0.0 && p.formwork_loss < 1.0, "formwork_loss", "must be in [0, 1)");
  for (std::size_t i = 0; i < kTrades; ++i) {
    need(p.hourly_wage[i] >= 0.0, "hourly_wage", "must be >= 0");
    need(p.discount_quantity[i] > 0.0, "discount_quantity", "must be > 0");
    need(p.workers[i] >= 0.0, "workers", "must be >= 0");
    need(p.area_per_worker_hour[i] > 0.0, "area_per_worker_hour", "must be > 0");
    need(p.area_per_material[i] > 0.0, "area_per_material", "must be > 0");
    need(p.price_unit_scale[i] > 0.0, "price_unit_scale", "must be > 0");
    need(p.max_order[i] >= 0.0, "max_order", "must be >= 0");
  }
  need(p.storage_cap[0] >= 0.0 && p.storage_cap[1] >= 0.0, "storage_cap", "must be >= 0");
  check_curve(out, "fatigue_effect", p.fatigue_effect, true);
  check_curve(out, "temperature_effect", p.temperature_effect, false);
  check_curve(out, "rainfall_effect", p.rainfall_effect, true);
  check_curve(out, "wind_effect", p.wind_effect, true);

  bool hours_ok = true;
  for (std::size_t i = 0; i < p.hour_effectiveness.size(); ++i) {
    if (i < 8 && p.hour_effectiveness[i] != 1.0) hours_ok = false;
    if (i >= 8 && p.hour_effectiveness[i] > p.hour_effectiveness[i - 1]) hours_ok = false;
    if (p.hour_effectiveness[i] < 0.0) hours_ok = false;
  }
  need(hours_ok, "hour_effectiveness", "first 8 hours must be 1, then non-increasing");
  need(p.labor_cost_ratio >= 0.0 && p.material_cost_ratio >= 0.0 &&
           p.labor_cost_ratio + p.material_cost_ratio <= 1.0 + 1e-12,
       "labor_cost_ratio", "cost ratios must be >= 0 and sum to at most 1");
  need(p.min_work_hours >= 1.0 && p.min_work_hours <= p.max_work_hours && p.max_work_hours <= 12.0,
       "max_work_hours", "work-hour bounds must satisfy 1 <= min <= max <= 12");
  return out;
}

const std::vector<BuiltinInfo>& builtin_scenarios() {
  static const std::vector<BuiltinInfo> list = {
      {0, "CC/RPB", "common conditions, Beijing residential project"},
      {1, "HBC", "harsh budget: start-up cash 900,000"},
      {2, "HWC", "harsh weather: start on day 32, workers +65%"},
      {3, "HMC", "harsh market: no order discount"},
      {4, "INF", "30 floors, 180-day limit"},
      {5, "IAF", "15 zones per floor, payment 500,000, workers +25%"},
      {6, "CNWDP", "workers changed in different proportions"},
  };
  return list;
}

void apply_setting(Scenario& scenario, const std::string& key, const std::string& value) {
  for (const auto& [name, setter] : registry()) {
    if (name == key) {
      setter(scenario, key, value);
      return;
    }
  }
  throw Error("unknown_key", "unknown scenario setting '" + key + "'");
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> keys;
  for (const auto& entry : registry()) keys.push_back(entry.first);
  return keys;
}

Scenario load_scenario(const ScenarioSpec& spec) {
  Scenario s;
  s.id = spec.id;
  int builtin = -1;
  if (spec.id.size() == 1 && spec.id[0] >= '0' && spec.id[0] <= '6') builtin = spec.id[0] - '0';

  if (builtin >= 0) {
    s.label = builtin_scenarios()[static_cast<std::size_t>(builtin)].label;
    ModelParams& m = s.model;
    switch (builtin) {
      case 1:
        m.initial_cash = 900'000.0;
        break;
      case 2:
        m.start_day = 32;
        // Workers +65% rounded to whole workers.
        for (std::size_t i = 0; i < kTrades; ++i) m.workers[i] = std::round(1.65 * m.workers[i]);
        break;
      case 3:
        m.min_discount_ratio = 1.0;
        break;
      case 4:
        m.floors = 30;
        m.max_days = 180;
        break;
      case 5:
        m.zones_per_floor = 15;
        m.floor_payment = 500'000.0;
        m.workers = {15.0, 25.0, 10.0};
        break;
      case 6:
        m.workers = {16.0, 16.0, 9.0};
        break;
      default:
        break;
    }
  } else {
    // Custom scenarios start from the scenario-0 defaults; a non-builtin id
    // without any overrides is almost certainly a typo.
    if (spec.overrides.empty()) throw Error("unknown_scenario", "unknown scenario id '" + spec.id + "'");
    s.label = spec.id;
  }

  for (const auto& [key, value] : spec.overrides) apply_setting(s, key, value);

  const auto violations = validate(s.model);
  if (!violations.empty()) {
    throw Error("invalid_parameter", violations.front().field + ": " + violations.front().message);
  }
  const auto exo = validate(s.exogenous);
  if (!exo.empty()) throw Error("invalid_parameter", exo.front() + ": out of range");
  return s;
}

ScenarioSpec parse_scenario_config(const std::string& text) {
  ScenarioSpec spec;
  spec.id = "custom";
  bool has_base = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("bad_config", "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "base") {
      spec.id = value;
      has_base = true;
    } else if (key == "name") {
      continue;
    } else {
      spec.overrides[key] = value;
    }
  }
  if (!has_base && spec.overrides.empty()) throw Error("bad_config", "config sets nothing");
  return spec;
}

ScenarioSpec read_scenario_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("io", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario_config(ss.str());
}

}  // namespace flowctl
