#include "flowctl/episode.hpp"

namespace flowctl {

namespace {

enum Stream : std::uint64_t { kCurves = 1, kDynamics = 2, kForecasts = 3 };

}  // namespace

std::size_t curve_length(const ModelParams& params) { return static_cast<std::size_t>(params.max_days) + 8; }

AnnualCurves Episode::sample_curves(const Scenario& scenario, std::uint64_t seed) {
  Rng curve_rng(derive_seed(seed, kCurves));
  return sample_year(scenario.exogenous, scenario.model.start_day, curve_length(scenario.model), curve_rng);
}

Episode::Episode(const Scenario& scenario, std::uint64_t seed)
    : Episode(scenario, seed, sample_curves(scenario, seed)) {}

Episode::Episode(const Scenario& scenario, std::uint64_t seed, const AnnualCurves& curves)
    : scenario_(&scenario),
      curves_(curves),
      dynamics_rng_(derive_seed(seed, kDynamics)),
      forecast_rng_(derive_seed(seed, kForecasts)) {
  state_ = init_state(scenario.model, curves_);
}

Observation Episode::observation() {
  return observe(state_, make_forecasts(state_, curves_, scenario_->exogenous, scenario_->model, forecast_rng_));
}

StepResult Episode::step(const Action& action) {
  if (done()) throw Error("episode_over", "step called on a finished episode");
  Noise noise(dynamics_rng_);
  StepResult r = flowctl::step(state_, action, curves_, scenario_->model, noise);
  state_ = r.next;
  status_ = r.status;
  return r;
}

std::string daily_log_header() {
  return "t,WH_rebar,WH_formwork,WH_concrete,B_rebar,B_formwork,B_concrete,A_rebar,A_formwork,A_concrete,"
         "S_rebar,S_formwork,S_concrete,FwU,Ca,ICa,OCa,Pr_rebar,Pr_formwork,Pr_concrete,Tp,Rf,Ws,"
         "FaI_rebar,FaI_formwork,FaI_concrete,EnE,DeR_P,DeR_D,DeR_W,DeR_M,SpR_F,SpR_D,SpR_W,SpR_M,reward,status";
}

void write_daily_log_row(std::ostream& os, const DayRecord& d) {
  const State& s = d.before;
  const State& n = d.result.next;
  const auto old = os.precision(12);
  os << s.t;
  for (double v : d.action.hours) os << ',' << v;
  for (double v : d.action.orders) os << ',' << v;
  for (double v : n.area) os << ',' << v;
  for (double v : n.stock) os << ',' << v;
  os << ',' << n.formwork_in_use << ',' << n.cash << ',' << n.inflow << ',' << n.outflow;
  for (double v : s.price) os << ',' << v;
  os << ',' << s.weather.temperature << ',' << s.weather.rainfall << ',' << s.weather.wind;
  for (double v : s.fatigue) os << ',' << v;
  os << ',' << n.weather_efficiency;
  const RewardBreakdown& r = d.reward;
  os << ',' << r.progress << ',' << r.duration_dense << ',' << r.labor_dense << ',' << r.material_dense << ','
     << r.failure << ',' << r.duration_sparse << ',' << r.labor_sparse << ',' << r.material_sparse << ','
     << r.total << ',' << to_string(d.result.status) << '\n';
  os.precision(old);
}

}  // namespace flowctl
