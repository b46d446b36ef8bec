#include "flowctl/observe.hpp"

#include <algorithm>
#include <cmath>

namespace flowctl {

Forecasts make_forecasts(const State& s, const AnnualCurves& curves, const BaselineParams& exo,
                         const ModelParams& params, Rng& rng) {
  Forecasts f;
  f.cash_inflow = forecast_cash_inflow(s.t, s.cash, params.interest_rate, s.pay_queue);
  f.weather = forecast_weather(curves, exo, s.t, rng);
  f.price = forecast_price(curves, exo, s.t, rng);
  return f;
}

Observation observe(const State& s, const Forecasts& f) {
  Observation o{};
  std::size_t k = 0;
  auto put = [&](double v) { o[k++] = v; };
  auto put_weather = [&](const Weather& w) {
    put(w.temperature);
    put(w.rainfall);
    put(w.wind);
  };
  auto put_triple = [&](const Triple& x) {
    for (double v : x) put(v);
  };

  put(static_cast<double>(s.t));
  put_triple(s.area);
  put(s.cash);
  put(s.inflow);
  put(s.week_wages);
  put_triple(s.stock);
  put(s.formwork_in_use);
  put_triple(s.price);
  put_weather(s.weather);

  for (const auto& w : s.weather_history) put_weather(w);
  for (const auto& h : s.hours_history) put_triple(h);
  put_triple(f.cash_inflow);
  for (const auto& w : f.weather) put_weather(w);
  for (const auto& p : f.price) put_triple(p);
  return o;
}

NormStats::NormStats(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

void NormStats::update(std::span<const double> x) {
  if (x.size() != mean_.size()) throw Error("dimension", "observation width does not match statistics");
  count_ += 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean_[i];
    mean_[i] += d / count_;
    m2_[i] += d * (x[i] - mean_[i]);
  }
}

std::vector<double> NormStats::stddev() const {
  std::vector<double> out(mean_.size(), 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double var = count_ > 0.0 ? m2_[i] / count_ : 1.0;
    out[i] = std::max(std::sqrt(std::max(var, 0.0)), kStdFloor);
  }
  return out;
}

void NormStats::normalize(std::span<const double> x, std::span<double> out) const {
  if (x.size() != mean_.size() || out.size() != mean_.size()) {
    throw Error("dimension", "observation width does not match statistics");
  }
  const auto sd = stddev();
  for (std::size_t i = 0; i < x.size(); ++i) {
    // A dimension that has never varied maps to zero.
    out[i] = sd[i] <= kStdFloor ? 0.0 : (x[i] - mean_[i]) / sd[i];
  }
}

std::vector<double> NormStats::normalized(std::span<const double> x) const {
  std::vector<double> out(x.size());
  normalize(x, out);
  return out;
}

void NormStats::assign(double count, std::vector<double> mean, std::vector<double> m2) {
  if (mean.size() != m2.size()) throw Error("dimension", "mean and variance widths differ");
  count_ = count;
  mean_ = std::move(mean);
  m2_ = std::move(m2);
}

ActionVector ActionScale::mid() const {
  ActionVector m{};
  for (std::size_t i = 0; i < kActionSize; ++i) m[i] = 0.5 * (lo[i] + hi[i]);
  return m;
}

ActionVector ActionScale::half() const {
  ActionVector h{};
  for (std::size_t i = 0; i < kActionSize; ++i) h[i] = 0.5 * (hi[i] - lo[i]);
  return h;
}

ActionScale action_scale(const ModelParams& p) {
  ActionScale s;
  for (std::size_t i = 0; i < kTrades; ++i) {
    s.lo[i] = p.min_work_hours;
    s.hi[i] = p.max_work_hours;
    s.lo[kTrades + i] = 0.0;
    s.hi[kTrades + i] = p.max_order[i];
  }
  return s;
}

Action denormalize_action(std::span<const double> a, const ModelParams& p) {
  if (a.size() != kActionSize) throw Error("dimension", "action vector must have 6 entries");
  const ActionScale s = action_scale(p);
  const ActionVector mid = s.mid();
  const ActionVector half = s.half();
  ActionVector raw{};
  for (std::size_t i = 0; i < kActionSize; ++i) {
    const double x = std::isfinite(a[i]) ? mid[i] + a[i] * half[i] : mid[i];
    raw[i] = std::clamp(x, s.lo[i], s.hi[i]);
  }
  Action out;
  for (std::size_t i = 0; i < kTrades; ++i) {
    out.hours[i] = std::clamp(std::round(raw[i] * 2.0) / 2.0, s.lo[i], s.hi[i]);
    out.orders[i] = std::clamp(std::round(raw[kTrades + i]), s.lo[kTrades + i], s.hi[kTrades + i]);
  }
  return out;
}

ActionVector normalize_action(const Action& action, const ModelParams& p) {
  const ActionScale s = action_scale(p);
  const ActionVector mid = s.mid();
  const ActionVector half = s.half();
  ActionVector out{};
  for (std::size_t i = 0; i < kTrades; ++i) {
    out[i] = (action.hours[i] - mid[i]) / half[i];
    out[kTrades + i] = (action.orders[i] - mid[kTrades + i]) / half[kTrades + i];
  }
  return out;
}

}  // namespace flowctl
