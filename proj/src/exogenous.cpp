#include "flowctl/exogenous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flowctl {

namespace {

constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

double cosine_cycle(double day, double peak) {
  return std::cos(2.0 * std::numbers::pi * (day - peak) / 365.0);
}

}  // namespace

int calendar_day(int first_day, int offset) { return ((first_day - 1 + offset) % 365 + 365) % 365 + 1; }

int month_of(int cday) {
  int acc = 0;
  for (int m = 0; m < 12; ++m) {
    acc += kMonthDays[static_cast<std::size_t>(m)];
    if (cday <= acc) return m;
  }
  return 11;
}

int days_in_month(int month) { return kMonthDays.at(static_cast<std::size_t>(month)); }

double price_baseline(const BaselineParams& p, std::size_t material, double absolute_day) {
  return p.base_price[material] * (1.0 + p.inflation[material] * absolute_day / 365.0) *
         (1.0 + p.amplitude[material] * cosine_cycle(absolute_day, p.peak_day[material]));
}

double temperature_baseline(const BaselineParams& p, int cday) {
  return p.temp_mean + p.temp_amplitude * cosine_cycle(cday, p.temp_peak_day);
}

double wind_baseline(const BaselineParams& p, int cday) {
  return p.wind_mean + p.wind_amplitude * cosine_cycle(cday, p.wind_peak_day);
}

Weather AnnualCurves::weather(int t) const {
  const auto i = static_cast<std::size_t>(t - 1);
  return {temperature.at(i), rainfall.at(i), wind.at(i)};
}

Triple AnnualCurves::prices(int t) const {
  const auto i = static_cast<std::size_t>(t - 1);
  return {price[0].at(i), price[1].at(i), price[2].at(i)};
}

AnnualCurves sample_year(const BaselineParams& params, int first_day, std::size_t length, Rng& rng) {
  AnnualCurves curves;
  curves.first_day = first_day;
  curves.temperature.resize(length);
  curves.rainfall.assign(length, 0.0);
  curves.wind.resize(length);
  for (auto& series : curves.price) series.resize(length);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> rain_amount(1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (std::size_t k = 0; k < length; ++k) {
    const int cday = calendar_day(first_day, static_cast<int>(k));
    const int month = month_of(cday);
    const auto m = static_cast<std::size_t>(month);
    const double prob = params.rain_probability[m];
    if (unit(rng) < prob) {
      // Rain depth per wet day scaled so the monthly total holds in expectation.
      const double mean_depth = params.monthly_rain_mm[m] / (prob * days_in_month(month));
      curves.rainfall[k] = mean_depth * rain_amount(rng);
    }
    curves.temperature[k] = temperature_baseline(params, cday);
    curves.wind[k] = wind_baseline(params, cday);

    const double absolute_day = static_cast<double>(first_day) + static_cast<double>(k);
    for (std::size_t i = 0; i < kTrades; ++i) {
      const double base = price_baseline(params, i, absolute_day);
      const double noisy = base * (1.0 + params.price_noise * gauss(rng));
      curves.price[i][k] = std::max(noisy, 0.5 * base);
    }
  }

  for (std::size_t k = 0; k < length; ++k) {
    const double rain = curves.rainfall[k];
    if (rain <= 0.0) continue;
    const double dt = std::min(params.rain_temp_cap, params.rain_temp_coeff * rain);
    const double dw = std::min(params.rain_wind_cap, params.rain_wind_coeff * rain);
    if (k > 0) {
      curves.temperature[k - 1] += dt;
      curves.wind[k - 1] -= dw;
    }
    curves.temperature[k] -= dt;
    curves.wind[k] += dw;
  }
  for (auto& w : curves.wind) w = std::max(0.0, w);
  return curves;
}

std::array<Weather, 3> forecast_weather(const AnnualCurves& curves, const BaselineParams& params, int t,
                                        Rng& rng) {
  if (!curves.covers(t + 3)) throw Error("horizon", "weather forecast beyond sampled curves");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::array<Weather, 3> out{};
  for (std::size_t h = 0; h < 3; ++h) {
    const Weather truth = curves.weather(t + static_cast<int>(h) + 1);
    const double rain = std::max(0.0, truth.rainfall * (1.0 + params.rain_forecast_noise[h] * gauss(rng)));
    const double err = std::abs(rain - truth.rainfall);
    out[h].rainfall = rain;
    out[h].temperature = truth.temperature + params.forecast_temp_coeff * err * gauss(rng);
    out[h].wind = std::max(0.0, truth.wind + params.forecast_wind_coeff * err * gauss(rng));
  }
  return out;
}

std::array<Triple, 5> forecast_price(const AnnualCurves& curves, const BaselineParams& params, int t,
                                     Rng& rng) {
  if (!curves.covers(t + 5)) throw Error("horizon", "price forecast beyond sampled curves");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::array<Triple, 5> out{};
  for (std::size_t h = 0; h < 5; ++h) {
    const Triple truth = curves.prices(t + static_cast<int>(h) + 1);
    for (std::size_t i = 0; i < kTrades; ++i) {
      out[h][i] = std::max(0.5 * truth[i], truth[i] * (1.0 + params.price_forecast_noise[h] * gauss(rng)));
    }
  }
  return out;
}

Triple forecast_cash_inflow(int t, double cash, double interest_rate, const std::vector<PendingPayment>& queue) {
  Triple out{};
  for (std::size_t h = 0; h < 3; ++h) {
    const int day = t + static_cast<int>(h) + 1;
    out[h] = interest_rate * cash;
    for (const auto& p : queue) {
      if (std::max(p.applied_day + 3, t + 1) == day) out[h] += p.amount;
    }
  }
  return out;
}

std::string curves_csv(const AnnualCurves& curves) {
  std::ostringstream os;
  os.precision(10);
  os << "day,Tp,Rf,Ws,RbPr,FwPr,CcPr\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    os << calendar_day(curves.first_day, static_cast<int>(k)) << ',' << curves.temperature[k] << ','
       << curves.rainfall[k] << ',' << curves.wind[k] << ',' << curves.price[0][k] << ','
       << curves.price[1][k] << ',' << curves.price[2][k] << '\n';
  }
  return os.str();
}

std::vector<std::string> validate(const BaselineParams& p) {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < kTrades; ++i) {
    if (!(p.base_price[i] > 0.0)) bad.push_back("exo.base_price");
    if (p.amplitude[i] < 0.0 || p.amplitude[i] >= 1.0) bad.push_back("exo.amplitude");
  }
  if (p.price_noise < 0.0) bad.push_back("exo.price_noise");
  for (std::size_t m = 0; m < 12; ++m) {
    if (p.rain_probability[m] < 0.0 || p.rain_probability[m] > 1.0) bad.push_back("exo.rain_probability");
    if (p.monthly_rain_mm[m] < 0.0) bad.push_back("exo.monthly_rain_mm");
  }
  for (double s : p.rain_forecast_noise) {
    if (s < 0.0) bad.push_back("exo.rain_forecast_noise");
  }
  for (double s : p.price_forecast_noise) {
    if (s < 0.0) bad.push_back("exo.price_forecast_noise");
  }
  if (p.forecast_temp_coeff < 0.0) bad.push_back("exo.forecast_temp_coeff");
  if (p.forecast_wind_coeff < 0.0) bad.push_back("exo.forecast_wind_coeff");
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  return bad;
}

}  // namespace flowctl
