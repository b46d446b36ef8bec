#pragma once

#include <array>
#include <string>
#include <vector>

#include "flowctl/common.hpp"

namespace flowctl {

struct Weather {
  double temperature = 0.0;  // °C
  double rainfall = 0.0;     // mm
  double wind = 0.0;         // m/s

  bool operator==(const Weather&) const = default;
};

// Baselines for the weather and price processes plus forecast noise levels.
// Defaults approximate Beijing climatology and Chinese material prices.
struct BaselineParams {
  // rebar CNY/ton, formwork CNY/m², concrete CNY/m³
  Triple base_price{3000.0, 20.0, 480.0};
  Triple peak_day{258.0, 105.0, 0.0};  // mid-September, mid-April
  Triple inflation{0.30, 0.05, 0.10};  // per 365 days
  Triple amplitude{0.05, 0.05, 0.0};
  double price_noise = 0.005;  // relative white-noise std

  double temp_mean = 12.0;
  double temp_amplitude = 15.0;
  double temp_peak_day = 205.0;
  std::array<double, 12> monthly_rain_mm{3, 5, 10, 25, 35, 75, 185, 160, 50, 25, 10, 3};
  std::array<double, 12> rain_probability{0.05, 0.05, 0.1,  0.15, 0.2,  0.35,
                                          0.45, 0.4,  0.25, 0.15, 0.08, 0.05};
  double wind_mean = 3.0;
  double wind_amplitude = 1.5;
  double wind_peak_day = 100.0;

  // Weather shifts around rain: the day before is warmer and calmer, the
  // rainy day colder and windier, in proportion to rainfall.
  double rain_temp_coeff = 0.2;
  double rain_temp_cap = 5.0;
  double rain_wind_coeff = 0.1;
  double rain_wind_cap = 3.0;

  std::array<double, 3> rain_forecast_noise{0.2, 0.35, 0.5};
  double forecast_temp_coeff = 0.2;  // °C of noise std per mm of rainfall error
  double forecast_wind_coeff = 0.1;  // m/s of noise std per mm of rainfall error
  std::array<double, 5> price_forecast_noise{0.005, 0.01, 0.015, 0.02, 0.025};
};

// Day-indexed exogenous series. Index 0 is the project start day.
struct AnnualCurves {
  int first_day = 1;  // calendar day (1..365) of index 0
  std::vector<double> temperature;
  std::vector<double> rainfall;
  std::vector<double> wind;
  std::array<std::vector<double>, 3> price;

  std::size_t size() const { return temperature.size(); }
  // Project day t (1-based).
  Weather weather(int t) const;
  Triple prices(int t) const;
  bool covers(int t) const { return t >= 1 && static_cast<std::size_t>(t) <= size(); }
};

int calendar_day(int first_day, int offset);
int month_of(int calendar_day);
int days_in_month(int month);

// Noise-free price baseline at an absolute day count (inflation keeps
// accumulating past day 365; the periodic term wraps).
double price_baseline(const BaselineParams& p, std::size_t material, double absolute_day);
double temperature_baseline(const BaselineParams& p, int calendar_day);
double wind_baseline(const BaselineParams& p, int calendar_day);

// Samples `length` days starting at calendar day `first_day`.
AnnualCurves sample_year(const BaselineParams& params, int first_day, std::size_t length, Rng& rng);

std::array<Weather, 3> forecast_weather(const AnnualCurves& curves, const BaselineParams& params, int t,
                                        Rng& rng);
std::array<Triple, 5> forecast_price(const AnnualCurves& curves, const BaselineParams& params, int t,
                                     Rng& rng);

// Expected inflow for days t+1..t+3: interest on current cash plus any
// queued milestone payment, predicted to land three days after application.
Triple forecast_cash_inflow(int t, double cash, double interest_rate,
                            const std::vector<PendingPayment>& queue);

std::string curves_csv(const AnnualCurves& curves);

std::vector<std::string> validate(const BaselineParams& params);

}  // namespace flowctl
