#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "flowctl/env.hpp"

namespace flowctl {

inline constexpr std::size_t kObservationSize = 59;
inline constexpr std::size_t kActionSize = 6;
// Slots [0, kDirectInputs) describe the current day; the rest are histories
// and forecasts.
inline constexpr std::size_t kDirectInputs = 17;
inline constexpr std::size_t kIndirectInputs = kObservationSize - kDirectInputs;

using Observation = std::array<double, kObservationSize>;
using ActionVector = std::array<double, kActionSize>;

struct Forecasts {
  Triple cash_inflow{};
  std::array<Weather, 3> weather{};
  std::array<Triple, 5> price{};
};

// Draws fresh forecasts for the day after `state.t` from the sampled curves.
Forecasts make_forecasts(const State& state, const AnnualCurves& curves, const BaselineParams& exogenous,
                         const ModelParams& params, Rng& rng);

// Layout: [0] t; [1-3] area; [4] cash; [5] inflow; [6] accrued wages;
// [7-9] stock; [10] formwork in use; [11-13] prices; [14-16] weather;
// [17-22] weather t-2, t-1; [23-31] hours t-3..t-1; [32-34] inflow forecast;
// [35-43] weather forecast; [44-58] price forecast.
Observation observe(const State& state, const Forecasts& forecasts);

// Running per-dimension mean and variance (Welford).
class NormStats {
 public:
  static constexpr double kStdFloor = 1e-8;

  explicit NormStats(std::size_t dim = kObservationSize);

  void update(std::span<const double> x);
  void normalize(std::span<const double> x, std::span<double> out) const;
  std::vector<double> normalized(std::span<const double> x) const;

  std::size_t dim() const { return mean_.size(); }
  double count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& m2() const { return m2_; }
  std::vector<double> stddev() const;

  // For deserialization.
  void assign(double count, std::vector<double> mean, std::vector<double> m2);

  bool operator==(const NormStats&) const = default;

 private:
  double count_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

struct ActionScale {
  ActionVector lo{};
  ActionVector hi{};
  ActionVector mid() const;
  ActionVector half() const;
};

ActionScale action_scale(const ModelParams& params);

// Maps a network-space action to engineering units: clamp to the bounds,
// hours to the nearest 0.5 h, orders to whole units.
Action denormalize_action(std::span<const double> a, const ModelParams& params);
ActionVector normalize_action(const Action& action, const ModelParams& params);

}  // namespace flowctl
