#include "flowctl/piecewise.hpp"

#include <algorithm>
#include <stdexcept>

namespace flowctl {

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size() || xs_.empty()) {
    throw std::invalid_argument("piecewise curve needs matching, non-empty breakpoint lists");
  }
}

double PiecewiseLinear::operator()(double x) const {
  if (xs_.empty()) return 1.0;
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto hi = static_cast<std::size_t>(it - xs_.begin());
  const auto lo = hi - 1;
  const double w = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
  return ys_[lo] + w * (ys_[hi] - ys_[lo]);
}

bool PiecewiseLinear::strictly_increasing_x() const {
  return std::adjacent_find(xs_.begin(), xs_.end(),
                            [](double a, double b) { return !(a < b); }) == xs_.end();
}

bool PiecewiseLinear::non_increasing_y() const {
  return std::adjacent_find(ys_.begin(), ys_.end(),
                            [](double a, double b) { return b > a; }) == ys_.end();
}

}  // namespace flowctl
