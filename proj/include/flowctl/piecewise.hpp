#pragma once

#include <vector>

namespace flowctl {

// Piecewise-linear curve through breakpoints, held constant outside the
// breakpoint range.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  bool empty() const { return xs_.empty(); }

  bool strictly_increasing_x() const;
  bool non_increasing_y() const;

  bool operator==(const PiecewiseLinear&) const = default;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

}  // namespace flowctl
