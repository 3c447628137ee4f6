#pragma once

#include <span>
#include <vector>

namespace wsa {

enum class Interpolation {
  linear,
  // Fritsch-Butland piecewise cubic Hermite: monotone on every interval,
  // no overshoot, local extrema only at knots.
  monotone_cubic,
};

/// Result of evaluating a calibration table. `clamped` is set when the query
/// fell outside the knot range and the nearest endpoint value was returned.
struct TableValue {
  double value = 0.0;
  bool clamped = false;
};

/// Piecewise interpolation over strictly increasing knots, exact at every knot.
class InterpolationTable {
 public:
  InterpolationTable(std::vector<double> x, std::vector<double> y, Interpolation kind);

  TableValue evaluate(double x) const;
  double operator()(double x) const { return evaluate(x).value; }

  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  Interpolation kind() const noexcept { return kind_; }
  double x_min() const noexcept { return x_.front(); }
  double x_max() const noexcept { return x_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;  // knot derivatives (cubic only)
  Interpolation kind_;
};

}  // namespace wsa
