#include "wsattack/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsa {

namespace {

// Shape-preserving three-point end condition (as used by PCHIP).
double end_slope(double h0, double h1, double d0, double d1) {
  double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (std::signbit(s) != std::signbit(d0) || d0 == 0.0) {
    s = 0.0;
  } else if (std::signbit(d0) != std::signbit(d1) && std::abs(s) > std::abs(3.0 * d0)) {
    s = 3.0 * d0;
  }
  return s;
}

}  // namespace

InterpolationTable::InterpolationTable(std::vector<double> x, std::vector<double> y, Interpolation kind)
    : x_(std::move(x)), y_(std::move(y)), kind_(kind) {
  if (x_.size() != y_.size()) throw std::invalid_argument("interpolation table: x/y size mismatch");
  if (x_.size() < 2) throw std::invalid_argument("interpolation table: at least 2 knots required");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
      throw std::invalid_argument("interpolation table: non-finite knot");
    if (i > 0 && !(x_[i] > x_[i - 1]))
      throw std::invalid_argument("interpolation table: knots must be strictly increasing");
  }
  if (kind_ != Interpolation::monotone_cubic) return;

  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    d[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = d[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0.0) continue;  // local extremum or flat: zero slope
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    slope_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
  }
  slope_[0] = end_slope(h[0], h[1], d[0], d[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

TableValue InterpolationTable::evaluate(double xq) const {
  if (std::isnan(xq)) throw std::invalid_argument("interpolation table: NaN query");
  if (xq <= x_.front()) return {y_.front(), xq < x_.front()};
  if (xq >= x_.back()) return {y_.back(), xq > x_.back()};

  const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[k + 1] - x_[k];
  const double t = (xq - x_[k]) / h;
  if (t == 0.0) return {y_[k], false};

  if (kind_ == Interpolation::linear) return {y_[k] + t * (y_[k + 1] - y_[k]), false};

  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return {h00 * y_[k] + h10 * h * slope_[k] + h01 * y_[k + 1] + h11 * h * slope_[k + 1], false};
}

}  // namespace wsa
