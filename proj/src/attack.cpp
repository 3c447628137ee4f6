#include "wsattack/attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wsa {

double AttackConfig::f_delta() const { return std::abs(f_aom1_mhz - f_aom2_mhz); }

AttackConfig AttackConfig::from_delta(double f_delta_mhz, double switch_rate_khz, double f_aom1_mhz) {
  return {f_aom1_mhz, f_aom1_mhz - f_delta_mhz, switch_rate_khz};
}

Diagnostics check(const AttackConfig& a) {
  Diagnostics d;
  if (!std::isfinite(a.f_aom1_mhz) || !std::isfinite(a.f_aom2_mhz) || a.f_aom1_mhz < 0 || a.f_aom2_mhz < 0)
    d.emplace_back("attack: f_aom1/f_aom2 must be finite and >= 0");
  if (!(a.switch_rate_khz > 0) || !std::isfinite(a.switch_rate_khz))
    d.emplace_back("attack: switch_rate_khz must be > 0");
  if (a.f_delta() > kLockLimitMhz)
    d.emplace_back("attack: f_delta " + std::to_string(a.f_delta()) + " MHz exceeds the 30 MHz lock limit");
  return d;
}

namespace {

std::vector<std::pair<double, double>> with_origin(std::vector<std::pair<double, double>> pts) {
  if (pts.empty() || pts.front().first != 0.0) pts.insert(pts.begin(), {0.0, 0.0});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].second >= 0)) throw std::invalid_argument("gain table: gains must be >= 0");
    if (i > 0 && !(pts[i].first > pts[i - 1].first))
      throw std::invalid_argument("gain table: f_delta must be strictly increasing");
    if (i > 0 && pts[i].second < pts[i - 1].second)
      throw std::invalid_argument("gain table: gains must be non-decreasing");
  }
  if (pts.front().second != 0.0) throw std::invalid_argument("gain table: gain at f_delta = 0 must be 0");
  return pts;
}

InterpolationTable linear_table(const std::vector<std::pair<double, double>>& pts) {
  std::vector<double> x, y;
  for (const auto& [f, g] : pts) {
    x.push_back(f);
    y.push_back(g);
  }
  return InterpolationTable(std::move(x), std::move(y), Interpolation::linear);
}

}  // namespace

GainTable::GainTable(std::vector<std::pair<double, double>> points)
    : points_(with_origin(std::move(points))), table_(linear_table(points_)) {}

GainTable GainTable::measured() {
  return GainTable({{1.0, 0.0086}, {3.0, 0.0163}, {9.0, 0.0319}, {20.0, 0.0404}, {30.0, 0.0435}});
}

double per_station_gain(double f_delta_mhz, const GainTable& table) {
  if (!(f_delta_mhz >= 0)) throw std::invalid_argument("per_station_gain: f_delta must be >= 0");
  if (f_delta_mhz > kLockLimitMhz)
    throw std::out_of_range("per_station_gain: f_delta above 30 MHz, the OPLL no longer locks");
  if (f_delta_mhz > table.max_f_delta()) throw std::out_of_range("per_station_gain: f_delta beyond gain table");
  return table(f_delta_mhz);
}

double system_gain_factor(double f_delta_alice_mhz, double f_delta_bob_mhz, const GainTable& table) {
  const double ga = per_station_gain(f_delta_alice_mhz, table);
  const double gb = per_station_gain(f_delta_bob_mhz, table);
  return 1.0 + (ga + gb);
}

double gain_from_attenuation_delta(double delta_db) { return std::pow(10.0, -delta_db / 10.0) - 1.0; }

double gain_from_physics(double f_delta_mhz, const AomModel& model) {
  const double v0 = model.drive.base_v;
  const double delta = combined_attenuation_delta(f_delta_mhz, v0, model.drive.high(f_delta_mhz), model,
                                                  model.center_frequency_mhz, -1);
  return gain_from_attenuation_delta(delta);
}

double gain_from_physics(double f_delta_mhz, const AomPhysics& physics, const VoltageCalibrationTable& table) {
  AomModel model{physics, table, std::nullopt, {}, table.reference()};
  return gain_from_physics(f_delta_mhz, model);
}

}  // namespace wsa
