#include "wsattack/aom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wsa {

namespace {

// sqrt(M2 L / (2 H Z)) * pi / lambda, i.e. the diffraction phase per unit
// relative frequency F = f / f0.
double phase_per_relative_frequency(const AomPhysics& p) {
  const double lambda_m = p.wavelength_nm * 1e-9;
  return std::numbers::pi / lambda_m * std::sqrt(p.m2 * p.l_pt_m / (2.0 * p.h_pt_m * p.z_m));
}

double argmin_scan(std::span<const double> grid, auto&& loss) {
  double best_x = grid.front();
  double best = loss(best_x);
  for (double x : grid.subspan(1)) {
    const double v = loss(x);
    if (v < best || (v == best && x < best_x)) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace

AomPhysics AomPhysics::defaults() {
  AomPhysics p;
  p.f_aom0_mhz = fit_f_aom0(p, 195.0);
  return p;
}

Diagnostics check(const AomPhysics& p) {
  Diagnostics d;
  auto positive = [&d](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) d.push_back(std::string("aom: ") + name + " must be > 0");
  };
  positive(p.wavelength_nm, "wavelength_nm");
  positive(p.m2, "m2");
  positive(p.l_pt_m, "l_pt_m");
  positive(p.h_pt_m, "h_pt_m");
  positive(p.f_aom0_mhz, "f_aom0_mhz");
  positive(p.z_m, "z_m");
  positive(p.p_in_mw, "p_in_mw");
  if (!(p.delta_aom_db >= 0) || !std::isfinite(p.delta_aom_db)) d.emplace_back("aom: delta_aom_db must be >= 0");
  return d;
}

double fit_f_aom0(const AomPhysics& physics, double peak_mhz) {
  if (!(peak_mhz > 0)) throw std::invalid_argument("fit_f_aom0: peak frequency must be > 0");
  AomPhysics p = physics;
  p.f_aom0_mhz = 1.0;  // placeholder so check() only inspects the other fields
  validate(p);
  return peak_mhz * phase_per_relative_frequency(p) / (std::numbers::pi / 2.0);
}

double ultrasonic_power(double f_aom_mhz, const AomPhysics& physics) {
  validate(physics);
  if (!(f_aom_mhz >= 0)) throw std::invalid_argument("ultrasonic_power: frequency must be >= 0");
  const double rel = f_aom_mhz / physics.f_aom0_mhz;
  return rel * rel / physics.z_m;
}

double diffraction_efficiency(double f_aom_mhz, const AomPhysics& physics) {
  const double pa = ultrasonic_power(f_aom_mhz, physics);
  const double lambda_m = physics.wavelength_nm * 1e-9;
  const double arg = std::numbers::pi / lambda_m *
                     std::sqrt(physics.m2 * physics.l_pt_m * pa / (2.0 * physics.h_pt_m));
  const double s = std::sin(arg);
  return std::min(1.0, s * s);
}

double attenuation_vs_frequency(double f_aom_mhz, const AomPhysics& physics) {
  const double eta = diffraction_efficiency(f_aom_mhz, physics);
  if (eta <= 0.0) return kAttenuationCapDb;
  return std::min(kAttenuationCapDb, -10.0 * std::log10(eta) + physics.delta_aom_db);
}

namespace {

InterpolationTable make_table(const std::vector<std::pair<double, double>>& entries) {
  std::vector<double> x, y;
  x.reserve(entries.size());
  y.reserve(entries.size());
  for (const auto& [k, v] : entries) {
    if (!(v >= 0)) throw std::invalid_argument("calibration table: attenuation must be >= 0");
    x.push_back(k);
    y.push_back(v);
  }
  return InterpolationTable(std::move(x), std::move(y), Interpolation::monotone_cubic);
}

}  // namespace

CalibrationTable::CalibrationTable(std::vector<std::pair<double, double>> entries, double reference)
    : table_(make_table(entries)), reference_(reference) {}

VoltageCalibrationTable default_voltage_table() {
  constexpr double base = 5.50;
  return VoltageCalibrationTable({{8.68, base + 0.14}, {8.95, base}, {10.56, base - 1.02}, {15.0, 3.59}}, 200.0);
}

FrequencyCalibrationTable default_frequency_table() {
  return FrequencyCalibrationTable({{180.0, 3.58 + 0.69}, {195.0, 3.57}, {200.0, 3.58}}, 15.84);
}

TableValue attenuation_vs_voltage(double voltage_v, const VoltageCalibrationTable& table) {
  return table.attenuation(voltage_v);
}

double DriveVoltageResponse::high(double shift_mhz) const {
  return base_v + high_offset_v * std::abs(shift_mhz) / reference_shift_mhz;
}

double DriveVoltageResponse::low(double shift_mhz) const {
  return base_v + low_offset_v * std::abs(shift_mhz) / reference_shift_mhz;
}

TableValue AomModel::frequency_attenuation(double f_aom_mhz) const {
  if (measured_frequency) return measured_frequency->attenuation(f_aom_mhz);
  return {attenuation_vs_frequency(f_aom_mhz, physics), false};
}

TableValue AomModel::attenuation(double f_aom_mhz, double voltage_v) const {
  const TableValue v = voltage.attenuation(voltage_v);
  const TableValue f = frequency_attenuation(f_aom_mhz);
  const TableValue f_ref = frequency_attenuation(voltage.reference());
  return {std::max(0.0, v.value + f.value - f_ref.value), v.clamped || f.clamped};
}

double combined_attenuation_delta(double f_delta_mhz, double v_before, double v_after,
                                  const AomPhysics& physics, const VoltageCalibrationTable& table,
                                  double f_center_mhz) {
  AomModel model{physics, table, std::nullopt, {}, f_center_mhz};
  return combined_attenuation_delta(f_delta_mhz, v_before, v_after, model, f_center_mhz, -1);
}

double combined_attenuation_delta(double f_delta_mhz, double v_before, double v_after,
                                  const AomModel& model, double f_center_mhz, int shift_sign) {
  if (!(f_delta_mhz >= 0)) throw std::invalid_argument("combined_attenuation_delta: f_delta must be >= 0");
  const double shifted = f_center_mhz + (shift_sign < 0 ? -f_delta_mhz : f_delta_mhz);
  if (shifted < 0) throw std::invalid_argument("combined_attenuation_delta: shifted frequency below 0");
  const double freq_part =
      model.frequency_attenuation(shifted).value - model.frequency_attenuation(f_center_mhz).value;
  const double volt_part = model.voltage.attenuation(v_after).value - model.voltage.attenuation(v_before).value;
  return freq_part + volt_part;
}

CalibrationResult calibrate(const AomModel& model, std::span<const double> v_grid,
                            std::span<const double> f_grid) {
  if (v_grid.empty() || f_grid.empty()) throw std::invalid_argument("calibrate: empty scan grid");
  CalibrationResult r;
  r.voltage_v = argmin_scan(v_grid, [&](double v) { return model.voltage.attenuation(v).value; });
  r.frequency_mhz = argmin_scan(f_grid, [&](double f) { return model.attenuation(f, r.voltage_v).value; });
  r.attenuation_db = model.attenuation(r.frequency_mhz, r.voltage_v).value;
  return r;
}

CalibrationResult calibrate(const AomPhysics& physics, const VoltageCalibrationTable& table,
                            std::span<const double> v_grid, std::span<const double> f_grid) {
  return calibrate(AomModel{physics, table, std::nullopt, {}, table.reference()}, v_grid, f_grid);
}

AomModel calibrated(const AomModel& model, const CalibrationResult& cal) {
  AomModel m = model;
  m.center_frequency_mhz = cal.frequency_mhz;
  m.drive = model.drive.rebased(cal.voltage_v);
  return m;
}

}  // namespace wsa
