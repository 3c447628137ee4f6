#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wsattack/aom.hpp"
#include "wsattack/interp.hpp"
#include "wsattack/params.hpp"

namespace wsa {

/// Largest frequency shift the OPLL stays locked under.
inline constexpr double kLockLimitMhz = 30.0;

/// Attacker knobs: the two frequencies of the switching AOM and the
/// switching rate.
struct AttackConfig {
  double f_aom1_mhz = 200.0;
  double f_aom2_mhz = 170.0;
  double switch_rate_khz = 100.0;

  double f_delta() const;
  /// Signed shift of the reference while it sits at f_aom2.
  double shift() const { return f_aom2_mhz - f_aom1_mhz; }
  /// Time spent at each frequency before switching (us).
  double dwell_us() const { return 1000.0 / switch_rate_khz; }

  static AttackConfig from_delta(double f_delta_mhz, double switch_rate_khz, double f_aom1_mhz = 200.0);
};

/// Checks structural invariants plus the lock limit.
Diagnostics check(const AttackConfig& attack);

/// Measured per-station mean-photon-number gain versus f_delta, linear
/// between knots. The origin (0, 0) is always present.
class GainTable {
 public:
  explicit GainTable(std::vector<std::pair<double, double>> points);

  /// Station gains measured at 1, 3, 9, 20 and 30 MHz.
  static GainTable measured();

  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }
  double operator()(double f_delta_mhz) const { return table_(f_delta_mhz); }
  double max_f_delta() const noexcept { return points_.back().first; }

 private:
  std::vector<std::pair<double, double>> points_;
  InterpolationTable table_;
};

/// Station gain G at f_delta. Throws std::out_of_range above the lock limit
/// (or above the last knot) and std::invalid_argument for negative shifts.
double per_station_gain(double f_delta_mhz, const GainTable& table);

/// g = 1 + G_alice + G_bob.
double system_gain_factor(double f_delta_alice_mhz, double f_delta_bob_mhz, const GainTable& table);

/// Linear power gain of a device whose attenuation changes by delta_db.
double gain_from_attenuation_delta(double delta_db);

/// Gain at the AOM output predicted by the device model: frequency moves from
/// the centre to centre - f_delta while the driver settles on its high
/// voltage. Reported next to the measured station gain, not reconciled with it.
double gain_from_physics(double f_delta_mhz, const AomModel& model);

/// Same with the analytic frequency curve and the default drive response.
double gain_from_physics(double f_delta_mhz, const AomPhysics& physics, const VoltageCalibrationTable& table);

}  // namespace wsa
