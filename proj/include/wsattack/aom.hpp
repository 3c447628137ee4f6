#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsattack/interp.hpp"
#include "wsattack/params.hpp"

namespace wsa {

/// Reported attenuation when the diffraction efficiency vanishes.
inline constexpr double kAttenuationCapDb = 60.0;

/// Physical constants of the acousto-optic modulator.
///
/// Transducer geometry, f_aom0 and Z_M are not published for the device; the
/// defaults below are a fit: geometry is set to plausible values and f_aom0 is
/// solved so that the efficiency maximum (minimum attenuation) sits at
/// 195 MHz. See fit_f_aom0().
struct AomPhysics {
  double wavelength_nm = 1550.0;
  double m2 = 34.7e-15;          // acousto-optic figure of merit, s^3/kg
  double l_pt_m = 2.0e-3;        // transducer length
  double h_pt_m = 50.0e-6;       // transducer thickness
  double f_aom0_mhz = 0.0;       // half-wavelength frequency of the piezo layer
  double z_m = 1.0;              // relative acoustic impedance
  double delta_aom_db = 3.57;    // fixed excess attenuation
  double p_in_mw = 6.22;

  static AomPhysics defaults();
};

Diagnostics check(const AomPhysics& physics);

/// Solves f_aom0 so that the first efficiency maximum falls at `peak_mhz`.
double fit_f_aom0(const AomPhysics& physics, double peak_mhz);

double ultrasonic_power(double f_aom_mhz, const AomPhysics& physics);
double diffraction_efficiency(double f_aom_mhz, const AomPhysics& physics);
/// -10 log10(eta_aom) + delta_aom, capped at kAttenuationCapDb.
double attenuation_vs_frequency(double f_aom_mhz, const AomPhysics& physics);

/// Measured attenuation at a set of knots, interpolated with a monotone
/// piecewise cubic. Used for both the drive-voltage characteristic (at a fixed
/// reference modulation frequency) and the measured frequency characteristic.
class CalibrationTable {
 public:
  CalibrationTable(std::vector<std::pair<double, double>> entries, double reference);

  TableValue attenuation(double x) const { return table_.evaluate(x); }
  std::span<const double> knots() const noexcept { return table_.x(); }
  std::span<const double> values() const noexcept { return table_.y(); }
  /// Reference frequency (MHz) for a voltage table, reference voltage (V) for a
  /// frequency table.
  double reference() const noexcept { return reference_; }

 private:
  InterpolationTable table_;
  double reference_;
};

using VoltageCalibrationTable = CalibrationTable;
using FrequencyCalibrationTable = CalibrationTable;

/// Drive-voltage table built from the four measured operating points at
/// 200 MHz: 8.68 V (+0.14 dB), 8.95 V (base), 10.56 V (-1.02 dB) and
/// 15 V (3.59 dB). The absolute base value (5.50 dB) is a fit to a sin^2
/// drive response peaking at 15 V.
VoltageCalibrationTable default_voltage_table();

/// Measured frequency characteristic around the operating point: 3.57 dB
/// minimum at 195 MHz and a 0.69 dB rise from 200 MHz to 180 MHz.
FrequencyCalibrationTable default_frequency_table();

/// Attenuation of the AOM as a function of driving voltage. Queries outside
/// the table are clamped to the endpoint and flagged.
TableValue attenuation_vs_voltage(double voltage_v, const VoltageCalibrationTable& table);

/// Voltage swings of the AOM driver during a switching cycle. Moving the
/// modulation frequency away from centre raises the driving voltage ("high"),
/// returning to centre drops it below the base level ("low"). Offsets are
/// given at a reference shift and scale linearly with the shift.
struct DriveVoltageResponse {
  double base_v = 8.95;
  double high_offset_v = 10.56 - 8.95;
  double low_offset_v = 8.68 - 8.95;
  double reference_shift_mhz = 20.0;

  double high(double shift_mhz) const;
  double low(double shift_mhz) const;
  DriveVoltageResponse rebased(double new_base_v) const {
    DriveVoltageResponse r = *this;
    r.base_v = new_base_v;
    return r;
  }
};

/// Full device model: analytic physics, voltage table and, when available, a
/// measured frequency table that takes precedence over the analytic curve.
struct AomModel {
  AomPhysics physics = AomPhysics::defaults();
  VoltageCalibrationTable voltage = default_voltage_table();
  std::optional<FrequencyCalibrationTable> measured_frequency = default_frequency_table();
  DriveVoltageResponse drive;
  double center_frequency_mhz = 200.0;

  /// Frequency-only attenuation (measured if available, else analytic).
  TableValue frequency_attenuation(double f_aom_mhz) const;
  /// Separable (f, V) model: voltage table value plus the frequency
  /// characteristic relative to the voltage table's reference frequency.
  TableValue attenuation(double f_aom_mhz, double voltage_v) const;
};

/// Change in attenuation (dB) when the modulation frequency moves from
/// f_center to f_center - f_delta and the drive voltage from v_before to
/// v_after. Negative values mean less loss, i.e. a brighter source.
/// This overload uses the analytic frequency curve.
double combined_attenuation_delta(double f_delta_mhz, double v_before, double v_after,
                                  const AomPhysics& physics, const VoltageCalibrationTable& table,
                                  double f_center_mhz = 200.0);

/// Same, using the device model's frequency characteristic. `shift_sign`
/// selects f_center - f_delta (-1) or f_center + f_delta (+1).
double combined_attenuation_delta(double f_delta_mhz, double v_before, double v_after,
                                  const AomModel& model, double f_center_mhz, int shift_sign = -1);

struct CalibrationResult {
  double voltage_v = 0.0;
  double frequency_mhz = 0.0;
  double attenuation_db = 0.0;
};

/// Two-step loss-minimising calibration: scan voltage at the table's
/// reference frequency, then scan frequency at the chosen voltage. Ties go to
/// the lower voltage/frequency. Throws std::invalid_argument on empty grids.
CalibrationResult calibrate(const AomModel& model, std::span<const double> v_grid,
                            std::span<const double> f_grid);

/// Calibration against the analytic frequency curve only.
CalibrationResult calibrate(const AomPhysics& physics, const VoltageCalibrationTable& table,
                            std::span<const double> v_grid, std::span<const double> f_grid);

/// Builds an AOM model whose operating point is the calibration result.
AomModel calibrated(const AomModel& model, const CalibrationResult& cal);

}  // namespace wsa
