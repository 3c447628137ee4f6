#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wsattack/aom.hpp"
#include "wsattack/attack.hpp"
#include "wsattack/params.hpp"

namespace wsa {

enum class OpllPowerModel {
  // AOM model gives the within-cycle profile; its cycle-average excess is
  // rescaled to the measured station gain at the attack's f_delta.
  measured_gain,
  // Raw AOM model output power.
  aom_physics,
};

struct OpllConfig {
  double het_center_mhz = 112.0;
  double lock_bandwidth_mhz = 30.0;       // half-width around het_center
  double lock_time_us = 0.2;
  double flc_response_min_us = 3.0;
  double flc_response_max_us = 10.0;
  double pzt_handoff_rate_mhz_per_ms = 1000.0;
  double pzt_holdoff_us = 20.0;           // AOM command must be idle this long before hand-off starts
  double aom_center_mhz = 200.0;
  double min_beat_power_dbm = -30.0;
  double beat_power_dbm = -9.14;
  double timestep_us = 0.05;
  // Above r_s = 1/flc_response_max each switch command is delivered with
  // this probability, at a uniform time within the first half of the dwell.
  double fast_switch_success_probability = 0.5;
  double voltage_relax_us = 50.0;         // time the driver stays on the low level after returning
  double spectrum_resolution_mhz = 0.5;
  OpllPowerModel power_model = OpllPowerModel::measured_gain;
};

Diagnostics check(const OpllConfig& config);

struct OpllSample {
  double t_us = 0.0;
  bool locked = true;
  double aom_cmd_mhz = 0.0;
  double pzt_mhz = 0.0;
  double power_mw = 0.0;
  double beat_mhz = 0.0;  // laser vs reference, measured ahead of the AOM
  double drive_v = 0.0;
};

struct OpllTrace {
  double timestep_us = 0.0;
  double aom_center_mhz = 0.0;
  double beat_power_dbm = 0.0;
  double baseline_power_mw = 0.0;  // output power with the loop idle at the centre frequency
  std::vector<OpllSample> samples;

  /// Output optical frequency offset of the station relative to its idle state.
  double output_offset_mhz(std::size_t i) const {
    return samples[i].aom_cmd_mhz - aom_center_mhz + samples[i].pzt_mhz;
  }
  double duration_us() const { return timestep_us * static_cast<double>(samples.size()); }
};

struct OpllRunOptions {
  double duration_us = 1000.0;
  std::uint64_t seed = 1;
  std::optional<double> attack_halt_us;  // reference stops switching from this time on
};

/// Fixed-step simulation of one station's OPLL while the reference toggles
/// between f_aom1 and f_aom2 every 1/r_s. Shifts beyond the lock bandwidth are
/// accepted and show up as unlocked samples.
OpllTrace run_opll(const OpllConfig& config, const AttackConfig& attack, const AomModel& aom,
                   const GainTable& gains, const OpllRunOptions& options);

struct SpectralPeak {
  double frequency_mhz = 0.0;
  double power_dbm = 0.0;
  double occupancy = 0.0;
};

/// Distinct beat frequencies occupied in [t_start, t_end), binned at
/// `resolution_mhz`, each carrying the beat power times its occupancy.
/// Sorted by frequency. Throws std::invalid_argument for an empty window or
/// a window outside the trace.
std::vector<SpectralPeak> heterodyne_spectrum(const OpllTrace& trace, double t_start_us, double t_end_us,
                                              double resolution_mhz = 0.5);

/// Fraction of timesteps where both loops are locked and their output
/// offsets agree within `tolerance_mhz`. Throws on length mismatch.
double interference_stability(const OpllTrace& a, const OpllTrace& b, double tolerance_mhz = 1.0);

/// Mean output power over the trace divided by the idle baseline, minus one.
double mean_power_excess(const OpllTrace& trace);

}  // namespace wsa
