#include "wsattack/opll.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace wsa {

namespace {

bool finite(double x) { return std::isfinite(x); }

// 53-bit uniform in [0, 1), portable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class DrivePhase { base, high, low };

}  // namespace

Diagnostics check(const OpllConfig& c) {
  Diagnostics d;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) d.push_back("opll: " + msg);
  };
  need(finite(c.het_center_mhz) && c.het_center_mhz > 0, "het_center must be > 0");
  need(finite(c.lock_bandwidth_mhz) && c.lock_bandwidth_mhz > 0, "lock_bandwidth must be > 0");
  need(finite(c.lock_time_us) && c.lock_time_us >= 0, "lock_time must be >= 0");
  need(finite(c.flc_response_min_us) && c.flc_response_min_us > 0, "flc_response_min must be > 0");
  need(finite(c.flc_response_max_us) && c.flc_response_min_us <= c.flc_response_max_us,
       "flc_response_min must be <= flc_response_max");
  need(finite(c.pzt_handoff_rate_mhz_per_ms) && c.pzt_handoff_rate_mhz_per_ms >= 0,
       "pzt_handoff_rate must be >= 0");
  need(finite(c.pzt_holdoff_us) && c.pzt_holdoff_us >= 0, "pzt_holdoff must be >= 0");
  need(finite(c.aom_center_mhz) && c.aom_center_mhz > 0, "aom_center_freq must be > 0");
  need(finite(c.min_beat_power_dbm), "min_beat_power_dbm must be finite");
  need(finite(c.beat_power_dbm), "beat_power_dbm must be finite");
  need(finite(c.timestep_us) && c.timestep_us > 0 && c.timestep_us <= c.flc_response_min_us / 2,
       "timestep must be > 0 and <= flc_response_min/2");
  need(c.fast_switch_success_probability >= 0 && c.fast_switch_success_probability <= 1,
       "fast_switch_success_probability must be in [0, 1]");
  need(finite(c.voltage_relax_us) && c.voltage_relax_us >= 0, "voltage_relax must be >= 0");
  need(finite(c.spectrum_resolution_mhz) && c.spectrum_resolution_mhz > 0, "spectrum_resolution must be > 0");
  return d;
}

OpllTrace run_opll(const OpllConfig& config, const AttackConfig& attack, const AomModel& aom,
                   const GainTable& gains, const OpllRunOptions& options) {
  validate(config);
  {
    // The lock limit is deliberately not enforced here: shifts beyond the
    // bandwidth are simulated and appear as unlock.
    Diagnostics d;
    if (!(attack.switch_rate_khz > 0) || !finite(attack.switch_rate_khz)) d.push_back("attack: r_s must be > 0");
    if (!finite(attack.f_aom1_mhz) || !finite(attack.f_aom2_mhz)) d.push_back("attack: frequencies must be finite");
    if (!d.empty()) throw InvalidParameter(d);
  }
  if (!(options.duration_us > 0) || !finite(options.duration_us))
    throw std::invalid_argument("run_opll: duration must be > 0");

  const double dt = config.timestep_us;
  const double dwell = attack.dwell_us();
  const double shift = attack.shift();
  const double f_delta = std::abs(shift);
  const bool attacking = f_delta > 0.0;
  if (attacking && !options.attack_halt_us && options.duration_us < 4.0 * dwell)
    throw std::invalid_argument("run_opll: duration must cover at least two switching periods");

  const double center = config.aom_center_mhz;
  const double base_v = aom.drive.base_v;
  const double base_att = aom.attenuation(center, base_v).value;
  const double baseline = aom.physics.p_in_mw * std::pow(10.0, -base_att / 10.0);

  auto physics_excess = [&](double f_cmd, double v) {
    return std::pow(10.0, -(aom.attenuation(f_cmd, v).value - base_att) / 10.0) - 1.0;
  };

  // Scale that maps the model's two-phase excess onto the measured gain.
  double scale = 1.0;
  if (config.power_model == OpllPowerModel::measured_gain && attacking && f_delta <= gains.max_f_delta()) {
    const double h = physics_excess(center + shift, aom.drive.high(f_delta));
    const double l = physics_excess(center, aom.drive.low(f_delta));
    if (h + l > 0.0) scale = 2.0 * gains(f_delta) / (h + l);
  }

  const bool fast_regime = dwell < config.flc_response_max_us;
  const bool beat_visible = config.beat_power_dbm >= config.min_beat_power_dbm;
  const auto n = static_cast<std::size_t>(std::llround(options.duration_us / dt));
  const double handoff_step = config.pzt_handoff_rate_mhz_per_ms / 1000.0 * dt;

  std::mt19937_64 rng(options.seed);

  OpllTrace trace;
  trace.timestep_us = dt;
  trace.aom_center_mhz = center;
  trace.beat_power_dbm = config.beat_power_dbm;
  trace.baseline_power_mw = baseline;
  trace.samples.reserve(n);

  double aom_cmd = center;
  double pzt = 0.0;
  bool locked = beat_visible;
  double out_of_band_since = -1.0;
  double in_band_since = -1.0;
  bool pending = false;
  double pending_due = 0.0;
  double last_cmd_t = -std::numeric_limits<double>::infinity();
  double detune = 0.0;
  long long last_period = 0;
  DrivePhase phase = DrivePhase::base;
  double phase_shift = 0.0;
  double low_since = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;

    // Reference toggles at every dwell boundary unless the attack has stopped.
    if (attacking) {
      const double t_ref = options.attack_halt_us ? std::min(t, *options.attack_halt_us) : t;
      const auto period = static_cast<long long>(std::floor(t_ref / dwell + 1e-9));
      if (period != last_period) {
        last_period = period;
        detune = (period % 2 != 0) ? shift : 0.0;
        const double u = uniform01(rng);
        const double delay =
            config.flc_response_min_us + u * (config.flc_response_max_us - config.flc_response_min_us);
        if (!fast_regime) {
          pending = true;
          pending_due = t + delay;
        } else if (uniform01(rng) < config.fast_switch_success_probability) {
          pending = true;
          pending_due = t + std::max(config.lock_time_us, u * dwell / 2.0);
        } else {
          pending = false;
        }
      }
    }

    // The heterodyne compares the laser itself (tuned by the PZT) with the
    // reference; the AOM sits after the tap and only corrects the output.
    const double deviation = detune - pzt;
    const double beat_mhz = config.het_center_mhz - deviation;
    const bool in_band = beat_visible && std::abs(deviation) <= config.lock_bandwidth_mhz;
    if (in_band) {
      out_of_band_since = -1.0;
      if (in_band_since < 0) in_band_since = t;
      if (!locked && t - in_band_since >= config.lock_time_us) locked = true;
    } else {
      in_band_since = -1.0;
      if (out_of_band_since < 0) out_of_band_since = t;
      if (locked && t - out_of_band_since >= config.lock_time_us) locked = false;
    }

    if (pending && t >= pending_due && locked) {
      aom_cmd = center + deviation;
      last_cmd_t = t;
      pending = false;
    }

    // Slow hand-off from the AOM to the PZT once the fast path has been idle.
    if (locked && !pending && t - last_cmd_t >= config.pzt_holdoff_us && aom_cmd != center) {
      const double offset = aom_cmd - center;
      const double step = std::min(std::abs(offset), handoff_step);
      const double moved = offset > 0 ? step : -step;
      aom_cmd -= moved;
      pzt += moved;
      if (std::abs(aom_cmd - center) < 1e-12) aom_cmd = center;
    }

    const double offset = std::abs(aom_cmd - center);
    if (offset > 0.0) {
      phase = DrivePhase::high;
      phase_shift = offset;
    } else if (phase == DrivePhase::high) {
      phase = DrivePhase::low;
      low_since = t;
    } else if (phase == DrivePhase::low && t - low_since >= config.voltage_relax_us) {
      phase = DrivePhase::base;
    }
    double v = base_v;
    if (phase == DrivePhase::high) v = aom.drive.high(phase_shift);
    if (phase == DrivePhase::low) v = aom.drive.low(phase_shift);

    double power = baseline;
    if (phase != DrivePhase::base || offset > 0.0) {
      const double excess = physics_excess(aom_cmd, v);
      power = baseline * (1.0 + (config.power_model == OpllPowerModel::measured_gain ? scale : 1.0) * excess);
    }

    OpllSample s;
    s.t_us = t;
    s.locked = locked;
    s.aom_cmd_mhz = aom_cmd;
    s.pzt_mhz = pzt;
    s.power_mw = power;
    s.beat_mhz = beat_mhz;
    s.drive_v = v;
    trace.samples.push_back(s);
  }
  return trace;
}

std::vector<SpectralPeak> heterodyne_spectrum(const OpllTrace& trace, double t_start_us, double t_end_us,
                                              double resolution_mhz) {
  if (!(resolution_mhz > 0)) throw std::invalid_argument("heterodyne_spectrum: resolution must be > 0");
  if (!(t_end_us > t_start_us)) throw std::invalid_argument("heterodyne_spectrum: empty window");
  if (t_start_us < 0 || t_end_us > trace.duration_us() + 1e-9)
    throw std::invalid_argument("heterodyne_spectrum: window outside trace");

  std::map<long long, std::size_t> bins;
  std::size_t total = 0;
  for (const auto& s : trace.samples) {
    if (s.t_us < t_start_us || s.t_us >= t_end_us) continue;
    ++bins[std::llround(s.beat_mhz / resolution_mhz)];
    ++total;
  }
  if (total == 0) throw std::invalid_argument("heterodyne_spectrum: empty window");

  std::vector<SpectralPeak> peaks;
  peaks.reserve(bins.size());
  for (const auto& [key, count] : bins) {
    const double frac = static_cast<double>(count) / static_cast<double>(total);
    peaks.push_back({static_cast<double>(key) * resolution_mhz, trace.beat_power_dbm + 10.0 * std::log10(frac), frac});
  }
  return peaks;
}

double interference_stability(const OpllTrace& a, const OpllTrace& b, double tolerance_mhz) {
  if (a.samples.size() != b.samples.size())
    throw std::invalid_argument("interference_stability: traces differ in length");
  if (a.samples.empty()) throw std::invalid_argument("interference_stability: empty traces");
  std::size_t good = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    if (a.samples[i].locked && b.samples[i].locked &&
        std::abs(a.output_offset_mhz(i) - b.output_offset_mhz(i)) < tolerance_mhz)
      ++good;
  }
  return static_cast<double>(good) / static_cast<double>(a.samples.size());
}

double mean_power_excess(const OpllTrace& trace) {
  if (trace.samples.empty()) throw std::invalid_argument("mean_power_excess: empty trace");
  double sum = 0.0;
  for (const auto& s : trace.samples) sum += s.power_mw;
  return sum / static_cast<double>(trace.samples.size()) / trace.baseline_power_mw - 1.0;
}

}  // namespace wsa
