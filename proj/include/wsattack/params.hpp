#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsa {

// Unit conventions used throughout the library:
//   distances km, fiber attenuation dB/km, frequencies MHz, time us,
//   optical power mW, device attenuation dB.

/// Raised when a parameter set violates one of its invariants. The message
/// lists every violated invariant, one per line.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::vector<std::string>& diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

using Diagnostics = std::vector<std::string>;

/// Per-pulse mean photon numbers. mu0 is the signal intensity, mu1 and mu2
/// the decoys.
struct IntensitySettings {
  double mu0 = 0.4;
  double mu1 = 1e-2;
  double mu2 = 1e-4;

  IntensitySettings scaled(double g) const { return {g * mu0, g * mu1, g * mu2}; }
};

struct ChannelParams {
  double alpha_db_per_km = 0.2;
  double length_km = 0.0;  // total Alice-Bob distance
  double eta_det = 0.3;
  double p_dark = 1e-8;    // per gate; not stated for the TF setup, kept configurable
  double e_opt = 0.03;
};

struct ProtocolParams {
  double duty_cycle_d = 0.5;
  int phase_slices_m = 16;
  double f_ec = 1.16;
  double n_total = 5.4e14;
  double gamma = 0.0;
  // Effective detector rate for the SNS phase-flip bound. When unset the
  // SNS module derives it from the channel model.
  std::optional<double> t_delta;
};

/// Model knobs for the sending-or-not-sending evaluation that are not fixed
/// by the protocol itself.
struct SnsModelParams {
  double send_probability = 0.04;  // probability a party sends in the signal window
  bool aopp = false;               // reserved; odd-parity pairing is not implemented
};

struct SystemParams {
  IntensitySettings intensities;
  ChannelParams channel;
  ProtocolParams protocol;
  SnsModelParams sns;

  SystemParams with_length(double length_km) const {
    SystemParams p = *this;
    p.channel.length_km = length_km;
    return p;
  }

  /// Parameters of the TF QKD evaluation (0.2 dB/km fiber, 30 % detectors).
  static SystemParams tf_defaults();
  /// Parameters of the SNS-TF-QKD evaluation (N = 5.4e14, P_d = 1.4e-11,
  /// 0.157 dB/km, 60 % detectors).
  static SystemParams sns_defaults();
};

Diagnostics check(const IntensitySettings& mu);
Diagnostics check(const ChannelParams& channel);
Diagnostics check(const ProtocolParams& protocol);
Diagnostics check(const SnsModelParams& sns);
Diagnostics check(const SystemParams& params);

template <class T>
void validate(const T& value) {
  if (auto diags = check(value); !diags.empty()) throw InvalidParameter(diags);
}

/// H2(x) in bits. Throws std::domain_error outside [0, 1].
double binary_entropy(double x);

/// Transmittance of one arm (L/2) including detector efficiency.
double single_arm_transmittance(const ChannelParams& channel);

}  // namespace wsa
