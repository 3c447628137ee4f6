#pragma once

#include <span>
#include <vector>

#include "wsattack/keyrate_report.hpp"
#include "wsattack/params.hpp"

namespace wsa {

// Source roles in the sending-or-not-sending analysis. The configured
// intensities are mapped as: weak decoy = mu2, strong decoy = mu1,
// signal (sent in the Z window) = mu0. Index j is Alice, k is Bob; 0 means
// vacuum / not sending, 1 the weak decoy, 2 the strong decoy, z the signal.

/// Counting rates (probability of an effective event per pulse pair).
struct SnsCountingRates {
  double s00 = 0.0;
  double s01 = 0.0;
  double s10 = 0.0;
  double s02 = 0.0;
  double s20 = 0.0;
  // Signal-window rates used for n_t and E_z.
  double s0z = 0.0;
  double sz0 = 0.0;
  double szz = 0.0;
  double t_delta = 0.0;  // effective error rate with both parties at the weak decoy
};

struct SnsKeyQuantities {
  double s1_l = 0.0;
  double e1_u = 0.0;
  double n1 = 0.0;
  double n_t = 0.0;
  double e_z = 0.0;
};

using SnsKeyRate = KeyRateEntry<SnsKeyQuantities>;

/// Poissonian symmetric channel: S_jk = 1 - (1-p_d)^2 exp(-eta (mu'_j + mu'_k))
/// with mu' = g mu and eta the single-arm transmittance. T_delta is the
/// probability that only the wrong detector fires when both parties send the
/// weak decoy with matched phase (misalignment e_opt), unless
/// protocol.t_delta overrides it.
SnsCountingRates simulate_counting_rates(const SystemParams& params, double g);

/// Lower bound on the untagged single-photon counting rate from vacuum and
/// two decoys (weak < strong), floored at 0. Throws std::invalid_argument
/// unless 0 < weak < strong.
double untagged_rate_bound(const SnsCountingRates& rates, double mu_weak, double mu_strong);

/// Convenience overload using the configured intensity mapping.
double untagged_rate_bound(const SnsCountingRates& rates, const IntensitySettings& mu);

/// Upper bound on the phase-flip rate of untagged bits, clamped to [0, 0.5].
/// Throws std::domain_error when s1_l <= 0.
double phase_flip_bound(const SnsCountingRates& rates, double mu_weak, double s1_l);

/// Finite-size SNS-TF-QKD rate (1/N){n1[1-H(e1)] - f n_t H(E_z)} - gamma with
/// dual estimated/true evaluation.
SnsKeyRate sns_key_rate(const SystemParams& params, double g);

std::vector<SnsKeyRate> sns_distance_sweep(const SystemParams& params, double g, std::span<const double> lengths_km);

}  // namespace wsa
