#pragma once

#include <array>
#include <span>
#include <vector>

#include "wsattack/keyrate_report.hpp"
#include "wsattack/params.hpp"

namespace wsa {

/// Decoy-state quantities of one TF QKD analysis. Index 0 is the signal
/// intensity, 1 and 2 the decoys.
struct TfDecoyQuantities {
  std::array<double, 3> q_mu{};  // observed gains
  std::array<double, 3> e_mu{};  // observed QBERs
  double y0_l = 0.0;
  double y1_l = 0.0;
  double q1_l = 0.0;
  double e1_u = 0.0;
  double e_m = 0.0;
};

using TfKeyRate = KeyRateEntry<TfDecoyQuantities>;

/// Overall gain 1 - (1 - p_d)^2 exp(-eta mu).
double gain_q(double mu, double eta, double p_dark);

/// Intrinsic error of phase post-selection with M slices.
double phase_slice_error(int m_slices);

/// Observed QBER for total intensity mu. Throws std::domain_error when the
/// gain is zero.
double qber_e(double mu, double eta, double p_dark, double e_opt, int m_slices);

struct DecoyBounds {
  double y0_l = 0.0;
  double y1_l = 0.0;
  double q1_l = 0.0;
  double e1_u = 0.0;
  bool clamped = false;
};

/// Vacuum + weak decoy bounds on Y0, Y1, Q1 and the phase error e1 using the
/// intensities `mu` as the assumed source intensities.
/// Throws std::invalid_argument when mu1 <= mu2 or mu0 <= mu1 + mu2 and
/// InfeasibleBound when Y1_L <= 0.
DecoyBounds decoy_bounds(std::span<const double, 3> q, std::span<const double, 3> e, const IntensitySettings& mu);

/// Asymptotic TF QKD rate with dual evaluation: detector statistics are
/// generated with the attacked intensities g*mu; the estimated rate analyses
/// them with the nominal intensities, the true rate with g*mu.
TfKeyRate tf_key_rate(const SystemParams& params, double g);

std::vector<TfKeyRate> tf_distance_sweep(const SystemParams& params, double g, std::span<const double> lengths_km);

/// Repeaterless secret-key capacity -log2(1 - eta).
double plob_bound(double eta_total);

/// Whole-link transmittance (including detectors) used for the PLOB reference.
double link_transmittance(const ChannelParams& channel);

}  // namespace wsa
