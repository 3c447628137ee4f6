#include "wsattack/keyrate_sns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsa {

namespace {

double counting_rate(double mu_total, double eta, double p_dark) {
  return -std::expm1(2.0 * std::log1p(-p_dark) - eta * mu_total);
}

}  // namespace

SnsCountingRates simulate_counting_rates(const SystemParams& params, double g) {
  validate(params.intensities);
  validate(params.channel);
  if (!(g >= 1.0) || !std::isfinite(g)) throw std::invalid_argument("simulate_counting_rates: g must be >= 1");

  const double eta = single_arm_transmittance(params.channel);
  const double pd = params.channel.p_dark;
  const IntensitySettings actual = params.intensities.scaled(g);
  const double weak = actual.mu2, strong = actual.mu1, signal = actual.mu0;

  SnsCountingRates r;
  r.s00 = counting_rate(0.0, eta, pd);
  r.s01 = r.s10 = counting_rate(weak, eta, pd);
  r.s02 = r.s20 = counting_rate(strong, eta, pd);
  r.s0z = r.sz0 = counting_rate(signal, eta, pd);
  r.szz = counting_rate(2.0 * signal, eta, pd);

  if (params.protocol.t_delta) {
    r.t_delta = *params.protocol.t_delta;
  } else {
    const double e = params.channel.e_opt;
    const double right = 2.0 * weak * eta * (1.0 - e);
    const double wrong = 2.0 * weak * eta * e;
    // right detector silent, wrong detector clicks
    r.t_delta = (1.0 - pd) * std::exp(-right) * -std::expm1(std::log1p(-pd) - wrong);
  }
  return r;
}

double untagged_rate_bound(const SnsCountingRates& r, double mu_weak, double mu_strong) {
  if (!(mu_weak > 0) || !(mu_strong > mu_weak))
    throw std::invalid_argument("untagged_rate_bound: requires 0 < mu_weak < mu_strong");
  const double m1 = mu_weak, m2 = mu_strong;
  const double num = m2 * m2 * std::exp(m1) * (r.s01 + r.s10) - m1 * m1 * std::exp(m2) * (r.s02 + r.s20) -
                     2.0 * (m2 * m2 - m1 * m1) * r.s00;
  const double s1 = num / (2.0 * m1 * m2 * (m2 - m1));
  return std::clamp(s1, 0.0, 1.0);
}

double untagged_rate_bound(const SnsCountingRates& rates, const IntensitySettings& mu) {
  return untagged_rate_bound(rates, mu.mu2, mu.mu1);
}

double phase_flip_bound(const SnsCountingRates& r, double mu_weak, double s1_l) {
  if (!(s1_l > 0)) throw std::domain_error("phase_flip_bound: S1_L must be > 0");
  const double decay = std::exp(-2.0 * mu_weak);
  const double e1 = (r.t_delta - 0.5 * decay * r.s00) / (2.0 * mu_weak * decay * s1_l);
  return std::clamp(e1, 0.0, 0.5);
}

namespace {

struct SignalWindow {
  double n_t_per_pulse = 0.0;
  double e_z = 0.0;
};

SignalWindow signal_window(const SnsCountingRates& r, double eps) {
  const double both_silent = (1.0 - eps) * (1.0 - eps) * r.s00;
  const double both_send = eps * eps * r.szz;
  const double one_sends = eps * (1.0 - eps) * (r.s0z + r.sz0);
  SignalWindow w;
  w.n_t_per_pulse = both_silent + one_sends + both_send;
  w.e_z = w.n_t_per_pulse > 0.0 ? (both_silent + both_send) / w.n_t_per_pulse : 0.0;
  return w;
}

double analyse(const SystemParams& p, const SnsCountingRates& rates, const SignalWindow& window,
               const IntensitySettings& assumed, SnsKeyQuantities& out, unsigned infeasible_flag,
               unsigned& flags) {
  const double n = p.protocol.n_total;
  const double eps = p.sns.send_probability;
  out.n_t = n * window.n_t_per_pulse;
  out.e_z = window.e_z;
  out.s1_l = untagged_rate_bound(rates, assumed);
  if (!(out.s1_l > 0.0)) {
    flags |= infeasible_flag;
    return 0.0;
  }
  out.e1_u = phase_flip_bound(rates, assumed.mu2, out.s1_l);

  const double mu_z = assumed.mu0;
  out.n1 = n * 2.0 * eps * (1.0 - eps) * mu_z * std::exp(-mu_z) * out.s1_l;
  if (out.n1 > out.n_t) {
    out.n1 = out.n_t;
    flags |= kFlagBoundClamped;
  }
  const double rate =
      (out.n1 * (1.0 - binary_entropy(out.e1_u)) - p.protocol.f_ec * out.n_t * binary_entropy(out.e_z)) / n -
      p.protocol.gamma;
  if (rate < 0.0) {
    flags |= kFlagNegativeRate;
    return 0.0;
  }
  return rate;
}

}  // namespace

SnsKeyRate sns_key_rate(const SystemParams& params, double g) {
  validate(params);
  const SnsCountingRates rates = simulate_counting_rates(params, g);
  const SignalWindow window = signal_window(rates, params.sns.send_probability);
  const IntensitySettings& nominal = params.intensities;
  const IntensitySettings attacked = nominal.scaled(g);

  SnsKeyRate r;
  r.sweep_value = params.channel.length_km;
  r.r_estimated = analyse(params, rates, window, nominal, r.estimated, kFlagEstimatedInfeasible, r.flags);
  r.r_true = analyse(params, rates, window, attacked, r.truth, kFlagTrueInfeasible, r.flags);
  return r;
}

std::vector<SnsKeyRate> sns_distance_sweep(const SystemParams& params, double g, std::span<const double> lengths_km) {
  std::vector<SnsKeyRate> out;
  out.reserve(lengths_km.size());
  for (double l : lengths_km) out.push_back(sns_key_rate(params.with_length(l), g));
  return out;
}

}  // namespace wsa
