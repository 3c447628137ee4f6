#include "wsattack/keyrate_tf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wsa {

std::string describe_flags(unsigned flags) {
  if (flags == kFlagNone) return "ok";
  std::ostringstream os;
  const char* sep = "";
  auto add = [&](unsigned bit, const char* name) {
    if (flags & bit) {
      os << sep << name;
      sep = "|";
    }
  };
  add(kFlagEstimatedInfeasible, "estimated_infeasible");
  add(kFlagTrueInfeasible, "true_infeasible");
  add(kFlagBoundClamped, "clamped");
  add(kFlagNegativeRate, "negative_rate");
  return os.str();
}

double gain_q(double mu, double eta, double p_dark) {
  if (!(mu >= 0)) throw std::invalid_argument("gain_q: mu must be >= 0");
  if (!(eta >= 0 && eta <= 1)) throw std::invalid_argument("gain_q: eta must be in [0, 1]");
  if (!(p_dark >= 0 && p_dark < 1)) throw std::invalid_argument("gain_q: p_dark must be in [0, 1)");
  // 1 - (1-pd)^2 e^{-eta mu}, evaluated without cancellation for tiny gains.
  return -std::expm1(2.0 * std::log1p(-p_dark) - eta * mu);
}

double phase_slice_error(int m_slices) {
  if (m_slices < 2) throw std::invalid_argument("phase_slice_error: M must be >= 2");
  const double x = 2.0 * std::numbers::pi / m_slices;
  return 0.5 - std::sin(x) / (2.0 * x);
}

double qber_e(double mu, double eta, double p_dark, double e_opt, int m_slices) {
  const double q = gain_q(mu, eta, p_dark);
  if (q <= 0.0) throw std::domain_error("qber_e: zero gain, QBER undefined");
  const double e_m = phase_slice_error(m_slices);
  const double a = mu * eta * (1.0 - e_opt - e_m);
  const double b = mu * eta * (e_opt + e_m);
  const double bracket = std::expm1(-a) - std::expm1(-b);
  return std::clamp(0.5 + (1.0 - p_dark) / (2.0 * q) * bracket, 0.0, 1.0);
}

DecoyBounds decoy_bounds(std::span<const double, 3> q, std::span<const double, 3> e, const IntensitySettings& mu) {
  const double m0 = mu.mu0, m1 = mu.mu1, m2 = mu.mu2;
  if (!(m1 > m2)) throw std::invalid_argument("decoy_bounds: requires mu1 > mu2");
  const double denom = m0 * m1 - m0 * m2 - m1 * m1 + m2 * m2;
  if (!(denom > 0)) throw std::invalid_argument("decoy_bounds: requires mu0 > mu1 + mu2");

  DecoyBounds b;
  const double w0 = q[0] * std::exp(m0);
  const double w1 = q[1] * std::exp(m1);
  const double w2 = q[2] * std::exp(m2);

  double y0 = (m1 * w2 - m2 * w1) / (m1 - m2);
  if (y0 < 0.0 || y0 > 1.0) {
    y0 = std::clamp(y0, 0.0, 1.0);
    b.clamped = true;
  }
  b.y0_l = y0;

  double y1 = m0 / denom * (w1 - w2 - (m1 * m1 - m2 * m2) / (m0 * m0) * (w0 - y0));
  if (!(y1 > 0.0)) throw InfeasibleBound("decoy_bounds: Y1_L <= 0, no secure single-photon estimate");
  if (y1 > 1.0) {
    y1 = 1.0;
    b.clamped = true;
  }
  b.y1_l = y1;

  b.q1_l = m0 * std::exp(-m0) * y1;
  if (b.q1_l > q[0]) {
    b.q1_l = q[0];
    b.clamped = true;
  }

  double e1 = (e[1] * w1 - e[2] * w2) / ((m1 - m2) * y1);
  if (e1 < 0.0 || e1 > 0.5) {
    e1 = std::clamp(e1, 0.0, 0.5);
    b.clamped = true;
  }
  b.e1_u = e1;
  return b;
}

namespace {

struct Observations {
  std::array<double, 3> q{};
  std::array<double, 3> e{};
};

Observations observe(const SystemParams& p, const IntensitySettings& actual) {
  const double eta = single_arm_transmittance(p.channel);
  const std::array<double, 3> mus{actual.mu0, actual.mu1, actual.mu2};
  Observations o;
  for (std::size_t i = 0; i < 3; ++i) {
    o.q[i] = gain_q(mus[i], eta, p.channel.p_dark);
    o.e[i] = qber_e(mus[i], eta, p.channel.p_dark, p.channel.e_opt, p.protocol.phase_slices_m);
  }
  return o;
}

// Evaluates the rate bound on fixed observations under assumed intensities.
double analyse(const SystemParams& p, const Observations& obs, const IntensitySettings& assumed,
               TfDecoyQuantities& out, unsigned infeasible_flag, unsigned& flags) {
  out.q_mu = obs.q;
  out.e_mu = obs.e;
  out.e_m = phase_slice_error(p.protocol.phase_slices_m);
  DecoyBounds b;
  try {
    b = decoy_bounds(obs.q, obs.e, assumed);
  } catch (const InfeasibleBound&) {
    flags |= infeasible_flag;
    return 0.0;
  }
  if (b.clamped) flags |= kFlagBoundClamped;
  out.y0_l = b.y0_l;
  out.y1_l = b.y1_l;
  out.q1_l = b.q1_l;
  out.e1_u = b.e1_u;

  const double prefactor = p.protocol.duty_cycle_d / p.protocol.phase_slices_m;
  const double rate = prefactor * (b.q1_l * (1.0 - binary_entropy(b.e1_u)) -
                                   p.protocol.f_ec * obs.q[0] * binary_entropy(obs.e[0]));
  if (rate < 0.0) {
    flags |= kFlagNegativeRate;
    return 0.0;
  }
  return rate;
}

}  // namespace

TfKeyRate tf_key_rate(const SystemParams& params, double g) {
  validate(params.intensities);
  validate(params.channel);
  validate(params.protocol);
  if (!(g >= 1.0) || !std::isfinite(g)) throw std::invalid_argument("tf_key_rate: gain factor g must be >= 1");

  const IntensitySettings& nominal = params.intensities;
  const IntensitySettings attacked = nominal.scaled(g);
  const Observations obs = observe(params, attacked);

  TfKeyRate r;
  r.sweep_value = params.channel.length_km;
  r.r_estimated = analyse(params, obs, nominal, r.estimated, kFlagEstimatedInfeasible, r.flags);
  r.r_true = analyse(params, obs, attacked, r.truth, kFlagTrueInfeasible, r.flags);
  return r;
}

std::vector<TfKeyRate> tf_distance_sweep(const SystemParams& params, double g, std::span<const double> lengths_km) {
  std::vector<TfKeyRate> out;
  out.reserve(lengths_km.size());
  for (double l : lengths_km) out.push_back(tf_key_rate(params.with_length(l), g));
  return out;
}

double plob_bound(double eta_total) {
  if (!(eta_total >= 0 && eta_total < 1)) throw std::invalid_argument("plob_bound: eta must be in [0, 1)");
  return -std::log1p(-eta_total) / std::numbers::ln2;
}

double link_transmittance(const ChannelParams& channel) {
  validate(channel);
  return channel.eta_det * std::pow(10.0, -channel.alpha_db_per_km * channel.length_km / 10.0);
}

}  // namespace wsa
