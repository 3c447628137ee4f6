#include "wsattack/params.hpp"

#include <cmath>
#include <sstream>

namespace wsa {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::ostringstream os;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) os << '\n';
    os << lines[i];
  }
  return os.str();
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

InvalidParameter::InvalidParameter(const std::vector<std::string>& diagnostics)
    : std::invalid_argument(join_lines(diagnostics)), diagnostics_(diagnostics) {}

SystemParams SystemParams::tf_defaults() { return SystemParams{}; }

SystemParams SystemParams::sns_defaults() {
  SystemParams p;
  p.channel.alpha_db_per_km = 0.157;
  p.channel.eta_det = 0.6;
  p.channel.p_dark = 1.4e-11;
  p.protocol.f_ec = 1.16;
  p.protocol.n_total = 5.4e14;
  return p;
}

Diagnostics check(const IntensitySettings& mu) {
  Diagnostics d;
  if (!finite(mu.mu0) || !finite(mu.mu1) || !finite(mu.mu2)) {
    d.emplace_back("intensities: all intensities must be finite");
    return d;
  }
  if (!(mu.mu2 > 0)) d.emplace_back("intensities: mu2 must be > 0");
  if (!(mu.mu1 > mu.mu2)) d.emplace_back("intensities: ordering mu1 > mu2 violated");
  if (!(mu.mu0 > mu.mu1)) d.emplace_back("intensities: ordering mu0 > mu1 violated");
  return d;
}

Diagnostics check(const ChannelParams& c) {
  Diagnostics d;
  if (!(c.alpha_db_per_km > 0) || !finite(c.alpha_db_per_km))
    d.emplace_back("channel: alpha_db_per_km must be > 0");
  if (!(c.length_km >= 0) || !finite(c.length_km)) d.emplace_back("channel: length_km must be >= 0");
  if (!(c.eta_det > 0 && c.eta_det <= 1)) d.emplace_back("channel: eta_det must be in (0, 1]");
  if (!(c.p_dark >= 0 && c.p_dark < 1)) d.emplace_back("channel: p_dark must be in [0, 1)");
  if (!(c.e_opt >= 0 && c.e_opt < 0.5)) d.emplace_back("channel: e_opt must be in [0, 0.5)");
  return d;
}

Diagnostics check(const ProtocolParams& p) {
  Diagnostics d;
  if (!(p.duty_cycle_d > 0 && p.duty_cycle_d <= 1)) d.emplace_back("protocol: duty_cycle_d must be in (0, 1]");
  if (p.phase_slices_m < 2) d.emplace_back("protocol: phase_slices_m must be >= 2");
  if (!(p.f_ec >= 1) || !finite(p.f_ec)) d.emplace_back("protocol: f_ec must be >= 1");
  if (!(p.n_total > 0) || !finite(p.n_total)) d.emplace_back("protocol: n_total must be > 0");
  if (!(p.gamma >= 0) || !finite(p.gamma)) d.emplace_back("protocol: gamma must be >= 0");
  if (p.t_delta && !(*p.t_delta >= 0 && *p.t_delta <= 1))
    d.emplace_back("protocol: t_delta must be in [0, 1]");
  return d;
}

Diagnostics check(const SnsModelParams& s) {
  Diagnostics d;
  if (!(s.send_probability > 0 && s.send_probability < 1))
    d.emplace_back("sns: send_probability must be in (0, 1)");
  if (s.aopp) d.emplace_back("sns: aopp post-processing is not implemented");
  return d;
}

Diagnostics check(const SystemParams& p) {
  Diagnostics d = check(p.intensities);
  auto append = [&d](Diagnostics more) { d.insert(d.end(), more.begin(), more.end()); };
  append(check(p.channel));
  append(check(p.protocol));
  append(check(p.sns));
  return d;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double single_arm_transmittance(const ChannelParams& channel) {
  validate(channel);
  const double loss_db = channel.alpha_db_per_km * (channel.length_km / 2.0);
  return channel.eta_det * std::pow(10.0, -loss_db / 10.0);
}

}  // namespace wsa
