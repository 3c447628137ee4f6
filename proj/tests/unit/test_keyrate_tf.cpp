#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/photon_number.hpp"
#include "wsattack/attack.hpp"
#include "wsattack/keyrate_tf.hpp"

using namespace wsa;

namespace {

constexpr double kEta560 = 7.535659294528740e-7;

std::vector<double> lengths(double a, double b, double step) {
  std::vector<double> out;
  for (double l = a; l <= b + 1e-9; l += step) out.push_back(l);
  return out;
}

}  // namespace

TEST(GainQ, Limits) {
  EXPECT_EQ(gain_q(0.0, 0.5, 0.0), 0.0);
  EXPECT_NEAR(gain_q(1e3, 1.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(gain_q(0.0, 0.5, 1e-8), 2e-8 - 1e-16, 1e-22);
}

TEST(GainQ, HighPrecisionOracle) {
  // 40-digit evaluation of 1 - (1 - 1e-8)^2 exp(-0.4 eta) at 560 km.
  const double q = gain_q(0.4, kEta560, 1e-8);
  EXPECT_NEAR(q / 3.2142632022369888e-7, 1.0, 1e-13);
  // First-order Taylor: eta mu + 2 pd, off by the second-order terms only.
  const double x = 0.4 * kEta560;
  EXPECT_NEAR(q, x + 2e-8, x * x);
}

TEST(GainQ, MatchesPhotonNumberSum) {
  for (double mu : {1e-4, 0.01, 0.4}) {
    for (double eta : {1e-6, 1e-3, 0.3}) {
      EXPECT_NEAR(gain_q(mu, eta, 1e-8), oracle::gain(mu, eta, 1e-8), 1e-15);
    }
  }
}

TEST(GainQ, Errors) {
  EXPECT_THROW(gain_q(-1, 0.5, 0), std::invalid_argument);
  EXPECT_THROW(gain_q(1, 1.5, 0), std::invalid_argument);
  EXPECT_THROW(gain_q(1, 0.5, 1.0), std::invalid_argument);
}

TEST(PhaseSliceError, ClosedForm) {
  // 1/2 - sin(2 pi/M)/(4 pi/M) at M = 16, 30-digit reference.
  EXPECT_NEAR(phase_slice_error(16), 0.01275232079778368, 1e-15);
  for (int m = 2; m <= 64; ++m) {
    const double x = 2 * std::numbers::pi / m;
    EXPECT_NEAR(phase_slice_error(m), 0.5 - std::sin(x) / (2 * x), 1e-12);
  }
  EXPECT_THROW(phase_slice_error(1), std::invalid_argument);
}

TEST(Qber, Oracle) {
  EXPECT_NEAR(qber_e(0.4, kEta560, 1e-8, 0.03, 16), 0.071203482338289393, 1e-13);
}

TEST(Qber, BracketVanishesAtHalf) {
  const double e_opt = 0.5 - phase_slice_error(16);
  EXPECT_NEAR(qber_e(0.4, 0.01, 0.0, e_opt, 16), 0.5, 1e-15);
}

TEST(Qber, ZeroGainThrows) { EXPECT_THROW(qber_e(0.0, 0.5, 0.0, 0.03, 16), std::domain_error); }

TEST(DecoyBounds, Preconditions) {
  const std::array<double, 3> q{1e-3, 1e-4, 1e-5};
  const std::array<double, 3> e{0.05, 0.05, 0.05};
  EXPECT_THROW(decoy_bounds(q, e, IntensitySettings{0.4, 1e-4, 1e-4}), std::invalid_argument);
  EXPECT_THROW(decoy_bounds(q, e, IntensitySettings{0.011, 0.01, 0.005}), std::invalid_argument);
}

TEST(DecoyBounds, EqualDecoyGainsClosedForm) {
  // Q1 = Q2 = q with mu1 = 2 mu2: Y0_L = q (2 e^{mu2} - e^{2 mu2}).
  const double mu2 = 0.01, mu1 = 0.02, mu0 = 0.5;
  const double q = 1e-3, q0 = 1e-3;
  const std::array<double, 3> qs{q0, q, q};
  const std::array<double, 3> es{0.05, 0.05, 0.05};
  const auto b = decoy_bounds(qs, es, IntensitySettings{mu0, mu1, mu2});
  const double y0 = q * (2 * std::exp(mu2) - std::exp(2 * mu2));
  EXPECT_NEAR(b.y0_l, y0, 1e-15);
  const double denom = mu0 * mu1 - mu0 * mu2 - mu1 * mu1 + mu2 * mu2;
  const double y1 = mu0 / denom *
                    (q * std::exp(mu1) - q * std::exp(mu2) -
                     (mu1 * mu1 - mu2 * mu2) / (mu0 * mu0) * (q0 * std::exp(mu0) - y0));
  EXPECT_NEAR(b.y1_l, std::min(y1, 1.0), 1e-12);
}

TEST(DecoyBounds, InfeasibleWhenNoSinglePhotonSignal) {
  // Signal gain far above anything the decoy gains allow.
  const std::array<double, 3> q{0.5, 1e-6, 1e-6};
  const std::array<double, 3> e{0.5, 0.5, 0.5};
  EXPECT_THROW(decoy_bounds(q, e, IntensitySettings{}), InfeasibleBound);
}

TEST(DecoyBounds, LosslessToyChannelSound) {
  const double eta = 1.0, pd = 0.0;
  const IntensitySettings mu{0.4, 0.01, 1e-4};
  std::array<double, 3> q{}, e{};
  const std::array<double, 3> ms{mu.mu0, mu.mu1, mu.mu2};
  for (int i = 0; i < 3; ++i) {
    q[i] = oracle::gain(ms[i], eta, pd);
    e[i] = qber_e(ms[i], eta, pd, 0.0, 16);
  }
  const auto b = decoy_bounds(q, e, mu);
  EXPECT_LE(b.y1_l, oracle::single_photon_yield(eta, pd) + 1e-12);
  EXPECT_GT(b.y1_l, 0.0);
}

// Soundness of Y1_L on honest channels across random parameters.
TEST(DecoyBounds, NeverExceedsTrueSinglePhotonYield) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> length(0, 600), pd_exp(-11, -6), mu0(0.2, 0.8);
  for (int i = 0; i < 200; ++i) {
    SystemParams p;
    p.channel.length_km = length(rng);
    p.channel.p_dark = std::pow(10.0, pd_exp(rng));
    p.intensities.mu0 = mu0(rng);
    const double eta = single_arm_transmittance(p.channel);
    try {
      const auto r = tf_key_rate(p, 1.0);
      if (r.flags & kFlagEstimatedInfeasible) continue;
      EXPECT_LE(r.estimated.y1_l, oracle::single_photon_yield(eta, p.channel.p_dark) * (1 + 1e-9));
    } catch (const InfeasibleBound&) {
    }
  }
}

TEST(TfKeyRate, NoAttackCollapsesBitForBit) {
  const auto p = SystemParams::tf_defaults();
  for (double l : lengths(0, 700, 50)) {
    const auto r = tf_key_rate(p.with_length(l), 1.0);
    EXPECT_EQ(r.r_estimated, r.r_true);
    EXPECT_EQ(r.estimated.y1_l, r.truth.y1_l);
    EXPECT_EQ(r.estimated.e1_u, r.truth.e1_u);
    EXPECT_EQ(r.estimated.q1_l, r.truth.q1_l);
  }
}

TEST(TfKeyRate, AttackOverestimates) {
  const auto p = SystemParams::tf_defaults();
  int positive = 0;
  for (double l : lengths(0, 700, 10)) {
    const auto r = tf_key_rate(p.with_length(l), 1.087);
    EXPECT_GE(r.r_estimated, r.r_true) << "L=" << l;
    if (r.r_true > 0) {
      EXPECT_GT(r.r_estimated, r.r_true) << "L=" << l;
      ++positive;
    }
  }
  EXPECT_GT(positive, 40);
}

TEST(TfKeyRate, GapWidensWithShiftAt560km) {
  const auto p = SystemParams::tf_defaults().with_length(560);
  const auto t = GainTable::measured();
  double prev_gap = 0.0;
  for (double f : {1.0, 3.0, 9.0, 20.0, 30.0}) {
    const auto r = tf_key_rate(p, system_gain_factor(f, f, t));
    const double gap = r.r_estimated - r.r_true;
    EXPECT_GT(gap, prev_gap) << "f=" << f;
    prev_gap = gap;
  }
}

TEST(TfKeyRate, SquareRootScaling) {
  auto p = SystemParams::tf_defaults();
  p.channel.p_dark = 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double l : lengths(300, 500, 10)) {
    const double y = std::log10(tf_key_rate(p.with_length(l), 1.087).r_true);
    sx += l;
    sy += y;
    sxx += l * l;
    sxy += l * y;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, -0.2 / 20, 0.05 * 0.2 / 20);
}

TEST(TfKeyRate, RatesAreFiniteAndNonNegative) {
  const auto p = SystemParams::tf_defaults();
  for (double l : lengths(0, 1000, 25)) {
    for (double g : {1.0, 1.087, 1.5}) {
      const auto r = tf_key_rate(p.with_length(l), g);
      EXPECT_TRUE(std::isfinite(r.r_estimated));
      EXPECT_GE(r.r_estimated, 0.0);
      EXPECT_GE(r.r_true, 0.0);
    }
  }
}

TEST(TfKeyRate, FarBeyondReachIsFlagged) {
  const auto r = tf_key_rate(SystemParams::tf_defaults().with_length(900), 1.0);
  EXPECT_EQ(r.r_true, 0.0);
  EXPECT_NE(r.flags, kFlagNone);
}

TEST(TfKeyRate, InvalidInputs) {
  const auto p = SystemParams::tf_defaults();
  EXPECT_THROW(tf_key_rate(p, 0.9), std::invalid_argument);
  auto bad = p;
  bad.intensities.mu1 = bad.intensities.mu2;
  EXPECT_THROW(tf_key_rate(bad, 1.0), InvalidParameter);
}

TEST(TfKeyRate, SweepKeepsOrder) {
  const auto ls = lengths(100, 300, 100);
  const auto rows = tf_distance_sweep(SystemParams::tf_defaults(), 1.0, ls);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].sweep_value, ls[i]);
}

TEST(Plob, Values) {
  EXPECT_EQ(plob_bound(0.0), 0.0);
  EXPECT_DOUBLE_EQ(plob_bound(0.5), 1.0);
  EXPECT_NEAR(plob_bound(0.01), 0.014499569695115077, 1e-16);
  EXPECT_THROW(plob_bound(1.0), std::invalid_argument);
}

TEST(Plob, TfBeatsPlobAtLongDistance) {
  const auto p = SystemParams::tf_defaults().with_length(500);
  const auto r = tf_key_rate(p, 1.0);
  EXPECT_GT(r.r_true, plob_bound(link_transmittance(p.channel)));
}

TEST(Flags, Describe) {
  EXPECT_EQ(describe_flags(kFlagNone), "ok");
  EXPECT_EQ(describe_flags(kFlagBoundClamped | kFlagNegativeRate), "clamped|negative_rate");
}
