#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/photon_number.hpp"
#include "wsattack/keyrate_sns.hpp"

using namespace wsa;

TEST(SnsRates, NoDarkCountsNoVacuumClicks) {
  auto p = SystemParams::sns_defaults().with_length(300);
  p.channel.p_dark = 0.0;
  EXPECT_EQ(simulate_counting_rates(p, 1.0).s00, 0.0);
}

TEST(SnsRates, OpaqueChannelLeavesOnlyDarkCounts) {
  auto p = SystemParams::sns_defaults();
  p.channel.eta_det = 1e-300;
  p.channel.length_km = 0;
  const auto r = simulate_counting_rates(p, 1.0);
  const double dark = 2 * 1.4e-11 - 1.4e-11 * 1.4e-11;
  EXPECT_NEAR(r.s00, dark, 1e-25);
  EXPECT_NEAR(r.s02, dark, 1e-25);
  EXPECT_NEAR(r.szz, dark, 1e-25);
}

TEST(SnsRates, MatchPhotonNumberSum) {
  const auto p = SystemParams::sns_defaults().with_length(200);
  const double eta = single_arm_transmittance(p.channel);
  const double pd = p.channel.p_dark;
  const auto r = simulate_counting_rates(p, 1.0);
  EXPECT_NEAR(r.s01 / oracle::gain(p.intensities.mu2, eta, pd), 1.0, 1e-9);
  EXPECT_NEAR(r.s02 / oracle::gain(p.intensities.mu1, eta, pd), 1.0, 1e-9);
  EXPECT_NEAR(r.szz / oracle::gain(2 * p.intensities.mu0, eta, pd), 1.0, 1e-9);
}

TEST(SnsRates, AttackRaisesEveryNonVacuumRate) {
  const auto p = SystemParams::sns_defaults().with_length(400);
  const auto a = simulate_counting_rates(p, 1.0);
  const auto b = simulate_counting_rates(p, 1.087);
  EXPECT_EQ(a.s00, b.s00);
  EXPECT_GT(b.s01, a.s01);
  EXPECT_GT(b.s02, a.s02);
  EXPECT_GT(b.s0z, a.s0z);
  EXPECT_GT(b.szz, a.szz);
}

TEST(SnsRates, ProbabilitiesInUnitInterval) {
  const auto base = SystemParams::sns_defaults();
  for (double l = 0; l <= 1200; l += 50) {
    for (double g : {1.0, 1.087, 2.0}) {
      const auto r = simulate_counting_rates(base.with_length(l), g);
      for (double x : {r.s00, r.s01, r.s10, r.s02, r.s20, r.s0z, r.sz0, r.szz, r.t_delta}) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
      }
    }
  }
}

TEST(SnsRates, TDeltaOverride) {
  auto p = SystemParams::sns_defaults();
  p.protocol.t_delta = 1.25e-7;
  EXPECT_EQ(simulate_counting_rates(p, 1.0).t_delta, 1.25e-7);
}

TEST(UntaggedBound, RequiresOrderedDecoys) {
  const auto r = simulate_counting_rates(SystemParams::sns_defaults(), 1.0);
  EXPECT_THROW(untagged_rate_bound(r, 0.1, 0.1), std::invalid_argument);
  EXPECT_THROW(untagged_rate_bound(r, 0.0, 0.1), std::invalid_argument);
}

TEST(UntaggedBound, FlooredAtZero) {
  SnsCountingRates r;
  r.s00 = 1e-3;
  EXPECT_EQ(untagged_rate_bound(r, 0.1, 0.2), 0.0);
}

// S1_L on honest channels never exceeds the single-photon counting rate.
TEST(UntaggedBound, SoundAgainstPhotonNumberOracle) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> length(0, 800), pd_exp(-12, -7), weak(0.01, 0.2), ratio(1.5, 5.0);
  for (int i = 0; i < 200; ++i) {
    auto p = SystemParams::sns_defaults().with_length(length(rng));
    p.channel.p_dark = std::pow(10.0, pd_exp(rng));
    p.intensities.mu2 = weak(rng);
    p.intensities.mu1 = p.intensities.mu2 * ratio(rng);
    p.intensities.mu0 = std::max(0.5, 2 * p.intensities.mu1);
    const double eta = single_arm_transmittance(p.channel);
    const auto r = simulate_counting_rates(p, 1.0);
    EXPECT_LE(untagged_rate_bound(r, p.intensities), oracle::single_photon_yield(eta, p.channel.p_dark) * (1 + 1e-9));
  }
}

TEST(PhaseFlip, ClampedToHalf) {
  SnsCountingRates r;
  r.t_delta = 1.0;
  EXPECT_EQ(phase_flip_bound(r, 0.1, 1e-6), 0.5);
  r.t_delta = 0.0;
  r.s00 = 1e-3;
  EXPECT_EQ(phase_flip_bound(r, 0.1, 1e-3), 0.0);
  EXPECT_THROW(phase_flip_bound(r, 0.1, 0.0), std::domain_error);
}

TEST(PhaseFlip, ClosedForm) {
  SnsCountingRates r;
  r.t_delta = 2e-6;
  r.s00 = 1e-6;
  const double mu = 0.1;
  const double d = std::exp(-2 * mu);
  EXPECT_NEAR(phase_flip_bound(r, mu, 1e-4), (2e-6 - 0.5 * d * 1e-6) / (2 * mu * d * 1e-4), 1e-15);
}

TEST(SnsKeyRate, PositiveAt500km) {
  const auto r = sns_key_rate(SystemParams::sns_defaults().with_length(500), 1.0);
  EXPECT_GT(r.r_estimated, 0.0);
  EXPECT_GT(r.estimated.s1_l, 0.0);
  EXPECT_GT(r.estimated.e1_u, 0.0);
  EXPECT_LT(r.estimated.e1_u, 0.5);
}

TEST(SnsKeyRate, NoAttackCollapsesBitForBit) {
  const auto p = SystemParams::sns_defaults();
  for (double l = 0; l <= 1100; l += 100) {
    const auto r = sns_key_rate(p.with_length(l), 1.0);
    EXPECT_EQ(r.r_estimated, r.r_true);
    EXPECT_EQ(r.estimated.s1_l, r.truth.s1_l);
  }
}

TEST(SnsKeyRate, AttackOverestimates) {
  const auto p = SystemParams::sns_defaults();
  int both_positive = 0;
  for (double l = 0; l <= 1100; l += 10) {
    const auto r = sns_key_rate(p.with_length(l), 1.087);
    EXPECT_GE(r.r_estimated, r.r_true) << "L=" << l;
    if (r.r_true > 0) {
      EXPECT_GT(r.r_estimated, r.r_true) << "L=" << l;
      ++both_positive;
    }
  }
  EXPECT_GT(both_positive, 50);
}

TEST(SnsKeyRate, FiniteSizeOffsetLowersRate) {
  auto p = SystemParams::sns_defaults().with_length(300);
  const double r0 = sns_key_rate(p, 1.0).r_estimated;
  p.protocol.gamma = r0 / 2;
  EXPECT_NEAR(sns_key_rate(p, 1.0).r_estimated, r0 / 2, 1e-12 * r0);
}

TEST(SnsKeyRate, OddParityPairingRejected) {
  auto p = SystemParams::sns_defaults();
  p.sns.aopp = true;
  EXPECT_THROW(sns_key_rate(p, 1.0), InvalidParameter);
}

TEST(SnsKeyRate, SweepCarriesDistance) {
  const std::vector<double> ls{100, 600};
  const auto rows = sns_distance_sweep(SystemParams::sns_defaults(), 1.087, ls);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].sweep_value, 600.0);
}
