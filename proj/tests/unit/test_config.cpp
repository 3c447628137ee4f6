#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "wsattack/config.hpp"

using namespace wsa;

namespace {

const std::filesystem::path kData = WSATTACK_TEST_DATA;

bool mentions(const Diagnostics& d, const std::string& needle) {
  for (const auto& m : d)
    if (m.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Config, DefaultsResolveToStructDefaults) {
  const auto rc = resolve_config(Json::object(), Preset::tf);
  EXPECT_EQ(rc.system.intensities.mu0, 0.4);
  EXPECT_EQ(rc.system.channel.eta_det, 0.3);
  EXPECT_EQ(rc.attack.f_delta(), 30.0);
  EXPECT_EQ(rc.opll.het_center_mhz, 112.0);
  EXPECT_NEAR(rc.aom.physics.f_aom0_mhz, fit_f_aom0(AomPhysics::defaults(), 195.0), 1e-9);
  EXPECT_EQ(rc.gains(30), 0.0435);
  EXPECT_TRUE(validate_config(Json::object()).empty());
}

TEST(Config, SnsPreset) {
  const auto rc = resolve_config(Json::object(), Preset::sns);
  EXPECT_EQ(rc.system.channel.alpha_db_per_km, 0.157);
  EXPECT_EQ(rc.system.channel.p_dark, 1.4e-11);
}

TEST(Config, DefaultDocumentRoundTrips) {
  const Json doc = default_config(Preset::tf);
  const auto rc = resolve_config(doc, Preset::tf);
  EXPECT_EQ(rc.snapshot, resolve_config(rc.snapshot, Preset::tf).snapshot);
}

TEST(Config, PatchOverridesSingleField) {
  const auto rc = resolve_config(Json::parse(R"({"channel": {"length_km": 250}})"), Preset::tf);
  EXPECT_EQ(rc.system.channel.length_km, 250.0);
  EXPECT_EQ(rc.system.channel.alpha_db_per_km, 0.2);
}

TEST(Config, IntensityOrderingReported) {
  const auto d = validate_config(Json::parse(R"({"intensities": {"mu1": 1e-4}})"));
  EXPECT_TRUE(mentions(d, "mu1 > mu2"));
  EXPECT_THROW(resolve_config(Json::parse(R"({"intensities": {"mu1": 1e-4}})"), Preset::tf), InvalidParameter);
}

TEST(Config, LockLimitReported) {
  const auto d = validate_config(Json::parse(R"({"attack": {"f_aom2_mhz": 160}})"));
  EXPECT_TRUE(mentions(d, "lock limit"));
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(resolve_config(Json::parse(R"({"channel": {"lenght_km": 1}})"), Preset::tf), ConfigError);
  EXPECT_THROW(resolve_config(Json::parse(R"({"bogus": {}})"), Preset::tf), ConfigError);
  EXPECT_TRUE(mentions(validate_config(Json::parse(R"({"channel": {"lenght_km": 1}})")), "lenght_km"));
}

TEST(Config, WrongTypeRejected) {
  EXPECT_THROW(resolve_config(Json::parse(R"({"channel": {"length_km": "far"}})"), Preset::tf), ConfigError);
}

TEST(Config, ParseErrorCarriesLineAndColumn) {
  try {
    parse_config_text("{\n  \"channel\": {\n    \"length_km\": 10,\n  }\n}\n", "cfg.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("cfg.json:4:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find('^'), std::string::npos) << msg;
  }
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config_file(kData / "does_not_exist.json"), ConfigError);
  EXPECT_FALSE(validate_config(kData / "does_not_exist.json").empty());
}

TEST(Config, TableFromCsv) {
  const auto pts = load_table_csv(kData / "voltage_table.csv", "voltage_v", "attenuation_db");
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(pts[2].first, 10.56);
  EXPECT_EQ(pts[2].second, 4.48);
}

TEST(Config, FileWithRelativeCsv) {
  const auto path = kData / "with_csv.json";
  EXPECT_TRUE(validate_config(path).empty());
  const auto rc = resolve_config(load_config_file(path), Preset::tf, kData);
  EXPECT_EQ(rc.system.intensities.mu1, 0.02);
  EXPECT_EQ(attenuation_vs_voltage(15.0, rc.aom.voltage).value, 3.59);
  // The snapshot embeds the table so reruns do not depend on the CSV.
  EXPECT_TRUE(rc.snapshot["aom"]["voltage_table"].contains("points"));
}

TEST(Config, BadCsvCellReportsLine) {
  try {
    load_table_csv(kData / "bad_table.csv", "voltage_v", "attenuation_db");
    FAIL() << "expected failure";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
}

TEST(Config, AnalyticFrequencyTable) {
  const auto rc = resolve_config(Json::parse(R"({"aom": {"frequency_table": "analytic"}})"), Preset::tf);
  EXPECT_FALSE(rc.aom.measured_frequency.has_value());
}

TEST(Config, CustomGainTable) {
  const auto rc = resolve_config(Json::parse(R"({"attack": {"gain_table": [[10, 0.02], [30, 0.05]]}})"), Preset::tf);
  EXPECT_EQ(rc.gains(30), 0.05);
  EXPECT_THROW(resolve_config(Json::parse(R"({"attack": {"gain_table": [[10, -1]]}})"), Preset::tf), ConfigError);
}

TEST(Config, OpllFollowsAomCenter) {
  const auto rc = resolve_config(Json::parse(R"({"aom": {"center_frequency_mhz": 190}})"), Preset::tf);
  EXPECT_EQ(rc.opll.aom_center_mhz, 190.0);
}
