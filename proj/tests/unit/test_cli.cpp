#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("wsattack_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args, const fs::path& log = "/dev/null") {
  const std::string cmd = std::string("\"") + WSATTACK_CLI + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run("--help"), 0); }

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run("keyrate tf --sweep distance:0:x:10"), 2);
  EXPECT_EQ(run("keyrate tf --g 0.5"), 2);
  EXPECT_EQ(run("reproduce fig9"), 2);
}

TEST(Cli, KeyrateSweepWritesCsvAndManifest) {
  TempDir d;
  ASSERT_EQ(run("--out \"" + d.path.string() + "\" keyrate tf --sweep distance:0:200:100 --g 1.087"), 0);
  EXPECT_EQ(first_line(d.path / "keyrate_tf.csv"), "L_km,g,r_estimated,r_true,plob,q_mu0_obs,e_mu0_obs,y1_l,e1_u,flags");
  const std::string manifest = slurp(d.path / "keyrate_tf.manifest.json");
  EXPECT_NE(manifest.find("\"fnv1a64\""), std::string::npos);
  EXPECT_NE(manifest.find("\"config\""), std::string::npos);
}

TEST(Cli, InfeasibleBoundsExitThree) {
  TempDir d;
  std::ofstream(d.path / "cfg.json") << R"({"intensities": {"mu0": 8}})";
  const std::string args = "--config \"" + (d.path / "cfg.json").string() + "\" --out \"" + d.path.string() +
                           "\" keyrate tf --sweep distance:300:300:1";
  EXPECT_EQ(run(args), 3);
  EXPECT_TRUE(fs::exists(d.path / "keyrate_tf.csv"));
}

TEST(Cli, ConfigFromEnvironment) {
  TempDir d;
  std::ofstream(d.path / "cfg.json") << R"({"intensities": {"mu1": 1e-4}})";
  const std::string env = "WSATTACK_CONFIG=\"" + (d.path / "cfg.json").string() + "\" ";
  const std::string cmd = env + "\"" + WSATTACK_CLI + "\" --out \"" + d.path.string() + "\" keyrate tf >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST(Cli, ValidateConfigReportsEveryProblem) {
  TempDir d;
  std::ofstream(d.path / "cfg.json") << R"({"intensities": {"mu1": 1e-4}, "attack": {"f_aom2_mhz": 160}})";
  const fs::path log = d.path / "log.txt";
  EXPECT_EQ(run("validate-config \"" + (d.path / "cfg.json").string() + "\"", log), 2);
  const std::string out = slurp(log);
  EXPECT_NE(out.find("mu1 > mu2"), std::string::npos) << out;
  EXPECT_NE(out.find("lock limit"), std::string::npos) << out;

  std::ofstream(d.path / "broken.json") << "{\n  \"channel\": {,\n}\n";
  EXPECT_EQ(run("validate-config \"" + (d.path / "broken.json").string() + "\"", log), 2);
  EXPECT_NE(slurp(log).find(":2"), std::string::npos);

  EXPECT_EQ(run(std::string("validate-config \"") + WSATTACK_SOURCE_DIR + "/config/default.json\""), 0);
}

TEST(Cli, OpllSimulateIsSeeded) {
  TempDir a, b, c;
  ASSERT_EQ(run("--seed 7 --out \"" + a.path.string() + "\" opll simulate --duration 200"), 0);
  ASSERT_EQ(run("--seed 7 --out \"" + b.path.string() + "\" opll simulate --duration 200"), 0);
  ASSERT_EQ(run("--seed 8 --out \"" + c.path.string() + "\" opll simulate --duration 200"), 0);
  EXPECT_EQ(slurp(a.path / "opll_trace.csv"), slurp(b.path / "opll_trace.csv"));
  EXPECT_NE(slurp(a.path / "opll_trace.csv"), slurp(c.path / "opll_trace.csv"));
  const std::string spectrum = slurp(a.path / "opll_spectrum.csv");
  EXPECT_NE(spectrum.find("\n112,"), std::string::npos) << spectrum;
  EXPECT_NE(spectrum.find("\n142,"), std::string::npos) << spectrum;
}

TEST(Cli, RerunVerifiesChecksums) {
  TempDir d;
  ASSERT_EQ(run("--out \"" + d.path.string() + "\" reproduce fig4"), 0);
  const fs::path log = d.path / "log.txt";
  EXPECT_EQ(run("rerun \"" + (d.path / "fig4.manifest.json").string() + "\"", log), 0);
  EXPECT_NE(slurp(log).find("match"), std::string::npos);

  // Tamper with the recorded checksum.
  std::string m = slurp(d.path / "fig4.manifest.json");
  const auto pos = m.find("\"fnv1a64\": \"");
  ASSERT_NE(pos, std::string::npos);
  m[pos + 12] = m[pos + 12] == '0' ? '1' : '0';
  std::ofstream(d.path / "fig4.manifest.json", std::ios::trunc) << m;
  EXPECT_EQ(run("rerun \"" + (d.path / "fig4.manifest.json").string() + "\"", log), 1);
  EXPECT_NE(slurp(log).find("MISMATCH"), std::string::npos);
}

TEST(Cli, AomCalibrate) {
  TempDir d;
  ASSERT_EQ(run("--out \"" + d.path.string() + "\" aom calibrate"), 0);
  const std::string cal = slurp(d.path / "aom_calibration.csv");
  EXPECT_NE(cal.find("15,195,3.58"), std::string::npos) << cal;
}
