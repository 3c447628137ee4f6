// wsattack: command-line front end for the wavelength-switching attack models.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error,
// 3 some sweep point could not certify a key (infeasible decoy bound).

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsattack/attack.hpp"
#include "wsattack/config.hpp"
#include "wsattack/figures.hpp"

namespace fs = std::filesystem;
using namespace wsa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Sweep {
  std::string var;
  double start = 0, stop = 0, step = 1;
  std::vector<double> values() const { return stepped_range(start, stop, step); }
};

Sweep parse_sweep(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) throw UsageError("--sweep expects VAR:START:STOP:STEP, got '" + spec + "'");
  Sweep s;
  s.var = parts[0];
  try {
    s.start = parse_number(parts[1]);
    s.stop = parse_number(parts[2]);
    s.step = parse_number(parts[3]);
    (void)s.values();
  } catch (const std::invalid_argument& e) {
    throw UsageError("--sweep: " + std::string(e.what()));
  }
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Command-line words minus the ones that only locate inputs and outputs.
std::vector<std::string> replayable_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" || a == "--out") {
      ++i;
      continue;
    }
    if (a.rfind("--config=", 0) == 0 || a.rfind("--out=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

struct Session {
  std::vector<std::string> args;
  std::string config_path;
  std::optional<Json> config_override;  // set by rerun
  fs::path out_dir = ".";
  std::uint64_t seed = 1;

  ResolvedConfig config(Preset preset) const {
    if (config_override) return resolve_config(*config_override, preset);
    std::string path = config_path;
    if (path.empty())
      if (const char* env = std::getenv("WSATTACK_CONFIG")) path = env;
    if (path.empty()) return resolve_config(Json::object(), preset);
    return resolve_config(load_config_file(path), preset, fs::path(path).parent_path());
  }

  int emit(const std::string& stem, const std::vector<Dataset>& datasets, const ResolvedConfig& rc) const {
    fs::create_directories(out_dir);
    Json outputs = Json::array();
    unsigned flags = 0;
    for (const auto& d : datasets) {
      const fs::path file = out_dir / (d.name + ".csv");
      d.table.write(file);
      flags |= d.flags;
      outputs.push_back({{"file", d.name + ".csv"},
                         {"rows", d.table.rows()},
                         {"fnv1a64", hex64(fnv1a64(d.table.str()))},
                         {"flags", describe_flags(d.flags)}});
      std::cout << "wrote " << file.string() << " (" << d.table.rows() << " rows)\n";
    }
    Json manifest = Json::object();
    manifest["tool"] = "wsattack";
    manifest["tool_version"] = WSATTACK_VERSION;
    manifest["command"] = replayable_args(args);
    manifest["seed"] = seed;
    manifest["config"] = rc.snapshot;
    manifest["outputs"] = outputs;
    const fs::path mpath = out_dir / (stem + ".manifest.json");
    std::ofstream(mpath, std::ios::binary | std::ios::trunc) << manifest.dump(2) << "\n";

    if (flags & (kFlagEstimatedInfeasible | kFlagTrueInfeasible)) {
      std::cerr << "warning: infeasible decoy bounds at some sweep points (" << describe_flags(flags) << ")\n";
      return kExitInfeasible;
    }
    return kExitOk;
  }
};

struct KeyrateOptions {
  std::string sweep;
  std::optional<double> g;
  std::optional<double> f_delta;
  std::optional<double> length;
};

double resolve_g(const KeyrateOptions& o, const ResolvedConfig& rc) {
  if (o.g && o.f_delta) throw UsageError("--g and --f-delta are mutually exclusive");
  if (o.g) return *o.g;
  if (o.f_delta) return system_gain_factor(*o.f_delta, *o.f_delta, rc.gains);
  return 1.0;
}

int cmd_keyrate(const Session& s, const KeyrateOptions& o, bool sns) {
  const ResolvedConfig rc = s.config(sns ? Preset::sns : Preset::tf);
  const Sweep sw = parse_sweep(o.sweep.empty() ? (sns ? "distance:0:1100:10" : "distance:0:700:10") : o.sweep);
  SystemParams p = rc.system;
  if (o.length) p.channel.length_km = *o.length;
  const std::string name = sns ? "keyrate_sns" : "keyrate_tf";

  if (sw.var == "distance" || sw.var == "L") {
    const double g = resolve_g(o, rc);
    const auto xs = sw.values();
    const std::vector<double> gs(xs.size(), g);
    if (sns) return s.emit(name, {sns_dataset(name, "L_km", sns_distance_sweep(p, g, xs), gs)}, rc);
    return s.emit(name, {tf_dataset(name, "L_km", tf_distance_sweep(p, g, xs), gs, p)}, rc);
  }
  if (sw.var == "f_delta") {
    if (o.g || o.f_delta) throw UsageError("--g/--f-delta conflict with an f_delta sweep");
    std::vector<double> gs;
    std::vector<TfKeyRate> tf_rows;
    std::vector<SnsKeyRate> sns_rows;
    for (double f : sw.values()) {
      const double g = system_gain_factor(f, f, rc.gains);
      gs.push_back(g);
      if (sns) {
        sns_rows.push_back(sns_key_rate(p, g));
        sns_rows.back().sweep_value = f;
      } else {
        tf_rows.push_back(tf_key_rate(p, g));
        tf_rows.back().sweep_value = f;
      }
    }
    if (sns) return s.emit(name, {sns_dataset(name, "f_delta_mhz", sns_rows, gs)}, rc);
    return s.emit(name, {tf_dataset(name, "f_delta_mhz", tf_rows, gs, p)}, rc);
  }
  throw UsageError("keyrate: sweep variable must be 'distance' or 'f_delta', got '" + sw.var + "'");
}

struct AomOptions {
  std::string sweep = "f:0:240:0.5";
  std::optional<double> voltage;
  std::optional<double> frequency;
  std::string v_grid = "v:8:15:0.01";
  std::string f_grid = "f:150:240:0.1";
};

int cmd_aom_attenuation(const Session& s, const AomOptions& o) {
  const ResolvedConfig rc = s.config(Preset::tf);
  const Sweep sw = parse_sweep(o.sweep);
  if (sw.var == "f" || sw.var == "frequency") {
    const double v = o.voltage.value_or(rc.aom.drive.base_v);
    return s.emit("aom_attenuation", {aom_frequency_dataset("aom_attenuation", sw.values(), rc.aom, v)}, rc);
  }
  if (sw.var == "v" || sw.var == "voltage") {
    const double f = o.frequency.value_or(rc.aom.voltage.reference());
    Dataset d{"aom_attenuation", CsvTable({"voltage_v", "f_aom_mhz", "table_attenuation_db", "model_attenuation_db",
                                           "clamped"}),
              kFlagNone};
    for (double v : sw.values()) {
      const TableValue t = attenuation_vs_voltage(v, rc.aom.voltage);
      const TableValue m = rc.aom.attenuation(f, v);
      d.table.row().add(v).add(f).add(t.value).add(m.value).add(t.clamped || m.clamped);
    }
    return s.emit("aom_attenuation", {d}, rc);
  }
  throw UsageError("aom attenuation: sweep variable must be 'f' or 'voltage', got '" + sw.var + "'");
}

int cmd_aom_calibrate(const Session& s, const AomOptions& o) {
  const ResolvedConfig rc = s.config(Preset::tf);
  const auto vs = parse_sweep(o.v_grid).values();
  const auto fs_ = parse_sweep(o.f_grid).values();
  const CalibrationResult cal = calibrate(rc.aom, vs, fs_);
  const AomModel tuned = calibrated(rc.aom, cal);

  Dataset point{"aom_calibration", CsvTable({"voltage_v", "frequency_mhz", "attenuation_db"}), kFlagNone};
  point.table.row().add(cal.voltage_v).add(cal.frequency_mhz).add(cal.attenuation_db);

  // Attack deltas around the calibrated operating point, both shift directions.
  Dataset deltas{"aom_calibrated_deltas",
                 CsvTable({"f_delta_mhz", "delta_down_db", "delta_up_db", "delta_down_uncalibrated_db"}), kFlagNone};
  for (double f : stepped_range(0.0, kLockLimitMhz, 0.5)) {
    const auto& d = tuned.drive;
    const auto& d0 = rc.aom.drive;
    deltas.table.row()
        .add(f)
        .add(combined_attenuation_delta(f, d.base_v, d.high(f), tuned, tuned.center_frequency_mhz, -1))
        .add(combined_attenuation_delta(f, d.base_v, d.high(f), tuned, tuned.center_frequency_mhz, +1))
        .add(combined_attenuation_delta(f, d0.base_v, d0.high(f), rc.aom, rc.aom.center_frequency_mhz, -1));
  }
  return s.emit("aom_calibration", {point, deltas}, rc);
}

int cmd_attack_gain(const Session& s, const std::string& sweep) {
  const ResolvedConfig rc = s.config(Preset::tf);
  const Sweep sw = parse_sweep(sweep);
  if (sw.var != "f_delta") throw UsageError("attack gain: sweep variable must be 'f_delta'");
  return s.emit("attack_gain", {gain_dataset("attack_gain", sw.values(), rc)}, rc);
}

struct OpllOptions {
  std::optional<double> f_delta;
  std::optional<double> rs;
  double duration = 1000.0;
  std::optional<double> halt_at;
};

int cmd_opll(const Session& s, const OpllOptions& o) {
  const ResolvedConfig rc = s.config(Preset::tf);
  AttackConfig attack = rc.attack;
  if (o.f_delta) attack.f_aom2_mhz = attack.f_aom1_mhz - *o.f_delta;
  if (o.rs) attack.switch_rate_khz = *o.rs;
  if (attack.f_delta() > rc.opll.lock_bandwidth_mhz)
    std::cerr << "note: f_delta exceeds the locking bandwidth; the trace will show unlock\n";
  if (rc.opll.beat_power_dbm < rc.opll.min_beat_power_dbm)
    std::cerr << "note: beat power below the FLC minimum; the loop never locks\n";

  const OpllTrace trace = run_opll(rc.opll, attack, rc.aom, rc.gains, {o.duration, s.seed, o.halt_at});
  const auto peaks = heterodyne_spectrum(trace, 0.0, trace.duration_us(), rc.opll.spectrum_resolution_mhz);
  return s.emit("opll", {opll_trace_dataset("opll_trace", trace), spectrum_dataset("opll_spectrum", peaks)}, rc);
}

int cmd_reproduce(const Session& s, const std::string& fig) {
  const auto id = parse_figure_id(fig);
  if (!id) throw UsageError("unknown figure id '" + fig + "' (expected fig2a, fig4, fig5, fig6 or fig7)");
  const ResolvedConfig rc = s.config(figure_preset(*id));
  return s.emit(figure_name(*id), reproduce_figure(*id, rc), rc);
}

int cmd_validate(const Session& s, const std::string& path_arg) {
  std::string path = path_arg.empty() ? s.config_path : path_arg;
  if (path.empty())
    if (const char* env = std::getenv("WSATTACK_CONFIG")) path = env;
  if (path.empty()) throw UsageError("validate-config: no config file given");
  const Diagnostics d = validate_config(fs::path(path));
  for (const auto& msg : d) std::cout << msg << "\n";
  if (d.empty()) std::cout << path << ": ok\n";
  return d.empty() ? kExitOk : kExitUsage;
}

int run(const std::vector<std::string>& args, std::optional<Json> config_override);

int cmd_rerun(const std::string& manifest_path, const std::string& out_override) {
  Json m;
  try {
    m = parse_config_text(read_file(manifest_path), manifest_path);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (!m.contains("command") || !m["command"].is_array() || !m.contains("config"))
    throw UsageError(manifest_path + ": not a wsattack manifest");
  std::vector<std::string> args = m["command"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "rerun") throw UsageError("refusing to replay a rerun manifest");
  const fs::path out = out_override.empty() ? fs::path(manifest_path).parent_path() : fs::path(out_override);
  args.push_back("--out");
  args.push_back(out.empty() ? "." : out.string());
  const int code = run(args, m["config"]);
  if (code != kExitOk && code != kExitInfeasible) return code;

  bool same = true;
  for (const auto& o : m.value("outputs", Json::array())) {
    const fs::path file = (out.empty() ? fs::path(".") : out) / o["file"].get<std::string>();
    const std::string got = hex64(fnv1a64(read_file(file)));
    const bool match = got == o["fnv1a64"].get<std::string>();
    std::cout << (match ? "match    " : "MISMATCH ") << file.string() << "\n";
    same = same && match;
  }
  return same ? code : kExitFailure;
}

int run(const std::vector<std::string>& args, std::optional<Json> config_override) {
  CLI::App app{"Wavelength-switching attack models for OPLL-based twin-field QKD", "wsattack"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", WSATTACK_VERSION);

  Session s;
  s.args = args;
  s.config_override = std::move(config_override);
  std::string out = ".";
  app.add_option("--config", s.config_path, "JSON config file (default: $WSATTACK_CONFIG)");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", s.seed, "RNG seed for stochastic simulations");

  std::function<int()> action;

  auto* keyrate = app.add_subcommand("keyrate", "key-rate sweeps")->require_subcommand(1);
  KeyrateOptions kro;
  for (const bool sns : {false, true}) {
    auto* sub = keyrate->add_subcommand(sns ? "sns" : "tf", sns ? "SNS-TF-QKD rate" : "TF QKD rate");
    sub->add_option("--sweep", kro.sweep, "distance:START:STOP:STEP or f_delta:START:STOP:STEP");
    sub->add_option("--g", kro.g, "system gain factor applied to all intensities");
    sub->add_option("--f-delta", kro.f_delta, "attack shift (MHz) on both stations; g from the gain table");
    sub->add_option("--length", kro.length, "distance (km) for f_delta sweeps");
    sub->callback([&, sns] { action = [&, sns] { return cmd_keyrate(s, kro, sns); }; });
  }

  auto* aom = app.add_subcommand("aom", "AOM model")->require_subcommand(1);
  AomOptions ao;
  auto* att = aom->add_subcommand("attenuation", "attenuation versus frequency or voltage");
  att->add_option("--sweep", ao.sweep, "f:START:STOP:STEP or voltage:START:STOP:STEP");
  att->add_option("--voltage", ao.voltage, "drive voltage for frequency sweeps");
  att->add_option("--frequency", ao.frequency, "modulation frequency for voltage sweeps");
  att->callback([&] { action = [&] { return cmd_aom_attenuation(s, ao); }; });
  auto* cal = aom->add_subcommand("calibrate", "two-step loss-minimising calibration");
  cal->add_option("--v-grid", ao.v_grid, "voltage scan v:START:STOP:STEP");
  cal->add_option("--f-grid", ao.f_grid, "frequency scan f:START:STOP:STEP");
  cal->callback([&] { action = [&] { return cmd_aom_calibrate(s, ao); }; });

  auto* attack = app.add_subcommand("attack", "attack model")->require_subcommand(1);
  std::string gain_sweep = "f_delta:0:30:0.5";
  auto* gain = attack->add_subcommand("gain", "station and system gain versus f_delta");
  gain->add_option("--sweep", gain_sweep, "f_delta:START:STOP:STEP");
  gain->callback([&] { action = [&] { return cmd_attack_gain(s, gain_sweep); }; });

  auto* opll = app.add_subcommand("opll", "OPLL simulation")->require_subcommand(1);
  OpllOptions oo;
  auto* sim = opll->add_subcommand("simulate", "time-domain loop simulation");
  sim->add_option("--f-delta", oo.f_delta, "attack shift (MHz)");
  sim->add_option("--rs", oo.rs, "switching rate (kHz)");
  sim->add_option("--duration", oo.duration, "simulated time (us)");
  sim->add_option("--halt-at", oo.halt_at, "stop switching at this time (us)");
  sim->callback([&] { action = [&] { return cmd_opll(s, oo); }; });

  std::string fig;
  auto* rep = app.add_subcommand("reproduce", "figure datasets");
  rep->add_option("figure", fig, "fig2a | fig4 | fig5 | fig6 | fig7")->required();
  rep->callback([&] { action = [&] { return cmd_reproduce(s, fig); }; });

  std::string vpath;
  auto* val = app.add_subcommand("validate-config", "check a config file against every invariant");
  val->add_option("path", vpath, "config file (default: --config or $WSATTACK_CONFIG)");
  val->callback([&] { action = [&] { return cmd_validate(s, vpath); }; });

  std::string manifest;
  auto* rer = app.add_subcommand("rerun", "replay a manifest and verify its outputs");
  rer->add_option("manifest", manifest, "manifest JSON written next to a CSV")->required();
  rer->callback([&] { action = [&] { return cmd_rerun(manifest, out == "." ? std::string{} : out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  s.out_dir = out;

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameters:\n";
    for (const auto& d : e.diagnostics()) std::cerr << "  " << d << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::nullopt);
}
