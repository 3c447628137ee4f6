#include "wsattack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "wsattack/csv.hpp"

namespace wsa {

namespace {

// Field lists shared by the reader and the writer. `v(name, member)` is called
// once per scalar field in on-disk order.
template <class V>
void fields(V& v, IntensitySettings& s) {
  v("mu0", s.mu0);
  v("mu1", s.mu1);
  v("mu2", s.mu2);
}

template <class V>
void fields(V& v, ChannelParams& s) {
  v("alpha_db_per_km", s.alpha_db_per_km);
  v("length_km", s.length_km);
  v("eta_det", s.eta_det);
  v("p_dark", s.p_dark);
  v("e_opt", s.e_opt);
}

template <class V>
void fields(V& v, ProtocolParams& s) {
  v("duty_cycle_d", s.duty_cycle_d);
  v("phase_slices_m", s.phase_slices_m);
  v("f_ec", s.f_ec);
  v("n_total", s.n_total);
  v("gamma", s.gamma);
  v("t_delta", s.t_delta);
}

template <class V>
void fields(V& v, SnsModelParams& s) {
  v("send_probability", s.send_probability);
  v("aopp", s.aopp);
}

template <class V>
void fields(V& v, AttackConfig& s) {
  v("f_aom1_mhz", s.f_aom1_mhz);
  v("f_aom2_mhz", s.f_aom2_mhz);
  v("switch_rate_khz", s.switch_rate_khz);
}

template <class V>
void fields(V& v, DriveVoltageResponse& s) {
  v("base_v", s.base_v);
  v("high_offset_v", s.high_offset_v);
  v("low_offset_v", s.low_offset_v);
  v("reference_shift_mhz", s.reference_shift_mhz);
}

template <class V>
void fields(V& v, OpllConfig& s) {
  v("het_center_mhz", s.het_center_mhz);
  v("lock_bandwidth_mhz", s.lock_bandwidth_mhz);
  v("lock_time_us", s.lock_time_us);
  v("flc_response_min_us", s.flc_response_min_us);
  v("flc_response_max_us", s.flc_response_max_us);
  v("pzt_handoff_rate_mhz_per_ms", s.pzt_handoff_rate_mhz_per_ms);
  v("pzt_holdoff_us", s.pzt_holdoff_us);
  v("min_beat_power_dbm", s.min_beat_power_dbm);
  v("beat_power_dbm", s.beat_power_dbm);
  v("timestep_us", s.timestep_us);
  v("fast_switch_success_probability", s.fast_switch_success_probability);
  v("voltage_relax_us", s.voltage_relax_us);
  v("spectrum_resolution_mhz", s.spectrum_resolution_mhz);
  v("power_model", s.power_model);
}

const char* power_model_name(OpllPowerModel m) {
  return m == OpllPowerModel::measured_gain ? "measured_gain" : "aom_physics";
}

struct Writer {
  Json& obj;
  template <class T>
  void operator()(const char* name, const T& value) {
    obj[name] = value;
  }
  void operator()(const char* name, const std::optional<double>& value) {
    obj[name] = value ? Json(*value) : Json(nullptr);
  }
  void operator()(const char* name, const OpllPowerModel& value) { obj[name] = power_model_name(value); }
};

template <class S>
Json to_section(S s) {
  Json obj = Json::object();
  Writer w{obj};
  fields(w, s);
  return obj;
}

std::string type_name(const Json& j) { return j.type_name(); }

struct Reader {
  const Json& obj;
  std::string section;
  std::set<std::string> seen;

  [[noreturn]] void fail(const char* name, const std::string& what) const {
    throw ConfigError(section + "." + name + ": " + what);
  }

  const Json* find(const char* name) {
    seen.insert(name);
    auto it = obj.find(name);
    return it == obj.end() ? nullptr : &*it;
  }

  void operator()(const char* name, double& out) {
    if (const Json* j = find(name)) {
      if (!j->is_number()) fail(name, "expected a number, got " + type_name(*j));
      out = j->get<double>();
    }
  }
  void operator()(const char* name, int& out) {
    if (const Json* j = find(name)) {
      if (!j->is_number_integer()) fail(name, "expected an integer, got " + type_name(*j));
      out = j->get<int>();
    }
  }
  void operator()(const char* name, bool& out) {
    if (const Json* j = find(name)) {
      if (!j->is_boolean()) fail(name, "expected true/false, got " + type_name(*j));
      out = j->get<bool>();
    }
  }
  void operator()(const char* name, std::optional<double>& out) {
    if (const Json* j = find(name)) {
      if (j->is_null()) {
        out.reset();
      } else if (j->is_number()) {
        out = j->get<double>();
      } else {
        fail(name, "expected a number or null, got " + type_name(*j));
      }
    }
  }
  void operator()(const char* name, OpllPowerModel& out) {
    if (const Json* j = find(name)) {
      const std::string s = j->is_string() ? j->get<std::string>() : std::string{};
      if (s == "measured_gain") {
        out = OpllPowerModel::measured_gain;
      } else if (s == "aom_physics") {
        out = OpllPowerModel::aom_physics;
      } else {
        fail(name, "expected \"measured_gain\" or \"aom_physics\"");
      }
    }
  }

  void reject_unknown() const {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!seen.count(it.key())) throw ConfigError(section + ": unknown key '" + it.key() + "'");
  }
};

const Json& section_of(const Json& doc, const char* name) {
  static const Json empty = Json::object();
  auto it = doc.find(name);
  if (it == doc.end() || it->is_null()) return empty;
  if (!it->is_object()) throw ConfigError(std::string(name) + ": expected an object");
  return *it;
}

template <class S>
void read_section(const Json& doc, const char* name, S& out, std::initializer_list<const char*> extra = {}) {
  Reader r{section_of(doc, name), name, {}};
  fields(r, out);
  for (const char* k : extra) r.seen.insert(k);
  r.reject_unknown();
}

Json table_points(std::span<const double> x, std::span<const double> y) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < x.size(); ++i) arr.push_back(Json::array({x[i], y[i]}));
  return arr;
}

std::vector<std::pair<double, double>> read_points(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of [x, y] pairs");
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ConfigError(where + ": each entry must be [number, number]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return pts;
}

Json aom_section(const AomModel& aom, const Json& f_aom0, double efficiency_peak_mhz) {
  Json a = Json::object();
  a["wavelength_nm"] = aom.physics.wavelength_nm;
  a["m2"] = aom.physics.m2;
  a["l_pt_m"] = aom.physics.l_pt_m;
  a["h_pt_m"] = aom.physics.h_pt_m;
  a["f_aom0_mhz"] = f_aom0;
  a["efficiency_peak_mhz"] = efficiency_peak_mhz;
  a["z_m"] = aom.physics.z_m;
  a["delta_aom_db"] = aom.physics.delta_aom_db;
  a["p_in_mw"] = aom.physics.p_in_mw;
  a["center_frequency_mhz"] = aom.center_frequency_mhz;
  a["drive"] = to_section(aom.drive);
  a["voltage_table"] = {{"reference", aom.voltage.reference()},
                        {"points", table_points(aom.voltage.knots(), aom.voltage.values())}};
  if (aom.measured_frequency) {
    a["frequency_table"] = {{"reference", aom.measured_frequency->reference()},
                            {"points", table_points(aom.measured_frequency->knots(), aom.measured_frequency->values())}};
  } else {
    a["frequency_table"] = "analytic";
  }
  return a;
}

// A table is either {"reference": r, "points": [[x, y], ...]} or
// {"reference": r, "csv": "file.csv"}. The frequency table may also be the
// string "analytic" to fall back to the physical model.
std::optional<CalibrationTable> read_calibration(const Json& aom, const char* key, const char* x_col,
                                                 const std::filesystem::path& base_dir) {
  const std::string where = std::string("aom.") + key;
  auto it = aom.find(key);
  if (it == aom.end() || it->is_null()) return std::nullopt;
  if (it->is_string() && it->get<std::string>() == "analytic") return std::nullopt;
  if (!it->is_object()) throw ConfigError(where + ": expected an object or \"analytic\"");
  const Json& t = *it;
  for (auto k = t.begin(); k != t.end(); ++k)
    if (k.key() != "reference" && k.key() != "points" && k.key() != "csv")
      throw ConfigError(where + ": unknown key '" + k.key() + "'");
  if (!t.contains("reference") || !t["reference"].is_number()) throw ConfigError(where + ".reference: expected a number");
  std::vector<std::pair<double, double>> pts;
  if (t.contains("csv") && !t["csv"].is_null()) {
    if (!t["csv"].is_string()) throw ConfigError(where + ".csv: expected a path");
    std::filesystem::path p = t["csv"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    try {
      pts = load_table_csv(p, x_col, "attenuation_db");
    } catch (const std::exception& e) {
      throw ConfigError(where + ".csv: " + e.what());
    }
  } else if (t.contains("points")) {
    pts = read_points(t["points"], where + ".points");
  } else {
    throw ConfigError(where + ": needs 'points' or 'csv'");
  }
  try {
    return CalibrationTable(std::move(pts), t["reference"].get<double>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void read_aom(const Json& doc, AomModel& aom, const std::filesystem::path& base_dir) {
  const Json& s = section_of(doc, "aom");
  static const std::set<std::string> known = {"wavelength_nm", "m2", "l_pt_m", "h_pt_m", "f_aom0_mhz",
                                              "efficiency_peak_mhz", "z_m", "delta_aom_db", "p_in_mw",
                                              "center_frequency_mhz", "drive", "voltage_table", "frequency_table"};
  for (auto it = s.begin(); it != s.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("aom: unknown key '" + it.key() + "'");

  auto num = [&](const char* name, double& out) {
    if (auto it = s.find(name); it != s.end()) {
      if (!it->is_number()) throw ConfigError(std::string("aom.") + name + ": expected a number");
      out = it->get<double>();
    }
  };
  AomPhysics& p = aom.physics;
  num("wavelength_nm", p.wavelength_nm);
  num("m2", p.m2);
  num("l_pt_m", p.l_pt_m);
  num("h_pt_m", p.h_pt_m);
  num("z_m", p.z_m);
  num("delta_aom_db", p.delta_aom_db);
  num("p_in_mw", p.p_in_mw);
  num("center_frequency_mhz", aom.center_frequency_mhz);

  double peak = 195.0;
  num("efficiency_peak_mhz", peak);
  auto f0 = s.find("f_aom0_mhz");
  if (f0 == s.end() || f0->is_null()) {
    p.f_aom0_mhz = fit_f_aom0(p, peak);
  } else {
    if (!f0->is_number()) throw ConfigError("aom.f_aom0_mhz: expected a number or null");
    p.f_aom0_mhz = f0->get<double>();
  }

  Reader r{section_of(s, "drive"), "aom.drive", {}};
  fields(r, aom.drive);
  r.reject_unknown();

  if (auto v = read_calibration(s, "voltage_table", "voltage_v", base_dir)) aom.voltage = *v;
  if (s.contains("frequency_table")) aom.measured_frequency = read_calibration(s, "frequency_table", "frequency_mhz", base_dir);
}

GainTable read_gains(const Json& doc) {
  const Json& s = section_of(doc, "attack");
  auto it = s.find("gain_table");
  if (it == s.end() || it->is_null()) return GainTable::measured();
  try {
    return GainTable(read_points(*it, "attack.gain_table"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("attack.gain_table: ") + e.what());
  }
}

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1, start = 0;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
      start = i + 1;
    } else {
      ++col;
    }
  }
  std::size_t end = text.find('\n', start);
  if (end == std::string::npos) end = text.size();
  std::ostringstream os;
  os << line << ":" << col << ": parse error\n  " << text.substr(start, end - start) << "\n  "
     << std::string(col > 1 ? col - 1 : 0, ' ') << "^";
  return os.str();
}

}  // namespace

Json default_config(Preset preset) {
  SystemParams sys = preset == Preset::sns ? SystemParams::sns_defaults() : SystemParams::tf_defaults();
  AomModel aom;
  AttackConfig attack;
  OpllConfig opll;

  Json doc = Json::object();
  doc["intensities"] = to_section(sys.intensities);
  doc["channel"] = to_section(sys.channel);
  doc["protocol"] = to_section(sys.protocol);
  doc["sns"] = to_section(sys.sns);

  doc["aom"] = aom_section(aom, Json(nullptr), 195.0);

  Json at = to_section(attack);
  Json gains = Json::array();
  const GainTable measured = GainTable::measured();
  for (const auto& [f, g] : measured.points())
    if (f > 0) gains.push_back(Json::array({f, g}));
  at["gain_table"] = gains;
  doc["attack"] = at;
  doc["opll"] = to_section(opll);
  return doc;
}

Json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    Json doc = Json::parse(text, nullptr, true, /*ignore_comments=*/true);
    if (!doc.is_object()) throw ConfigError(origin + ": top level must be an object");
    return doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ":" + line_context(text, e.byte) + "\n  " + e.what());
  }
}

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

namespace {

ResolvedConfig convert(const Json& merged, const std::filesystem::path& base_dir) {
  static const std::set<std::string> sections = {"intensities", "channel", "protocol", "sns",
                                                 "aom",         "attack",  "opll"};
  for (auto it = merged.begin(); it != merged.end(); ++it)
    if (!sections.count(it.key())) throw ConfigError("unknown section '" + it.key() + "'");

  ResolvedConfig rc;
  rc.snapshot = merged;
  read_section(merged, "intensities", rc.system.intensities);
  read_section(merged, "channel", rc.system.channel);
  read_section(merged, "protocol", rc.system.protocol);
  read_section(merged, "sns", rc.system.sns);
  read_section(merged, "attack", rc.attack, {"gain_table"});
  read_section(merged, "opll", rc.opll);
  read_aom(merged, rc.aom, base_dir);
  rc.opll.aom_center_mhz = rc.aom.center_frequency_mhz;
  rc.gains = read_gains(merged);

  // Snapshot is rewritten from the parsed values so that it is complete and
  // stable, and carries the tables themselves so it replays without the CSVs.
  rc.snapshot["intensities"] = to_section(rc.system.intensities);
  rc.snapshot["channel"] = to_section(rc.system.channel);
  rc.snapshot["protocol"] = to_section(rc.system.protocol);
  rc.snapshot["sns"] = to_section(rc.system.sns);
  rc.snapshot["opll"] = to_section(rc.opll);
  Json attack = to_section(rc.attack);
  Json gains = Json::array();
  for (const auto& [f, g] : rc.gains.points())
    if (f > 0) gains.push_back(Json::array({f, g}));
  attack["gain_table"] = gains;
  rc.snapshot["attack"] = attack;
  const Json& merged_aom = section_of(merged, "aom");
  const double peak = merged_aom.contains("efficiency_peak_mhz") ? merged_aom["efficiency_peak_mhz"].get<double>() : 195.0;
  rc.snapshot["aom"] = aom_section(rc.aom, Json(rc.aom.physics.f_aom0_mhz), peak);
  return rc;
}

Diagnostics collect(const ResolvedConfig& rc) {
  Diagnostics d;
  auto append = [&d](Diagnostics more) { d.insert(d.end(), more.begin(), more.end()); };
  append(check(rc.system));
  append(check(rc.aom.physics));
  append(check(rc.attack));
  append(check(rc.opll));
  if (rc.attack.f_delta() > rc.gains.max_f_delta() && rc.attack.f_delta() <= kLockLimitMhz)
    d.push_back("attack: f_delta beyond the last gain table knot");
  return d;
}

}  // namespace

ResolvedConfig resolve_config(const Json& patch, Preset preset, const std::filesystem::path& base_dir) {
  Json merged = default_config(preset);
  merged.merge_patch(patch);
  ResolvedConfig rc = convert(merged, base_dir);
  Diagnostics d = check(rc.system);
  for (auto& m : check(rc.aom.physics)) d.push_back(m);
  for (auto& m : check(rc.opll)) d.push_back(m);
  if (!d.empty()) throw InvalidParameter(d);
  return rc;
}

Diagnostics validate_config(const Json& patch, const std::filesystem::path& base_dir) {
  Json merged = default_config(Preset::tf);
  merged.merge_patch(patch);
  try {
    return collect(convert(merged, base_dir));
  } catch (const ConfigError& e) {
    return {e.what()};
  } catch (const std::invalid_argument& e) {
    return {e.what()};
  }
}

Diagnostics validate_config(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = load_config_file(path);
  } catch (const ConfigError& e) {
    return {e.what()};
  }
  return validate_config(doc, path.parent_path());
}

std::vector<std::pair<double, double>> load_table_csv(const std::filesystem::path& path, const std::string& x_column,
                                                      const std::string& y_column) {
  const CsvDocument doc = read_csv(path);
  const std::size_t xi = doc.column(x_column);
  const std::size_t yi = doc.column(y_column);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    try {
      pts.emplace_back(parse_number(doc.rows[r][xi]), parse_number(doc.rows[r][yi]));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(doc.line_numbers[r]) + ": " + e.what());
    }
  }
  return pts;
}

}  // namespace wsa
