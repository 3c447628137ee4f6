#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wsattack/config.hpp"
#include "wsattack/figures.hpp"
#include "wsattack/keyrate_sns.hpp"
#include "wsattack/keyrate_tf.hpp"
#include "wsattack/opll.hpp"

namespace py = pybind11;
using namespace wsa;

namespace {

Preset preset_of(const std::string& name) {
  if (name == "tf") return Preset::tf;
  if (name == "sns") return Preset::sns;
  throw std::invalid_argument("preset must be 'tf' or 'sns'");
}

// Configs cross the boundary as JSON text; the Python wrapper serialises dicts.
ResolvedConfig resolve(const std::string& config_json, const std::string& preset) {
  const Json patch = config_json.empty() ? Json::object() : parse_config_text(config_json, "<config>");
  return resolve_config(patch, preset_of(preset));
}

py::dict tf_entry(const TfKeyRate& r) {
  py::dict d;
  d["length_km"] = r.sweep_value;
  d["r_estimated"] = r.r_estimated;
  d["r_true"] = r.r_true;
  d["y1_l"] = r.estimated.y1_l;
  d["e1_u"] = r.estimated.e1_u;
  d["y1_l_true"] = r.truth.y1_l;
  d["e1_u_true"] = r.truth.e1_u;
  d["flags"] = describe_flags(r.flags);
  return d;
}

py::dict sns_entry(const SnsKeyRate& r) {
  py::dict d;
  d["length_km"] = r.sweep_value;
  d["r_estimated"] = r.r_estimated;
  d["r_true"] = r.r_true;
  d["s1_l"] = r.estimated.s1_l;
  d["e1_u"] = r.estimated.e1_u;
  d["s1_l_true"] = r.truth.s1_l;
  d["e1_u_true"] = r.truth.e1_u;
  d["e_z"] = r.estimated.e_z;
  d["flags"] = describe_flags(r.flags);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wavelength-switching attack models for twin-field QKD";
  m.attr("__version__") = WSATTACK_VERSION;

  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleBound>(m, "InfeasibleBound", PyExc_RuntimeError);

  m.def("binary_entropy", &binary_entropy, py::arg("x"));
  m.def("phase_slice_error", &phase_slice_error, py::arg("m_slices"));
  m.def("gain_q", &gain_q, py::arg("mu"), py::arg("eta"), py::arg("p_dark"));
  m.def("plob_bound", &plob_bound, py::arg("eta_total"));

  m.def(
      "per_station_gain", [](double f) { return per_station_gain(f, GainTable::measured()); }, py::arg("f_delta_mhz"));
  m.def(
      "system_gain_factor",
      [](double a, double b) { return system_gain_factor(a, b, GainTable::measured()); },
      py::arg("f_delta_alice_mhz"), py::arg("f_delta_bob_mhz"));

  m.def(
      "attenuation_vs_frequency",
      [](double f) { return attenuation_vs_frequency(f, AomPhysics::defaults()); }, py::arg("f_aom_mhz"),
      "Analytic insertion loss (dB) of the default device.");
  m.def(
      "combined_attenuation_delta",
      [](double f_delta, double v_before, double v_after) {
        AomModel model;
        return combined_attenuation_delta(f_delta, v_before, v_after, model, model.center_frequency_mhz);
      },
      py::arg("f_delta_mhz"), py::arg("v_before"), py::arg("v_after"));

  m.def(
      "tf_key_rate",
      [](double length, double g, const std::string& config) {
        return tf_entry(tf_key_rate(resolve(config, "tf").system.with_length(length), g));
      },
      py::arg("length_km"), py::arg("g") = 1.0, py::arg("config_json") = "");
  m.def(
      "sns_key_rate",
      [](double length, double g, const std::string& config) {
        return sns_entry(sns_key_rate(resolve(config, "sns").system.with_length(length), g));
      },
      py::arg("length_km"), py::arg("g") = 1.0, py::arg("config_json") = "");

  m.def(
      "simulate_opll",
      [](double f_delta, double rs_khz, double duration, std::uint64_t seed, const std::string& config) {
        const auto rc = resolve(config, "tf");
        OpllRunOptions opt;
        opt.duration_us = duration;
        opt.seed = seed;
        const auto attack = AttackConfig::from_delta(f_delta, rs_khz, rc.attack.f_aom1_mhz);
        const auto trace = run_opll(rc.opll, attack, rc.aom, rc.gains, opt);
        std::vector<double> t, cmd, pzt, power, beat;
        std::vector<bool> locked;
        for (const auto& s : trace.samples) {
          t.push_back(s.t_us);
          locked.push_back(s.locked);
          cmd.push_back(s.aom_cmd_mhz);
          pzt.push_back(s.pzt_mhz);
          power.push_back(s.power_mw);
          beat.push_back(s.beat_mhz);
        }
        py::list spectrum;
        for (const auto& p : heterodyne_spectrum(trace, 0, trace.duration_us(), rc.opll.spectrum_resolution_mhz))
          spectrum.append(py::make_tuple(p.frequency_mhz, p.power_dbm, p.occupancy));
        py::dict d;
        d["t_us"] = t;
        d["locked"] = locked;
        d["aom_cmd_mhz"] = cmd;
        d["pzt_mhz"] = pzt;
        d["power_mw"] = power;
        d["beat_mhz"] = beat;
        d["spectrum"] = spectrum;
        d["mean_power_excess"] = mean_power_excess(trace);
        return d;
      },
      py::arg("f_delta_mhz") = 30.0, py::arg("rs_khz") = 100.0, py::arg("duration_us") = 1000.0,
      py::arg("seed") = 1, py::arg("config_json") = "");

  m.def(
      "reproduce",
      [](const std::string& figure, const std::string& config) {
        const auto id = parse_figure_id(figure);
        if (!id) throw std::invalid_argument("unknown figure '" + figure + "'");
        const Json patch = config.empty() ? Json::object() : parse_config_text(config, "<config>");
        const auto rc = resolve_config(patch, figure_preset(*id));
        py::dict out;
        for (const auto& d : reproduce_figure(*id, rc)) out[py::str(d.name)] = d.table.str();
        return out;
      },
      py::arg("figure"), py::arg("config_json") = "", "CSV text of each dataset of a figure recipe.");

  m.def(
      "validate_config",
      [](const std::string& config) { return validate_config(parse_config_text(config, "<config>")); },
      py::arg("config_json"), "List of invariant violations; empty when valid.");

  m.def("default_config", [](const std::string& preset) { return default_config(preset_of(preset)).dump(); },
        py::arg("preset") = "tf");
}
