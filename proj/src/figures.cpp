#include "wsattack/figures.hpp"

#include <cmath>
#include <stdexcept>

#include "wsattack/attack.hpp"

namespace wsa {

std::vector<double> stepped_range(double start, double stop, double step) {
  if (!(step > 0) || !std::isfinite(step)) throw std::invalid_argument("range: step must be > 0");
  if (!(stop >= start) || !std::isfinite(start) || !std::isfinite(stop))
    throw std::invalid_argument("range: stop must be >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (n > 10'000'000) throw std::invalid_argument("range: too many points");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

Dataset tf_dataset(std::string name, const std::string& sweep_column, const std::vector<TfKeyRate>& rows,
                   const std::vector<double>& g, const SystemParams& params) {
  const bool by_distance = sweep_column == "L_km";
  std::vector<std::string> header{sweep_column};
  if (!by_distance) header.emplace_back("L_km");
  for (const char* c : {"g", "r_estimated", "r_true", "plob", "q_mu0_obs", "e_mu0_obs", "y1_l", "e1_u", "flags"})
    header.emplace_back(c);
  Dataset d{std::move(name), CsvTable(std::move(header)), kFlagNone};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TfKeyRate& r = rows[i];
    ChannelParams ch = params.channel;
    if (by_distance) ch.length_km = r.sweep_value;
    d.table.row().add(r.sweep_value);
    if (!by_distance) d.table.add(ch.length_km);
    d.table.add(g.at(i))
        .add(r.r_estimated)
        .add(r.r_true)
        .add(plob_bound(link_transmittance(ch)))
        .add(r.estimated.q_mu[0])
        .add(r.estimated.e_mu[0])
        .add(r.estimated.y1_l)
        .add(r.estimated.e1_u)
        .add(describe_flags(r.flags));
    d.flags |= r.flags;
  }
  return d;
}

Dataset sns_dataset(std::string name, const std::string& sweep_column, const std::vector<SnsKeyRate>& rows,
                    const std::vector<double>& g) {
  Dataset d{std::move(name),
            CsvTable({sweep_column, "g", "r_estimated", "r_true", "s1_l", "e1_u", "e_z", "flags"}), kFlagNone};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SnsKeyRate& r = rows[i];
    d.table.row()
        .add(r.sweep_value)
        .add(g.at(i))
        .add(r.r_estimated)
        .add(r.r_true)
        .add(r.estimated.s1_l)
        .add(r.estimated.e1_u)
        .add(r.estimated.e_z)
        .add(describe_flags(r.flags));
    d.flags |= r.flags;
  }
  return d;
}

Dataset gain_dataset(std::string name, const std::vector<double>& f_deltas, const ResolvedConfig& rc) {
  Dataset d{std::move(name), CsvTable({"f_delta_mhz", "station_gain", "system_gain_factor", "physics_gain"}),
            kFlagNone};
  for (double f : f_deltas) {
    d.table.row()
        .add(f)
        .add(per_station_gain(f, rc.gains))
        .add(system_gain_factor(f, f, rc.gains))
        .add(gain_from_physics(f, rc.aom));
  }
  return d;
}

Dataset aom_frequency_dataset(std::string name, const std::vector<double>& freqs, const AomModel& aom,
                              double voltage_v) {
  Dataset d{std::move(name),
            CsvTable({"f_aom_mhz", "efficiency", "analytic_attenuation_db", "model_attenuation_db", "clamped"}),
            kFlagNone};
  for (double f : freqs) {
    const TableValue m = aom.attenuation(f, voltage_v);
    d.table.row()
        .add(f)
        .add(diffraction_efficiency(f, aom.physics))
        .add(attenuation_vs_frequency(f, aom.physics))
        .add(m.value)
        .add(m.clamped);
  }
  return d;
}

Dataset opll_trace_dataset(std::string name, const OpllTrace& trace) {
  Dataset d{std::move(name), CsvTable({"t_us", "locked", "aom_cmd_mhz", "pzt_mhz", "power_mw"}), kFlagNone};
  for (const auto& s : trace.samples)
    d.table.row().add(s.t_us).add(s.locked).add(s.aom_cmd_mhz).add(s.pzt_mhz).add(s.power_mw);
  return d;
}

Dataset spectrum_dataset(std::string name, const std::vector<SpectralPeak>& peaks) {
  Dataset d{std::move(name), CsvTable({"freq_mhz", "power_dbm", "occupancy"}), kFlagNone};
  for (const auto& p : peaks) d.table.row().add(p.frequency_mhz).add(p.power_dbm).add(p.occupancy);
  return d;
}

std::optional<FigureId> parse_figure_id(std::string_view s) {
  if (s == "fig2a") return FigureId::fig2a;
  if (s == "fig4") return FigureId::fig4;
  if (s == "fig5") return FigureId::fig5;
  if (s == "fig6") return FigureId::fig6;
  if (s == "fig7") return FigureId::fig7;
  return std::nullopt;
}

const char* figure_name(FigureId id) {
  switch (id) {
    case FigureId::fig2a: return "fig2a";
    case FigureId::fig4: return "fig4";
    case FigureId::fig5: return "fig5";
    case FigureId::fig6: return "fig6";
    case FigureId::fig7: return "fig7";
  }
  return "?";
}

Preset figure_preset(FigureId id) { return id == FigureId::fig7 ? Preset::sns : Preset::tf; }

namespace {

constexpr double kFigureFDelta = 30.0;

double attacked_g(const ResolvedConfig& rc) { return system_gain_factor(kFigureFDelta, kFigureFDelta, rc.gains); }

template <class Entry>
std::vector<Entry> concat(std::vector<Entry> a, const std::vector<Entry>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::vector<Dataset> reproduce_figure(FigureId id, const ResolvedConfig& rc) {
  switch (id) {
    case FigureId::fig2a:
      return {aom_frequency_dataset("fig2a", stepped_range(0.0, 240.0, 0.5), rc.aom, rc.aom.drive.base_v)};
    case FigureId::fig4: {
      std::vector<double> knots;
      for (const auto& [f, g] : rc.gains.points()) knots.push_back(f);
      return {gain_dataset("fig4", knots, rc)};
    }
    case FigureId::fig5: {
      const auto lengths = stepped_range(0.0, 700.0, 10.0);
      const double g = attacked_g(rc);
      const auto base = tf_distance_sweep(rc.system, 1.0, lengths);
      const auto attacked = tf_distance_sweep(rc.system, g, lengths);
      std::vector<double> gs(lengths.size(), 1.0);
      std::vector<double> ga(lengths.size(), g);
      return {tf_dataset("fig5", "L_km", concat(base, attacked), concat(gs, ga), rc.system)};
    }
    case FigureId::fig6: {
      constexpr double length = 560.0;
      const SystemParams p = rc.system.with_length(length);
      std::vector<TfKeyRate> rows;
      std::vector<double> gs;
      for (const auto& [f, gain] : rc.gains.points()) {
        if (f > kLockLimitMhz) break;
        const double g = system_gain_factor(f, f, rc.gains);
        TfKeyRate r = tf_key_rate(p, g);
        r.sweep_value = f;
        rows.push_back(r);
        gs.push_back(g);
      }
      return {tf_dataset("fig6", "f_delta_mhz", rows, gs, p)};
    }
    case FigureId::fig7: {
      const auto lengths = stepped_range(0.0, 1100.0, 10.0);
      const double g = attacked_g(rc);
      const auto base = sns_distance_sweep(rc.system, 1.0, lengths);
      const auto attacked = sns_distance_sweep(rc.system, g, lengths);
      std::vector<double> gs(lengths.size(), 1.0);
      std::vector<double> ga(lengths.size(), g);
      return {sns_dataset("fig7", "L_km", concat(base, attacked), concat(gs, ga))};
    }
  }
  throw std::invalid_argument("unknown figure id");
}

}  // namespace wsa
