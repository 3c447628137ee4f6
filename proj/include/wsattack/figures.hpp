#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsattack/config.hpp"
#include "wsattack/csv.hpp"
#include "wsattack/keyrate_sns.hpp"
#include "wsattack/keyrate_tf.hpp"
#include "wsattack/opll.hpp"

namespace wsa {

/// start, start + step, ... up to stop inclusive (with a small tolerance so
/// that stop is hit despite rounding). Throws on step <= 0 or stop < start.
std::vector<double> stepped_range(double start, double stop, double step);

/// One CSV output of a command.
struct Dataset {
  std::string name;  // file stem, e.g. "fig5"
  CsvTable table;
  unsigned flags = kFlagNone;
};

// Column contracts of the sweep tables. The first column is the sweep
// variable (L_km or f_delta_mhz).
Dataset tf_dataset(std::string name, const std::string& sweep_column, const std::vector<TfKeyRate>& rows,
                   const std::vector<double>& g, const SystemParams& params);
Dataset sns_dataset(std::string name, const std::string& sweep_column, const std::vector<SnsKeyRate>& rows,
                    const std::vector<double>& g);
Dataset gain_dataset(std::string name, const std::vector<double>& f_deltas, const ResolvedConfig& rc);
Dataset aom_frequency_dataset(std::string name, const std::vector<double>& freqs, const AomModel& aom,
                              double voltage_v);
Dataset opll_trace_dataset(std::string name, const OpllTrace& trace);
Dataset spectrum_dataset(std::string name, const std::vector<SpectralPeak>& peaks);

enum class FigureId { fig2a, fig4, fig5, fig6, fig7 };

std::optional<FigureId> parse_figure_id(std::string_view s);
const char* figure_name(FigureId id);
/// fig7 is evaluated on the SNS preset, everything else on the TF preset.
Preset figure_preset(FigureId id);

/// Runs the parameter recipe of a figure:
///   fig2a  analytic AOM attenuation over 0-240 MHz (0.5 MHz steps)
///   fig4   gain-table knots
///   fig5   TF rates over distance, g = 1 and g = 1.087, with PLOB
///   fig6   TF rates at 560 km across the gain-table knots
///   fig7   SNS rates over 0-1100 km, g = 1 and g = 1.087
std::vector<Dataset> reproduce_figure(FigureId id, const ResolvedConfig& rc);

}  // namespace wsa
