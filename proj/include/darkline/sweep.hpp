// sweep.hpp — parameter-sweep / spectrum engine with CSV and JSON outputs.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "darkline/model.hpp"

namespace darkline {

/// One sweep axis: every listed parameter path is driven by the same value.
/// Paths are dotted config fields ("mode1.kappa", "g1.g", "lambda",
/// "signal.amplitude", "aux_drive.amplitude"); the virtual paths c1|c2|c3 set
/// the corresponding coupling to hit a requested cooperativity against the
/// config's current gamma_m and kappa.
struct SweepAxis {
  std::vector<std::string> paths;
  std::vector<double> values;

  [[nodiscard]] std::string name() const;  ///< paths joined with '+'
};

/// Column families to emit; the stable flag is controlled by `stability`.
struct OutputSelection {
  bool amplitudes = true;
  bool bright_dark = true;
  bool chi = true;
  bool flux = true;
  bool stability = true;
};

struct SweepSpec {
  SchemeConfig base_config;
  std::optional<SweepAxis> axis1;
  std::optional<SweepAxis> axis2;
  std::vector<double> delta_grid;
  bool apply_nulling = false;  ///< re-solve the scheme's nulling condition per grid point
  OutputSelection outputs;
};

/// One grid point at one detuning. Unstable points keep their axis
/// coordinates and stable=false but carry no amplitudes (numeric fields NaN).
struct SweepRow {
  std::vector<double> axis_values;
  double delta = 0.0;
  bool stable = false;
  std::vector<Complex> amplitudes;
  double abs2_bright = 0.0;
  double abs2_dark = 0.0;
  double chi = 0.0;
  double flux_in = 0.0;
  double flux_out = 0.0;
  double flux_internal_loss = 0.0;
  double flux_mechanical = 0.0;
  std::optional<Complex> nulling_value;  ///< condition solver output, if applied
};

/// Rows in row-major (axis1, axis2, delta) order plus the metadata the
/// writers need.
struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<std::string> axis_names;
  std::vector<std::string> amplitude_labels;
  std::vector<SweepRow> rows;
  SchemeConfig base_config;
  DerivedParams base_derived;
  bool apply_nulling = false;
  OutputSelection outputs;
};

/// Evaluates the grid. Points are independent and may be computed on worker
/// threads (DARKLINE_THREADS caps the count; default 1); row order and values
/// are identical regardless of thread count.
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec);

/// CSV with a header row: axis columns, delta, re_/im_ amplitude pairs,
/// abs2_bright, abs2_dark, chi, flux fields, stable, nulling values. Numbers
/// carry 17 significant digits (round-trippable); NaN cells are left empty.
void write_csv(const SweepResult& result, std::ostream& out);
void write_csv(const SweepResult& result, const std::string& path);

/// Single JSON object: config echo, derived parameters, axes, nulling values
/// used, row counts, and the min/max/argmax of chi over stable rows.
void write_json_summary(const SweepResult& result, std::ostream& out);
void write_json_summary(const SweepResult& result, const std::string& path);

/// Applies one dotted parameter path (including the virtual cooperativity
/// paths) to a config. Unknown paths throw ConfigError naming the path; no
/// validation is performed here (the sweep validates after all paths apply).
void apply_parameter_path(SchemeConfig& config, const std::string& path, double value);

/// Builds a SweepSpec from its JSON description (axes, delta grid either as an
/// explicit array or {"min","max","count"}, apply_nulling, outputs).
[[nodiscard]] SweepSpec parse_sweep_spec(const std::string& json_text,
                                         const SchemeConfig& base_config);

/// 17-significant-digit decimal rendering used by all text output.
[[nodiscard]] std::string format_number(double value);

}  // namespace darkline
