#include "darkline/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "darkline/closedform.hpp"
#include "darkline/linsys.hpp"

namespace darkline {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int thread_budget(std::size_t points) {
  long requested = 1;
  if (const char* env = std::getenv("DARKLINE_THREADS")) {
    char* end = nullptr;
    requested = std::strtol(env, &end, 10);
    if (end == env || requested < 1) requested = 1;
  }
  requested = std::min<long>(requested, 64);
  return static_cast<int>(std::min<std::size_t>(requested, std::max<std::size_t>(points, 1)));
}

void set_coupling_for_cooperativity(SchemeConfig& config, int which, double coop) {
  double kappa = 0.0;
  Coupling* target = nullptr;
  switch (which) {
    case 1: kappa = config.mode1.kappa; target = &config.g1; break;
    case 2: kappa = config.mode2.kappa; target = &config.g2; break;
    case 3:
      if (!config.mode3 || !config.g3)
        throw ConfigError("parameter path 'c3' needs an auxiliary mode");
      kappa = config.mode3->kappa;
      target = &*config.g3;
      break;
  }
  target->g = 0.5 * std::sqrt(coop * config.mech.gamma_m * kappa);
}

}  // namespace

void apply_parameter_path(SchemeConfig& config, const std::string& path, double value) {
  if (path == "mode1.kappa") { config.mode1.kappa = value; return; }
  if (path == "mode1.kappa_ext") { config.mode1.kappa_ext = value; return; }
  if (path == "mode2.kappa") { config.mode2.kappa = value; return; }
  if (path == "mode2.kappa_ext") { config.mode2.kappa_ext = value; return; }
  if (path == "mode3.kappa" || path == "mode3.kappa_ext") {
    if (!config.mode3) throw ConfigError("parameter path '" + path + "' needs an auxiliary mode");
    (path == "mode3.kappa" ? config.mode3->kappa : config.mode3->kappa_ext) = value;
    return;
  }
  if (path == "mech.gamma_m") { config.mech.gamma_m = value; return; }
  if (path == "g1.g") { config.g1.g = value; return; }
  if (path == "g2.g") { config.g2.g = value; return; }
  if (path == "g3.g") {
    if (!config.g3) throw ConfigError("parameter path 'g3.g' needs an auxiliary mode");
    config.g3->g = value;
    return;
  }
  if (path == "signal.amplitude") { config.signal.amplitude = Complex{value, 0.0}; return; }
  if (path == "aux_drive.amplitude") {
    if (!config.aux_drive)
      throw ConfigError("parameter path 'aux_drive.amplitude' needs an auxiliary drive");
    config.aux_drive->amplitude = Complex{value, 0.0};
    return;
  }
  if (path == "lambda") { config.lambda = Complex{value, 0.0}; return; }
  if (path == "c1") { set_coupling_for_cooperativity(config, 1, value); return; }
  if (path == "c2") { set_coupling_for_cooperativity(config, 2, value); return; }
  if (path == "c3") { set_coupling_for_cooperativity(config, 3, value); return; }
  if (path == "signal.delta" || path == "aux_drive.delta")
    throw ConfigError("parameter path '" + path + "' is swept via the delta grid");
  throw ConfigError("unknown parameter path '" + path + "'");
}

std::string SweepAxis::name() const {
  std::string joined;
  for (const auto& p : paths) joined += (joined.empty() ? "" : "+") + p;
  return joined;
}

std::string format_number(double value) {
  char buffer[40];
  const auto res = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::general, 17);
  return {buffer, res.ptr};
}

namespace {

void check_axis(const SchemeConfig& base, const SweepAxis& axis) {
  if (axis.paths.empty()) throw ConfigError("sweep axis lists no parameter paths");
  for (double v : axis.values)
    if (!std::isfinite(v)) throw ConfigError("sweep axis values must be finite");
  // Resolve every path once up front so unknown names fail before any solve.
  SchemeConfig scratch = base;
  const double probe = axis.values.empty() ? 1.0 : axis.values.front();
  for (const auto& path : axis.paths) apply_parameter_path(scratch, path, probe);
}

struct PointOutput {
  std::vector<SweepRow> rows;
};

PointOutput evaluate_point(const SweepSpec& spec, const std::vector<double>& axis_values) {
  SchemeConfig config = spec.base_config;
  std::size_t cursor = 0;
  for (const auto* axis : {&spec.axis1, &spec.axis2}) {
    if (!axis->has_value()) continue;
    const double value = axis_values[cursor++];
    for (const auto& path : (*axis)->paths) apply_parameter_path(config, path, value);
  }
  config.validate();

  std::optional<Complex> nulling;
  if (spec.apply_nulling) {
    if (config.kind == SchemeKind::WeakDrive) {
      config.aux_drive->amplitude = solve_weak_drive_condition(config);
      nulling = config.aux_drive->amplitude;
    } else {
      config.lambda = Complex{solve_parametric_condition(config), 0.0};
      nulling = config.lambda;
    }
  }

  const bool stable = stability(config).stable;

  PointOutput out;
  out.rows.reserve(spec.delta_grid.size());
  for (double delta : spec.delta_grid) {
    SweepRow row;
    row.axis_values = axis_values;
    row.delta = delta;
    row.stable = stable;
    row.nulling_value = nulling;
    row.abs2_bright = row.abs2_dark = row.chi = kNaN;
    row.flux_in = row.flux_out = row.flux_internal_loss = row.flux_mechanical = kNaN;
    if (stable) {
      const SteadyState state = solve(build_system(config, delta));
      const BrightDarkAmplitudes bd = bright_dark_decompose(state, config);
      const TransferReport report = input_output(state, config);
      row.amplitudes.assign(state.amplitudes.data(),
                            state.amplitudes.data() + state.amplitudes.size());
      row.abs2_bright = std::norm(bd.alpha_b);
      row.abs2_dark = std::norm(bd.alpha_d);
      row.chi = report.chi;
      row.flux_in = report.flux_in;
      row.flux_out = report.flux_out;
      row.flux_internal_loss = report.flux_internal_loss;
      row.flux_mechanical = report.flux_mechanical;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  spec.base_config.validate();
  if (spec.apply_nulling && spec.base_config.kind == SchemeKind::Baseline)
    throw ConfigError("nulling condition applies to weak_drive or parametric schemes");
  if (spec.axis1) check_axis(spec.base_config, *spec.axis1);
  if (spec.axis2) check_axis(spec.base_config, *spec.axis2);
  for (double d : spec.delta_grid)
    if (!std::isfinite(d)) throw ConfigError("delta grid values must be finite");

  SweepResult result;
  result.base_config = spec.base_config;
  result.base_derived = derive(spec.base_config);
  result.apply_nulling = spec.apply_nulling;
  result.outputs = spec.outputs;
  if (spec.axis1) {
    result.axes.push_back(*spec.axis1);
    result.axis_names.push_back(spec.axis1->name());
  }
  if (spec.axis2) {
    result.axes.push_back(*spec.axis2);
    result.axis_names.push_back(spec.axis2->name());
  }
  result.amplitude_labels = build_system(spec.base_config, 0.0).variable_labels;

  const std::size_t n1 = spec.axis1 ? spec.axis1->values.size() : 1;
  const std::size_t n2 = spec.axis2 ? spec.axis2->values.size() : 1;
  const std::size_t points = n1 * n2;
  if (spec.delta_grid.empty() || points == 0) return result;

  std::vector<PointOutput> outputs(points);
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= points) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      try {
        std::vector<double> axis_values;
        if (spec.axis1) axis_values.push_back(spec.axis1->values[index / n2]);
        if (spec.axis2) axis_values.push_back(spec.axis2->values[index % n2]);
        outputs[index] = evaluate_point(spec, axis_values);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int threads = thread_budget(points);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.rows.reserve(points * spec.delta_grid.size());
  for (auto& point : outputs)
    for (auto& row : point.rows) result.rows.push_back(std::move(row));
  return result;
}

namespace {

std::string csv_cell(double value) {
  return std::isnan(value) ? std::string{} : format_number(value);
}

}  // namespace

void write_csv(const SweepResult& result, std::ostream& out) {
  std::vector<std::string> header = result.axis_names;
  header.emplace_back("delta");
  if (result.outputs.amplitudes)
    for (const auto& label : result.amplitude_labels) {
      header.push_back("re_" + label);
      header.push_back("im_" + label);
    }
  if (result.outputs.bright_dark) {
    header.emplace_back("abs2_bright");
    header.emplace_back("abs2_dark");
  }
  if (result.outputs.chi) header.emplace_back("chi");
  if (result.outputs.flux) {
    header.emplace_back("flux_in");
    header.emplace_back("flux_out");
    header.emplace_back("flux_internal_loss");
    header.emplace_back("flux_mechanical");
  }
  if (result.outputs.stability) header.emplace_back("stable");
  if (result.apply_nulling) {
    header.emplace_back("nulling_re");
    header.emplace_back("nulling_im");
  }

  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit(header);

  for (const auto& row : result.rows) {
    std::vector<std::string> cells;
    cells.reserve(header.size());
    for (double v : row.axis_values) cells.push_back(format_number(v));
    cells.push_back(format_number(row.delta));
    if (result.outputs.amplitudes) {
      for (std::size_t k = 0; k < result.amplitude_labels.size(); ++k) {
        if (k < row.amplitudes.size()) {
          cells.push_back(format_number(row.amplitudes[k].real()));
          cells.push_back(format_number(row.amplitudes[k].imag()));
        } else {
          cells.emplace_back();
          cells.emplace_back();
        }
      }
    }
    if (result.outputs.bright_dark) {
      cells.push_back(csv_cell(row.abs2_bright));
      cells.push_back(csv_cell(row.abs2_dark));
    }
    if (result.outputs.chi) cells.push_back(csv_cell(row.chi));
    if (result.outputs.flux) {
      cells.push_back(csv_cell(row.flux_in));
      cells.push_back(csv_cell(row.flux_out));
      cells.push_back(csv_cell(row.flux_internal_loss));
      cells.push_back(csv_cell(row.flux_mechanical));
    }
    if (result.outputs.stability) cells.emplace_back(row.stable ? "1" : "0");
    if (result.apply_nulling) {
      if (row.nulling_value) {
        cells.push_back(format_number(row.nulling_value->real()));
        cells.push_back(format_number(row.nulling_value->imag()));
      } else {
        cells.emplace_back();
        cells.emplace_back();
      }
    }
    emit(cells);
  }
}

void write_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(result, out);
  if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

namespace {

nlohmann::json complex_json(const Complex& z) {
  return {{"re", z.real()}, {"im", z.imag()}};
}

nlohmann::json config_json(const SchemeConfig& config) {
  nlohmann::json j;
  j["kind"] = to_string(config.kind);
  auto mode_json = [](const OpticalMode& m) {
    nlohmann::json mj;
    if (!m.label.empty()) mj["label"] = m.label;
    mj["kappa"] = m.kappa;
    mj["kappa_ext"] = m.kappa_ext;
    return mj;
  };
  j["mode1"] = mode_json(config.mode1);
  j["mode2"] = mode_json(config.mode2);
  j["mech"] = {{"gamma_m", config.mech.gamma_m}};
  j["g1"] = config.g1.g;
  j["g2"] = config.g2.g;
  j["signal"] = {{"amplitude", complex_json(config.signal.amplitude)},
                 {"delta", config.signal.delta}};
  if (config.mode3) j["mode3"] = mode_json(*config.mode3);
  if (config.g3) j["g3"] = config.g3->g;
  if (config.aux_drive)
    j["aux_drive"] = {{"amplitude", complex_json(config.aux_drive->amplitude)},
                      {"delta", config.aux_drive->delta}};
  if (config.kind == SchemeKind::Parametric) j["lambda"] = complex_json(config.lambda);
  return j;
}

}  // namespace

void write_json_summary(const SweepResult& result, std::ostream& out) {
  nlohmann::json j;
  j["scheme"] = to_string(result.base_config.kind);
  j["config"] = config_json(result.base_config);
  j["derived"] = {{"c1", result.base_derived.c1}, {"c2", result.base_derived.c2},
                  {"c3", result.base_derived.c3}, {"g_total", result.base_derived.g_total},
                  {"t", result.base_derived.t}};
  j["apply_nulling"] = result.apply_nulling;
  j["row_count"] = result.rows.size();

  j["axes"] = nlohmann::json::array();
  for (const auto& axis : result.axes)
    j["axes"].push_back({{"name", axis.name()}, {"values", axis.values}});

  std::size_t stable_rows = 0;
  for (const auto& row : result.rows) stable_rows += row.stable ? 1 : 0;
  j["stable_row_count"] = stable_rows;

  if (result.apply_nulling) {
    nlohmann::json nulling = nlohmann::json::array();
    std::vector<double> last_axis;
    bool first = true;
    for (const auto& row : result.rows) {
      if (!row.nulling_value) continue;
      if (!first && row.axis_values == last_axis) continue;  // one entry per grid point
      first = false;
      last_axis = row.axis_values;
      nulling.push_back({{"axis_values", row.axis_values},
                         {"value", complex_json(*row.nulling_value)}});
    }
    j["nulling_values"] = std::move(nulling);
  }

  const SweepRow* min_row = nullptr;
  const SweepRow* max_row = nullptr;
  for (const auto& row : result.rows) {
    if (!row.stable || !std::isfinite(row.chi)) continue;
    if (!min_row || row.chi < min_row->chi) min_row = &row;
    if (!max_row || row.chi > max_row->chi) max_row = &row;
  }
  if (min_row) {
    j["chi"] = {{"min", min_row->chi},
                {"min_at", {{"axis_values", min_row->axis_values}, {"delta", min_row->delta}}},
                {"max", max_row->chi},
                {"max_at", {{"axis_values", max_row->axis_values}, {"delta", max_row->delta}}}};
  } else {
    j["chi"] = nullptr;
  }
  out << j.dump(2) << '\n';
}

void write_json_summary(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_json_summary(result, out);
  if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

SweepSpec parse_sweep_spec(const std::string& json_text, const SchemeConfig& base_config) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string{"sweep spec is not valid JSON: "} + e.what());
  }
  if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");

  static const std::vector<std::string> known_keys = {
      "axis1", "axis2", "delta_grid", "apply_nulling", "outputs"};
  for (const auto& [key, _] : j.items())
    if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end())
      throw ConfigError("sweep spec: unknown key '" + key + "'");

  auto parse_axis = [](const nlohmann::json& aj, const char* which) {
    if (!aj.is_object()) throw ConfigError(std::string{"sweep spec: "} + which + " must be an object");
    SweepAxis axis;
    if (aj.contains("paths")) {
      for (const auto& p : aj.at("paths")) axis.paths.push_back(p.get<std::string>());
    } else if (aj.contains("path")) {
      axis.paths.push_back(aj.at("path").get<std::string>());
    } else {
      throw ConfigError(std::string{"sweep spec: "} + which + " needs 'path' or 'paths'");
    }
    if (!aj.contains("values"))
      throw ConfigError(std::string{"sweep spec: "} + which + " needs 'values'");
    for (const auto& v : aj.at("values")) axis.values.push_back(v.get<double>());
    return axis;
  };

  SweepSpec spec;
  spec.base_config = base_config;
  if (j.contains("axis1")) spec.axis1 = parse_axis(j.at("axis1"), "axis1");
  if (j.contains("axis2")) {
    if (!spec.axis1) throw ConfigError("sweep spec: axis2 given without axis1");
    spec.axis2 = parse_axis(j.at("axis2"), "axis2");
  }

  if (!j.contains("delta_grid")) throw ConfigError("sweep spec: missing 'delta_grid'");
  const auto& dg = j.at("delta_grid");
  if (dg.is_array()) {
    for (const auto& v : dg) spec.delta_grid.push_back(v.get<double>());
  } else if (dg.is_object()) {
    const double lo = dg.at("min").get<double>();
    const double hi = dg.at("max").get<double>();
    const auto count = dg.at("count").get<long long>();
    if (count < 1) throw ConfigError("sweep spec: delta_grid.count must be >= 1");
    for (long long k = 0; k < count; ++k)
      spec.delta_grid.push_back(
          count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
  } else {
    throw ConfigError("sweep spec: delta_grid must be an array or {min,max,count}");
  }

  if (j.contains("apply_nulling")) spec.apply_nulling = j.at("apply_nulling").get<bool>();

  if (j.contains("outputs")) {
    spec.outputs = OutputSelection{false, false, false, false, false};
    for (const auto& o : j.at("outputs")) {
      const auto name = o.get<std::string>();
      if (name == "amplitudes") spec.outputs.amplitudes = true;
      else if (name == "bright_dark") spec.outputs.bright_dark = true;
      else if (name == "chi") spec.outputs.chi = true;
      else if (name == "flux") spec.outputs.flux = true;
      else if (name == "stability") spec.outputs.stability = true;
      else throw ConfigError("sweep spec: unknown output '" + name + "'");
    }
  }
  return spec;
}

}  // namespace darkline
