#include "darkline/model.hpp"

#include <algorithm>
#include <cmath>

namespace darkline {

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Baseline:   return "baseline";
    case SchemeKind::WeakDrive:  return "weak_drive";
    case SchemeKind::Parametric: return "parametric";
  }
  throw ConfigError("unknown scheme kind");
}

namespace {

void check_finite(double value, const std::string& what) {
  if (!std::isfinite(value)) throw ConfigError(what + " must be finite");
}

void check_mode(const OpticalMode& mode, const std::string& name) {
  check_finite(mode.kappa, name + ".kappa");
  check_finite(mode.kappa_ext, name + ".kappa_ext");
  if (mode.kappa <= 0.0) throw ConfigError(name + ".kappa must be > 0");
  if (mode.kappa_ext <= 0.0) throw ConfigError(name + ".kappa_ext must be > 0");
  if (mode.kappa_ext > mode.kappa)
    throw ConfigError(name + ".kappa_ext must not exceed " + name + ".kappa");
}

void check_coupling(const Coupling& coupling, const std::string& name) {
  check_finite(coupling.g, name + ".g");
  if (coupling.g < 0.0) throw ConfigError(name + ".g must be >= 0");
}

void check_tone(const DriveTone& tone, const std::string& name) {
  check_finite(tone.amplitude.real(), name + ".amplitude");
  check_finite(tone.amplitude.imag(), name + ".amplitude");
  check_finite(tone.delta, name + ".delta");
}

}  // namespace

void SchemeConfig::validate() const {
  check_mode(mode1, "mode1");
  check_mode(mode2, "mode2");
  check_finite(mech.gamma_m, "mech.gamma_m");
  if (mech.gamma_m <= 0.0) throw ConfigError("mech.gamma_m must be > 0");
  check_coupling(g1, "g1");
  check_coupling(g2, "g2");
  check_tone(signal, "signal");
  check_finite(lambda.real(), "lambda");
  check_finite(lambda.imag(), "lambda");

  const bool has_aux = mode3.has_value() || g3.has_value() || aux_drive.has_value();

  switch (kind) {
    case SchemeKind::Baseline:
      if (has_aux) throw ConfigError("baseline scheme takes no auxiliary mode");
      if (lambda != Complex{0.0, 0.0})
        throw ConfigError("baseline scheme takes no parametric pump");
      break;
    case SchemeKind::WeakDrive:
      if (!mode3 || !g3 || !aux_drive)
        throw ConfigError("weak_drive scheme requires mode3, g3 and aux_drive");
      check_mode(*mode3, "mode3");
      check_coupling(*g3, "g3");
      check_tone(*aux_drive, "aux_drive");
      if (aux_drive->delta != signal.delta)
        throw ConfigError("aux_drive.delta must equal signal.delta");
      if (lambda != Complex{0.0, 0.0})
        throw ConfigError("weak_drive scheme takes no parametric pump");
      break;
    case SchemeKind::Parametric:
      if (has_aux) throw ConfigError("parametric scheme takes no auxiliary mode");
      break;
  }
}

double SchemeConfig::max_rate() const {
  double rate = std::max({mode1.kappa, mode2.kappa, mech.gamma_m, g1.g, g2.g,
                          std::abs(lambda), std::abs(signal.delta)});
  if (mode3) rate = std::max(rate, mode3->kappa);
  if (g3) rate = std::max(rate, g3->g);
  if (aux_drive) rate = std::max(rate, std::abs(aux_drive->delta));
  return rate;
}

DerivedParams derive(const SchemeConfig& config) {
  config.validate();
  DerivedParams out;
  const double gamma = config.mech.gamma_m;
  out.c1 = 4.0 * config.g1.g * config.g1.g / (gamma * config.mode1.kappa);
  out.c2 = 4.0 * config.g2.g * config.g2.g / (gamma * config.mode2.kappa);
  if (config.kind == SchemeKind::WeakDrive)
    out.c3 = 4.0 * config.g3->g * config.g3->g / (gamma * config.mode3->kappa);
  out.g_total = std::hypot(config.g1.g, config.g2.g);
  if (config.kind == SchemeKind::Parametric)
    out.t = 4.0 * std::norm(config.lambda) / (gamma * gamma * (1.0 + out.c1 + out.c2));
  return out;
}

}  // namespace darkline
