#include "darkline/closedform.hpp"

#include <cmath>

namespace darkline {

namespace {

/// Cavity response denominator kappa/2 - i*delta.
Complex eps(double kappa, double delta) { return {kappa / 2.0, -delta}; }

int tag_of(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Baseline:   return 0;
    case SchemeKind::WeakDrive:  return 1;
    case SchemeKind::Parametric: return 2;
  }
  throw ConfigError("unknown scheme kind");
}

}  // namespace

SusceptibilityTriple susceptibilities(const SchemeConfig& config, double delta) {
  config.validate();
  if (!std::isfinite(delta)) throw ConfigError("delta must be finite");
  const Complex e1 = eps(config.mode1.kappa, delta);
  const Complex e2 = eps(config.mode2.kappa, delta);
  const double g1 = config.g1.g, g2 = config.g2.g;

  SusceptibilityTriple s;
  s.a = g1 * g1 / e1 + g2 * g2 / e2;
  s.b = g1 * g2 * (1.0 / e1 - 1.0 / e2);
  const Complex d0 = eps(config.mech.gamma_m, delta);
  switch (config.kind) {
    case SchemeKind::Baseline:
      s.d = d0;
      break;
    case SchemeKind::WeakDrive:
      s.d = d0 + config.g3->g * config.g3->g / eps(config.mode3->kappa, delta);
      break;
    case SchemeKind::Parametric:
      // Upper sideband eliminated exactly: (d0 + a) beta_+* = conj(lambda) beta_-.
      s.d = d0 - std::norm(config.lambda) / (d0 + s.a);
      break;
  }
  return s;
}

BrightDarkAmplitudes bright_dark_closed_form(const SchemeConfig& config, double delta) {
  const SusceptibilityTriple s = susceptibilities(config, delta);
  const double g1 = config.g1.g, g2 = config.g2.g;
  const double g = std::hypot(g1, g2);
  if (g == 0.0) throw DegenerateError("bright/dark basis undefined: g1 = g2 = 0");
  const Complex ad = s.a + s.d;
  if (std::abs(ad) == 0.0)
    throw DegenerateError("degenerate response: a + d = 0 at this detuning");

  const Complex f1 = std::sqrt(config.mode1.kappa_ext) /
                     eps(config.mode1.kappa, delta) * config.signal.amplitude;

  BrightDarkAmplitudes out;
  out.scheme_tag = tag_of(config.kind);
  out.alpha_b = (g1 / g) * (s.d / ad) * f1;
  out.alpha_d = (g2 / g - (g1 / g) * (s.b / ad)) * f1;
  if (config.kind == SchemeKind::WeakDrive) {
    const Complex f3 = std::sqrt(config.mode3->kappa_ext) /
                       eps(config.mode3->kappa, delta) * config.aux_drive->amplitude;
    const double g3 = config.g3->g;
    out.alpha_b -= (g3 / g) * (s.a / ad) * f3;
    out.alpha_d -= (g3 / g) * (s.b / ad) * f3;
  }
  return out;
}

BrightDarkAmplitudes special_case_delta0(const SchemeConfig& config) {
  const DerivedParams p = derive(config);
  const double g1 = config.g1.g, g2 = config.g2.g, g = p.g_total;
  if (g == 0.0) throw DegenerateError("bright/dark basis undefined: g1 = g2 = 0");
  const double c1 = p.c1, c2 = p.c2, c3 = p.c3;
  // Ratio of cavity linewidths enters the dark amplitude through the
  // loss-asymmetry term b(0).
  const double u = config.mode1.kappa / config.mode2.kappa;
  const Complex f1 = 2.0 * std::sqrt(config.mode1.eta() / config.mode1.kappa) *
                     config.signal.amplitude;

  BrightDarkAmplitudes out;
  out.scheme_tag = tag_of(config.kind);
  switch (config.kind) {
    case SchemeKind::Baseline: {
      const double den = 1.0 + c1 + c2;
      out.alpha_b = (g1 / g) / den * f1;
      out.alpha_d = (g2 / g) * (1.0 + u * c1 + c2) / den * f1;
      break;
    }
    case SchemeKind::WeakDrive: {
      const double den = 1.0 + c1 + c2 + c3;
      const double g3 = config.g3->g;
      const Complex f3 = 2.0 * std::sqrt(config.mode3->eta() / config.mode3->kappa) *
                         config.aux_drive->amplitude;
      out.alpha_b = (g1 / g) * (1.0 + c3) / den * f1 -
                    (g3 / g) * (c1 + c2) / den * f3;
      out.alpha_d = (g2 / g) * (1.0 + u * c1 + c2 + c3) / den * f1 -
                    (g2 * g3 / (g * g1)) * (c1 - u * c1) / den * f3;
      break;
    }
    case SchemeKind::Parametric: {
      const double den = 1.0 - p.t + c1 + c2;
      if (den == 0.0)
        throw DegenerateError("degenerate response: pump at instability threshold");
      out.alpha_b = (g1 / g) * (1.0 - p.t) / den * f1;
      out.alpha_d = (g2 / g) * (1.0 - p.t + u * c1 + c2) / den * f1;
      break;
    }
  }
  return out;
}

double efficiency_closed_form(const SchemeConfig& config) {
  const DerivedParams p = derive(config);
  const double prefactor = config.mode1.eta() * config.mode2.eta();
  if (config.kind == SchemeKind::Baseline) {
    const double den = 1.0 + p.c1 + p.c2;
    return prefactor * 4.0 * p.c1 * p.c2 / (den * den);
  }
  // Dark-mode-broken schemes, nulling condition applied.
  const double den = p.c1 + p.c2;
  if (den == 0.0)
    throw DegenerateError("conversion efficiency undefined at c1 = c2 = 0");
  return prefactor * 4.0 * p.c1 * p.c2 / (den * den);
}

Complex solve_weak_drive_condition(const SchemeConfig& config) {
  if (config.kind != SchemeKind::WeakDrive)
    throw ConfigError("auxiliary-tone condition applies to the weak_drive scheme only");
  const DerivedParams p = derive(config);
  const double g1 = config.g1.g, g3 = config.g3->g;
  if (g3 == 0.0)
    throw DegenerateError("auxiliary-tone condition diverges at g3 = 0");
  if (p.c1 + p.c2 == 0.0)
    throw DegenerateError("auxiliary-tone condition undefined at c1 = c2 = 0");
  const double ratio =
      (g1 / g3) * (1.0 + p.c3) / (p.c1 + p.c2) *
      std::sqrt(config.mode3->kappa * config.mode1.eta() /
                (config.mode1.kappa * config.mode3->eta()));
  return ratio * config.signal.amplitude;
}

double solve_parametric_condition(const SchemeConfig& config) {
  if (config.kind != SchemeKind::Parametric)
    throw ConfigError("pump condition applies to the parametric scheme only");
  const DerivedParams p = derive(config);
  return 0.5 * config.mech.gamma_m * std::sqrt(1.0 + p.c1 + p.c2);
}

}  // namespace darkline
