// closedform.hpp — analytic frequency response, bright/dark amplitudes,
// conversion efficiency, and the two dark-mode-breaking conditions.
#pragma once

#include "darkline/model.hpp"

namespace darkline {

/// Response bundle at one detuning delta:
///   a — cavity back-action sum      G1^2/e1 + G2^2/e2
///   b — loss-asymmetry mixing term  G1 G2 (1/e1 - 1/e2)
///   d — effective mechanical response of the configured scheme
/// with e_i = kappa_i/2 - i*delta. For WeakDrive, d absorbs the auxiliary
/// cavity (extra G3^2/e3 damping); for Parametric, d absorbs the pump-induced
/// upper-sideband feedback (-|lambda|^2 / (gamma_m/2 - i delta + a)).
struct SusceptibilityTriple {
  Complex a;
  Complex b;
  Complex d;
};

/// Steady amplitudes of the cavity bright and dark superpositions.
struct BrightDarkAmplitudes {
  Complex alpha_b;
  Complex alpha_d;
  int scheme_tag = 0;  ///< 0 baseline, 1 weak_drive, 2 parametric
};

[[nodiscard]] SusceptibilityTriple susceptibilities(const SchemeConfig& config,
                                                    double delta);

/// Analytic bright/dark response at detuning delta (no matrix solve).
/// Requires a nonzero total coupling and a nondegenerate denominator a+d.
[[nodiscard]] BrightDarkAmplitudes bright_dark_closed_form(const SchemeConfig& config,
                                                           double delta);

/// Two-photon-resonance (delta = 0) reductions written purely in terms of
/// cooperativities and eta factors; an independent path from
/// bright_dark_closed_form for cross-checking.
[[nodiscard]] BrightDarkAmplitudes special_case_delta0(const SchemeConfig& config);

/// Peak photon-number conversion efficiency mode1 -> mode2 at delta = 0.
/// Baseline: eta1 eta2 4 C1 C2 / (1 + C1 + C2)^2.
/// WeakDrive / Parametric (conditions applied): eta1 eta2 4 C1 C2 / (C1 + C2)^2.
[[nodiscard]] double efficiency_closed_form(const SchemeConfig& config);

/// Auxiliary tone amplitude that nulls the bright mode at delta = 0
/// (WeakDrive only). Scales as (1+C3)/g3 and inherits the signal phase.
[[nodiscard]] Complex solve_weak_drive_condition(const SchemeConfig& config);

/// Pump strength lambda* = (gamma_m/2) sqrt(1 + C1 + C2) that nulls the bright
/// mode at delta = 0 (Parametric only). Always below the instability threshold.
[[nodiscard]] double solve_parametric_condition(const SchemeConfig& config);

}  // namespace darkline
