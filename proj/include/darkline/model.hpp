// model.hpp — scheme configuration types, validation, derived dimensionless parameters.
#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace darkline {

using Complex = std::complex<double>;

// ---- errors ----

/// Configuration violates a structural invariant (negative rate, missing block, ...).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters are individually valid but the requested quantity is degenerate
/// (singular system, vanishing total coupling, undefined efficiency, ...).
class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---- configuration ----

enum class SchemeKind { Baseline, WeakDrive, Parametric };

[[nodiscard]] std::string to_string(SchemeKind kind);

/// One cavity mode: total linewidth kappa and its externally coupled share.
struct OpticalMode {
  std::string label;
  double kappa = 0.0;      ///< total decay rate, > 0
  double kappa_ext = 0.0;  ///< external coupling, 0 < kappa_ext <= kappa

  [[nodiscard]] double eta() const { return kappa_ext / kappa; }
  bool operator==(const OpticalMode&) const = default;
};

struct MechanicalOscillator {
  double gamma_m = 0.0;  ///< intrinsic damping rate, > 0
  bool operator==(const MechanicalOscillator&) const = default;
};

/// Linearized beam-splitter coupling rate between one cavity mode and the oscillator.
struct Coupling {
  double g = 0.0;  ///< >= 0
  bool operator==(const Coupling&) const = default;
};

/// Probe tone entering an external port: flux amplitude and detuning from
/// two-photon resonance (all tones of one configuration share the same detuning).
struct DriveTone {
  Complex amplitude{1.0, 0.0};
  double delta = 0.0;
  bool operator==(const DriveTone&) const = default;
};

/// Full description of one conversion scheme instance.
///
/// Baseline:   two cavities + oscillator, cavity 1 driven.
/// WeakDrive:  adds an auxiliary cavity (mode3, g3) with its own weak tone at the
///             signal detuning.
/// Parametric: adds a degenerate parametric pump of strength lambda acting on the
///             oscillator, which couples the two sidebands of every field.
struct SchemeConfig {
  SchemeKind kind = SchemeKind::Baseline;
  OpticalMode mode1;
  OpticalMode mode2;
  MechanicalOscillator mech;
  Coupling g1;
  Coupling g2;
  DriveTone signal;  ///< tone on mode 1's external port

  std::optional<OpticalMode> mode3;   ///< WeakDrive only
  std::optional<Coupling> g3;         ///< WeakDrive only
  std::optional<DriveTone> aux_drive; ///< WeakDrive only; delta must equal signal.delta

  Complex lambda{0.0, 0.0};  ///< Parametric only; zero otherwise

  /// Throws ConfigError on any structural violation.
  void validate() const;

  /// Largest rate in the problem (decay, coupling, pump, |detuning|); sets
  /// integration step scales.
  [[nodiscard]] double max_rate() const;

  bool operator==(const SchemeConfig&) const = default;
};

/// Dimensionless summary of a configuration.
struct DerivedParams {
  double c1 = 0.0;       ///< 4 g1^2 / (gamma_m kappa_1)
  double c2 = 0.0;       ///< 4 g2^2 / (gamma_m kappa_2)
  double c3 = 0.0;       ///< 0 unless WeakDrive
  double g_total = 0.0;  ///< sqrt(g1^2 + g2^2)
  double t = 0.0;        ///< 4|lambda|^2 / (gamma_m^2 (1+c1+c2)); 0 unless Parametric
};

/// Validates, then computes cooperativities and the pump strength ratio.
[[nodiscard]] DerivedParams derive(const SchemeConfig& config);

}  // namespace darkline
