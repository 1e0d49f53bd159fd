// verify.hpp — randomized oracle suite shared by the unit tests, the
// acceptance runner, and the CLI's verify command.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "darkline/model.hpp"

namespace darkline::verify {

/// Sampling law for random configurations (all rates relative to gamma_m = 1).
struct RandomProfile {
  double rate_log10_min = -3.0;  ///< kappa decades
  double rate_log10_max = 3.0;
  double coop_log10_min = -3.0;  ///< cooperativity decades (cap 1e3)
  double coop_log10_max = 3.0;
  double eta_min = 0.05;
  double eta_max = 1.0;
  double pump_fraction_max = 0.9;  ///< |lambda| as a fraction of the instability threshold
};

/// Full six-decade profile used for frequency-domain properties.
[[nodiscard]] RandomProfile full_profile();

/// Stiffness-bounded profile for fixed-step time-domain work
/// (kappa in [0.5, 20], C in [0.1, 10], eta in [0.3, 1]).
[[nodiscard]] RandomProfile moderate_profile();

[[nodiscard]] SchemeConfig random_config(SchemeKind kind, std::mt19937_64& rng,
                                         const RandomProfile& profile);

/// Symmetric detuning grid spanning [-span_factor, +span_factor] times the
/// largest cavity linewidth.
[[nodiscard]] std::vector<double> delta_grid_for(const SchemeConfig& config, int count,
                                                 double span_factor = 5.0);

// ---- metric helpers ----
// Each returns the observed error/ratio; callers own the thresholds.

/// Relative deviation between the analytic bright/dark response and the
/// direct matrix solve at one detuning.
[[nodiscard]] double closed_vs_solve_error(const SchemeConfig& config, double delta);

/// Relative deviation between the two independent delta = 0 code paths.
[[nodiscard]] double dual_path_delta0_error(const SchemeConfig& config);

/// Relative photon-flux ledger imbalance at one detuning.
[[nodiscard]] double flux_imbalance(const SchemeConfig& config, double delta);

/// Applies the scheme's nulling condition, solves at delta = 0, and returns
/// |alpha_B| / |alpha_D|.
[[nodiscard]] double nulling_ratio(SchemeConfig config);

/// Parametric scheme at the nulling pump: |beta_lower| / ||state|| at delta=0.
[[nodiscard]] double beta_fraction_at_null(SchemeConfig config);

/// Relative deviation of the full numeric conversion efficiency (delta = 0,
/// conditions applied for the pure schemes) from the closed-form value.
[[nodiscard]] double efficiency_path_error(SchemeConfig config);

/// Relative deviation of the final demodulated RK4 envelope from the
/// frequency-domain steady state (two-tone reconstruction for parametric).
[[nodiscard]] double time_frequency_error(const SchemeConfig& config);

/// Worst eigenvalue mismatch (relative) between the bright/dark-basis matrix
/// and the original baseline system over a few detunings.
[[nodiscard]] double transform_eigenvalue_error(const SchemeConfig& config);

/// Relative deviation of the bisection-located instability point from
/// gamma_m (1 + C1 + C2) / 2.
[[nodiscard]] double threshold_relative_error(const SchemeConfig& config);

/// Least-squares convergence order of the integrator over one decade of step
/// sizes on a fixed detuned reference problem.
[[nodiscard]] double rk4_order_estimate();

// ---- suite ----

struct PropertyResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  bool bound_is_minimum = false;  ///< pass means observed >= bound
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int samples = 100;                     ///< random configs per property per scheme
  std::optional<SchemeConfig> scenario;  ///< restrict the checks to one configuration
};

/// Runs every applicable property; deterministic for fixed (seed, samples).
[[nodiscard]] std::vector<PropertyResult> run_suite(const SuiteOptions& options);

}  // namespace darkline::verify
