// linsys.hpp — frequency-domain linear systems for each scheme: assembly,
// direct solution, bright/dark projections, input-output ledger, stability.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "darkline/closedform.hpp"
#include "darkline/model.hpp"

namespace darkline {

/// M x = v for the rotating-frame steady state at one detuning.
/// Layouts: Baseline (alpha1, alpha2, beta); WeakDrive (alpha1, alpha2, beta,
/// alpha3); Parametric lower then upper sideband
/// (alpha1-, alpha2-, beta-, alpha1+*, alpha2+*, beta+*).
struct LinearSystem {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd drive;
  std::vector<std::string> variable_labels;

  [[nodiscard]] int dimension() const { return static_cast<int>(matrix.rows()); }
};

struct SteadyState {
  Eigen::VectorXcd amplitudes;
  std::vector<std::string> variable_labels;
  double delta = 0.0;
};

/// Spectrum verdict of the homogeneous (drive-free) dynamics.
struct StabilityReport {
  bool stable = false;
  double slowest_rate = 0.0;  ///< min over eigenvalues of -Re; negative if unstable
};

/// Port amplitudes, conversion efficiency, and the photon-flux ledger for one
/// steady state.
struct TransferReport {
  Complex alpha_out1;               ///< reflected signal port
  Complex alpha_out2;               ///< converted output port
  std::optional<Complex> alpha_out3;  ///< auxiliary port (WeakDrive)
  double chi = 0.0;                 ///< |alpha_out2|^2 / |alpha_in1|^2
  double flux_in = 0.0;
  double flux_out = 0.0;
  double flux_internal_loss = 0.0;
  double flux_mechanical = 0.0;
  bool stable = false;
  double slowest_rate = 0.0;
};

[[nodiscard]] LinearSystem build_system(const SchemeConfig& config, double delta);

/// Direct LU solve with a condition gate (errors above 1e12) and a residual
/// check (relative residual must stay below 1e-10).
[[nodiscard]] SteadyState solve(const LinearSystem& system);

/// Projects cavity amplitudes 1 and 2 of a solved state onto the bright/dark
/// superpositions (lower sideband for the parametric scheme).
[[nodiscard]] BrightDarkAmplitudes bright_dark_decompose(const SteadyState& state,
                                                         const SchemeConfig& config);

/// Baseline system rewritten analytically in the (bright, dark, mechanical)
/// basis. The dark-mechanical entry is identically zero; the bright-dark
/// mixing entry is g1 g2 (kappa1 - kappa2) / (2 g^2), detuning-independent.
[[nodiscard]] LinearSystem transform_to_bright_dark_basis(const SchemeConfig& config,
                                                          double delta);

[[nodiscard]] TransferReport input_output(const SteadyState& state,
                                          const SchemeConfig& config);

/// Time-domain generator of the homogeneous dynamics (the negated delta = 0
/// system matrix; doubled 6x6 form for the parametric scheme).
[[nodiscard]] Eigen::MatrixXcd drift_matrix(const SchemeConfig& config);

[[nodiscard]] StabilityReport stability(const SchemeConfig& config);

/// Bisects |lambda| in [lambda_lo, lambda_hi] for the point where the slowest
/// eigenvalue of the parametric drift matrix crosses zero. Requires a sign
/// change across the bracket.
[[nodiscard]] double locate_instability_threshold(const SchemeConfig& config,
                                                  double lambda_lo, double lambda_hi);

}  // namespace darkline
