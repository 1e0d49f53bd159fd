// timedomain.hpp — fixed-step RK4 evolution of the rotating-frame equations;
// independent oracle for the frequency-domain solutions.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "darkline/model.hpp"

namespace darkline {

/// Integration controls. Non-positive step/horizon select the defaults
/// 0.01 / max_rate and 20 / slowest_decay_rate; the horizon default requires a
/// stable configuration.
struct IntegrationSpec {
  double step = 0.0;
  double horizon = 0.0;
  int record_stride = 16;  ///< keep every n-th step in the recorded trajectory
};

/// Recorded evolution. States are the physical amplitudes (alpha1, alpha2,
/// beta[, alpha3]); the final envelope is state(T) * exp(+i delta T), which for
/// single-tone schemes converges to the frequency-domain solution. For the
/// parametric scheme a two-tone fit over the trailing window also recovers the
/// upper-sideband component when the window resolves it.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
  std::vector<std::string> variable_labels;

  double final_time = 0.0;
  Eigen::VectorXcd final_state;
  Eigen::VectorXcd final_envelope;

  bool converged = false;                       ///< trailing envelope settled to 1e-8
  std::optional<double> diverged_at;            ///< norm blew past 1e12 at this time
  std::optional<Eigen::VectorXcd> upper_component;  ///< parametric two-tone fit
};

/// Evolves from the vacuum (zero) initial state.
[[nodiscard]] Trajectory integrate(const SchemeConfig& config,
                                   const IntegrationSpec& spec);

/// Evolves from a caller-supplied initial state (dimension must match the
/// scheme: 3, or 4 for the auxiliary-cavity scheme).
[[nodiscard]] Trajectory integrate_from(const SchemeConfig& config,
                                        const IntegrationSpec& spec,
                                        const Eigen::VectorXcd& initial);

}  // namespace darkline
