#include "darkline/linsys.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace darkline {

namespace {

Complex eps(double kappa, double delta) { return {kappa / 2.0, -delta}; }

constexpr double kConditionLimit = 1e12;
constexpr double kResidualLimit = 1e-10;

}  // namespace

LinearSystem build_system(const SchemeConfig& config, double delta) {
  config.validate();
  if (!std::isfinite(delta)) throw ConfigError("delta must be finite");

  const double g1 = config.g1.g, g2 = config.g2.g;
  const Complex i{0.0, 1.0};
  LinearSystem sys;

  switch (config.kind) {
    case SchemeKind::Baseline: {
      sys.matrix = Eigen::MatrixXcd::Zero(3, 3);
      sys.drive = Eigen::VectorXcd::Zero(3);
      sys.matrix(0, 0) = eps(config.mode1.kappa, delta);
      sys.matrix(0, 2) = i * g1;
      sys.matrix(1, 1) = eps(config.mode2.kappa, delta);
      sys.matrix(1, 2) = i * g2;
      sys.matrix(2, 0) = i * g1;
      sys.matrix(2, 1) = i * g2;
      sys.matrix(2, 2) = eps(config.mech.gamma_m, delta);
      sys.drive(0) = std::sqrt(config.mode1.kappa_ext) * config.signal.amplitude;
      sys.variable_labels = {"alpha1", "alpha2", "beta"};
      break;
    }
    case SchemeKind::WeakDrive: {
      const double g3 = config.g3->g;
      sys.matrix = Eigen::MatrixXcd::Zero(4, 4);
      sys.drive = Eigen::VectorXcd::Zero(4);
      sys.matrix(0, 0) = eps(config.mode1.kappa, delta);
      sys.matrix(0, 2) = i * g1;
      sys.matrix(1, 1) = eps(config.mode2.kappa, delta);
      sys.matrix(1, 2) = i * g2;
      sys.matrix(2, 0) = i * g1;
      sys.matrix(2, 1) = i * g2;
      sys.matrix(2, 2) = eps(config.mech.gamma_m, delta);
      sys.matrix(2, 3) = i * g3;
      sys.matrix(3, 2) = i * g3;
      sys.matrix(3, 3) = eps(config.mode3->kappa, delta);
      sys.drive(0) = std::sqrt(config.mode1.kappa_ext) * config.signal.amplitude;
      sys.drive(3) = std::sqrt(config.mode3->kappa_ext) * config.aux_drive->amplitude;
      sys.variable_labels = {"alpha1", "alpha2", "beta", "alpha3"};
      break;
    }
    case SchemeKind::Parametric: {
      // Doubled system: the pump couples each field's lower sideband to the
      // conjugated upper sideband of the mechanics; both blocks share the same
      // response denominators at the probe detuning.
      sys.matrix = Eigen::MatrixXcd::Zero(6, 6);
      sys.drive = Eigen::VectorXcd::Zero(6);
      for (int block = 0; block < 2; ++block) {
        const int o = 3 * block;
        const Complex sgn = (block == 0) ? i : -i;
        sys.matrix(o + 0, o + 0) = eps(config.mode1.kappa, delta);
        sys.matrix(o + 0, o + 2) = sgn * g1;
        sys.matrix(o + 1, o + 1) = eps(config.mode2.kappa, delta);
        sys.matrix(o + 1, o + 2) = sgn * g2;
        sys.matrix(o + 2, o + 0) = sgn * g1;
        sys.matrix(o + 2, o + 1) = sgn * g2;
        sys.matrix(o + 2, o + 2) = eps(config.mech.gamma_m, delta);
      }
      sys.matrix(2, 5) = -config.lambda;
      sys.matrix(5, 2) = -std::conj(config.lambda);
      sys.drive(0) = std::sqrt(config.mode1.kappa_ext) * config.signal.amplitude;
      sys.variable_labels = {"alpha1_lower", "alpha2_lower",      "beta_lower",
                             "alpha1_upper_conj", "alpha2_upper_conj", "beta_upper_conj"};
      break;
    }
  }
  return sys;
}

SteadyState solve(const LinearSystem& system) {
  if (system.matrix.rows() != system.matrix.cols() ||
      system.matrix.rows() != system.drive.size())
    throw ConfigError("linear system shape mismatch");

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system.matrix);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kConditionLimit)) {
    std::string labels;
    for (const auto& l : system.variable_labels) labels += (labels.empty() ? "" : ",") + l;
    throw DegenerateError("ill-conditioned system (condition estimate " +
                          std::to_string(rcond > 0 ? 1.0 / rcond : INFINITY) +
                          ") over variables [" + labels + "]");
  }

  SteadyState state;
  state.amplitudes = lu.solve(system.drive);
  state.variable_labels = system.variable_labels;

  const double drive_norm = system.drive.norm();
  if (drive_norm > 0.0) {
    const double residual =
        (system.matrix * state.amplitudes - system.drive).norm() / drive_norm;
    if (!(residual <= kResidualLimit))
      throw DegenerateError("solve residual " + std::to_string(residual) +
                            " exceeds tolerance");
  }
  return state;
}

BrightDarkAmplitudes bright_dark_decompose(const SteadyState& state,
                                           const SchemeConfig& config) {
  const double g1 = config.g1.g, g2 = config.g2.g;
  const double g = std::hypot(g1, g2);
  if (g == 0.0) throw DegenerateError("bright/dark basis undefined: g1 = g2 = 0");
  if (state.amplitudes.size() < 2)
    throw ConfigError("state does not hold two cavity amplitudes");

  BrightDarkAmplitudes out;
  out.alpha_b = (g1 * state.amplitudes(0) + g2 * state.amplitudes(1)) / g;
  out.alpha_d = (g2 * state.amplitudes(0) - g1 * state.amplitudes(1)) / g;
  switch (config.kind) {
    case SchemeKind::Baseline:   out.scheme_tag = 0; break;
    case SchemeKind::WeakDrive:  out.scheme_tag = 1; break;
    case SchemeKind::Parametric: out.scheme_tag = 2; break;
  }
  return out;
}

LinearSystem transform_to_bright_dark_basis(const SchemeConfig& config, double delta) {
  config.validate();
  if (config.kind != SchemeKind::Baseline)
    throw ConfigError("bright/dark rewrite implemented for the baseline scheme");
  if (!std::isfinite(delta)) throw ConfigError("delta must be finite");
  const double g1 = config.g1.g, g2 = config.g2.g;
  const double g = std::hypot(g1, g2);
  if (g == 0.0) throw DegenerateError("bright/dark basis undefined: g1 = g2 = 0");

  const Complex e1 = eps(config.mode1.kappa, delta);
  const Complex e2 = eps(config.mode2.kappa, delta);
  const double gsq = g * g;
  // Detunings cancel in e1 - e2, leaving the pure loss asymmetry.
  const double mixing = g1 * g2 * (config.mode1.kappa - config.mode2.kappa) / (2.0 * gsq);

  LinearSystem sys;
  sys.matrix = Eigen::MatrixXcd::Zero(3, 3);
  sys.drive = Eigen::VectorXcd::Zero(3);
  sys.matrix(0, 0) = (g1 * g1 * e1 + g2 * g2 * e2) / gsq;
  sys.matrix(0, 1) = mixing;
  sys.matrix(1, 0) = mixing;
  sys.matrix(1, 1) = (g2 * g2 * e1 + g1 * g1 * e2) / gsq;
  sys.matrix(0, 2) = Complex{0.0, g};
  sys.matrix(2, 0) = Complex{0.0, g};
  sys.matrix(1, 2) = 0.0;  // dark mode never talks to the mechanics directly
  sys.matrix(2, 1) = 0.0;
  sys.matrix(2, 2) = eps(config.mech.gamma_m, delta);
  const Complex in1 = std::sqrt(config.mode1.kappa_ext) * config.signal.amplitude;
  sys.drive(0) = (g1 / g) * in1;
  sys.drive(1) = (g2 / g) * in1;
  sys.variable_labels = {"alpha_bright", "alpha_dark", "beta"};
  return sys;
}

Eigen::MatrixXcd drift_matrix(const SchemeConfig& config) {
  return -build_system(config, 0.0).matrix;
}

StabilityReport stability(const SchemeConfig& config) {
  const Eigen::MatrixXcd drift = drift_matrix(config);
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(drift, false);
  if (eig.info() != Eigen::Success)
    throw DegenerateError("eigenvalue computation failed");
  StabilityReport report;
  report.slowest_rate = -eig.eigenvalues().real().maxCoeff();
  report.stable = report.slowest_rate > 0.0;
  return report;
}

double locate_instability_threshold(const SchemeConfig& config, double lambda_lo,
                                    double lambda_hi) {
  if (config.kind != SchemeKind::Parametric)
    throw ConfigError("instability threshold applies to the parametric scheme only");
  if (!(lambda_lo >= 0.0) || !(lambda_hi > lambda_lo))
    throw ConfigError("threshold bracket must satisfy 0 <= lo < hi");

  auto rate_at = [&](double lam) {
    SchemeConfig probe = config;
    probe.lambda = Complex{lam, 0.0};
    return stability(probe).slowest_rate;
  };
  if (!(rate_at(lambda_lo) > 0.0) || !(rate_at(lambda_hi) <= 0.0))
    throw DegenerateError("no stability change across the bracket");

  double lo = lambda_lo, hi = lambda_hi;
  for (int iter = 0; iter < 80 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (rate_at(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TransferReport input_output(const SteadyState& state, const SchemeConfig& config) {
  config.validate();
  const Eigen::VectorXcd& x = state.amplitudes;
  const Complex in1 = config.signal.amplitude;
  if (std::norm(in1) == 0.0)
    throw DegenerateError("conversion efficiency undefined for an undriven signal port");

  TransferReport report;
  report.alpha_out1 = in1 - std::sqrt(config.mode1.kappa_ext) * x(0);
  report.alpha_out2 = std::sqrt(config.mode2.kappa_ext) * x(1);
  report.chi = std::norm(report.alpha_out2) / std::norm(in1);

  report.flux_in = std::norm(in1);
  report.flux_out = std::norm(report.alpha_out1) + std::norm(report.alpha_out2);
  report.flux_internal_loss =
      (config.mode1.kappa - config.mode1.kappa_ext) * std::norm(x(0)) +
      (config.mode2.kappa - config.mode2.kappa_ext) * std::norm(x(1));
  report.flux_mechanical = config.mech.gamma_m * std::norm(x(2));

  if (config.kind == SchemeKind::WeakDrive) {
    const Complex in3 = config.aux_drive->amplitude;
    const Complex out3 = in3 - std::sqrt(config.mode3->kappa_ext) * x(3);
    report.alpha_out3 = out3;
    report.flux_in += std::norm(in3);
    report.flux_out += std::norm(out3);
    report.flux_internal_loss +=
        (config.mode3->kappa - config.mode3->kappa_ext) * std::norm(x(3));
  }

  const StabilityReport stab = stability(config);
  report.stable = stab.stable;
  report.slowest_rate = stab.slowest_rate;
  return report;
}

}  // namespace darkline
