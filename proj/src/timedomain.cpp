#include "darkline/timedomain.hpp"

#include <cmath>
#include <complex>

#include "darkline/linsys.hpp"

namespace darkline {

namespace {

// Stack-allocated state for the RK4 inner loop (largest scheme has 4 fields).
using StateVec = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

constexpr double kDivergenceNorm = 1e12;
constexpr double kSettleTol = 1e-8;

struct Rhs {
  const SchemeConfig* config;
  double delta;

  [[nodiscard]] int dimension() const {
    return config->kind == SchemeKind::WeakDrive ? 4 : 3;
  }

  void operator()(double t, const StateVec& y, StateVec& dy) const {
    const SchemeConfig& c = *config;
    const Complex i{0.0, 1.0};
    const Complex tone = std::exp(Complex{0.0, -delta * t});
    dy(0) = -0.5 * c.mode1.kappa * y(0) - i * c.g1.g * y(2) +
            std::sqrt(c.mode1.kappa_ext) * c.signal.amplitude * tone;
    dy(1) = -0.5 * c.mode2.kappa * y(1) - i * c.g2.g * y(2);
    dy(2) = -0.5 * c.mech.gamma_m * y(2) - i * c.g1.g * y(0) - i * c.g2.g * y(1);
    if (c.kind == SchemeKind::WeakDrive) {
      dy(2) -= i * c.g3->g * y(3);
      dy(3) = -0.5 * c.mode3->kappa * y(3) - i * c.g3->g * y(2) +
              std::sqrt(c.mode3->kappa_ext) * c.aux_drive->amplitude * tone;
    } else if (c.kind == SchemeKind::Parametric) {
      dy(2) += c.lambda * std::conj(y(2));
    }
  }
};

std::vector<std::string> labels_for(const SchemeConfig& config) {
  if (config.kind == SchemeKind::WeakDrive)
    return {"alpha1", "alpha2", "beta", "alpha3"};
  return {"alpha1", "alpha2", "beta"};
}

/// Least-squares fit x(t) ~ p e^{-i delta t} + q e^{+i delta t} over the
/// trailing window; returns max residual norm and fills p, q per component.
double two_tone_fit(const std::vector<double>& times,
                    const std::vector<StateVec>& samples, double delta,
                    StateVec& lower, StateVec& upper) {
  const auto n = static_cast<double>(times.size());
  Complex cross{0.0, 0.0};
  for (double t : times) cross += std::exp(Complex{0.0, 2.0 * delta * t});
  // Gram matrix of the two basis tones; its determinant vanishes when the
  // window cannot separate them.
  const Complex det = n * n - cross * std::conj(cross);

  const int dim = static_cast<int>(samples.front().size());
  lower.resize(dim);
  upper.resize(dim);
  for (int k = 0; k < dim; ++k) {
    Complex r1{0.0, 0.0}, r2{0.0, 0.0};
    for (size_t j = 0; j < times.size(); ++j) {
      const Complex phase = std::exp(Complex{0.0, delta * times[j]});
      r1 += samples[j](k) * phase;             // <e^{-i d t}, x>
      r2 += samples[j](k) * std::conj(phase);  // <e^{+i d t}, x>
    }
    lower(k) = (n * r1 - cross * r2) / det;
    upper(k) = (n * r2 - std::conj(cross) * r1) / det;
  }

  double worst = 0.0;
  for (size_t j = 0; j < times.size(); ++j) {
    const Complex phase = std::exp(Complex{0.0, delta * times[j]});
    double acc = 0.0;
    for (int k = 0; k < dim; ++k)
      acc += std::norm(samples[j](k) - lower(k) / phase - upper(k) * phase);
    worst = std::max(worst, std::sqrt(acc));
  }
  return worst;
}

}  // namespace

Trajectory integrate_from(const SchemeConfig& config, const IntegrationSpec& spec,
                          const Eigen::VectorXcd& initial) {
  config.validate();
  const double delta = config.signal.delta;

  double step = spec.step;
  if (step <= 0.0) step = 0.01 / config.max_rate();
  if (!std::isfinite(step) || step <= 0.0)
    throw ConfigError("integration step must be positive and finite");

  double horizon = spec.horizon;
  if (horizon <= 0.0) {
    const StabilityReport stab = stability(config);
    if (!stab.stable)
      throw ConfigError("default horizon needs a stable configuration; pass one explicitly");
    horizon = 20.0 / stab.slowest_rate;
  }
  if (!std::isfinite(horizon) || horizon < 10.0 * step)
    throw ConfigError("integration horizon must cover at least ten steps");
  if (spec.record_stride < 1) throw ConfigError("record_stride must be >= 1");

  const Rhs rhs{&config, delta};
  const int dim = rhs.dimension();
  if (initial.size() != dim)
    throw ConfigError("initial state dimension does not match the scheme");

  const auto steps = static_cast<long long>(std::ceil(horizon / step - 1e-9));

  // Trailing window used for the settling check / two-tone fit.
  const double window = std::max(0.05 * step * static_cast<double>(steps), 20.0 * step);
  const double window_start = step * static_cast<double>(steps) - window;
  const auto window_stride = static_cast<long long>(
      std::max(1.0, std::ceil(window / step / 8192.0)));

  Trajectory traj;
  traj.variable_labels = labels_for(config);

  StateVec y = initial, k1(dim), k2(dim), k3(dim), k4(dim), scratch(dim);
  double t = 0.0;
  traj.times.push_back(t);
  traj.states.emplace_back(y);

  std::vector<double> wtimes;
  std::vector<StateVec> wsamples;

  for (long long n = 0; n < steps; ++n) {
    rhs(t, y, k1);
    scratch = y + (0.5 * step) * k1;
    rhs(t + 0.5 * step, scratch, k2);
    scratch = y + (0.5 * step) * k2;
    rhs(t + 0.5 * step, scratch, k3);
    scratch = y + step * k3;
    rhs(t + step, scratch, k4);
    y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = step * static_cast<double>(n + 1);

    if (!y.allFinite() || y.norm() > kDivergenceNorm) {
      traj.diverged_at = t;
      traj.times.push_back(t);
      traj.states.emplace_back(y);
      break;
    }
    if ((n + 1) % spec.record_stride == 0 || n + 1 == steps) {
      traj.times.push_back(t);
      traj.states.emplace_back(y);
    }
    if (t >= window_start && ((n + 1) % window_stride == 0 || n + 1 == steps)) {
      wtimes.push_back(t);
      wsamples.push_back(y);
    }
  }

  traj.final_time = t;
  traj.final_state = y;
  traj.final_envelope = y * std::exp(Complex{0.0, delta * t});
  if (traj.diverged_at) return traj;

  const bool two_tone = config.kind == SchemeKind::Parametric &&
                        config.lambda != Complex{0.0, 0.0} &&
                        std::abs(delta) * window >= M_PI;
  if (two_tone && wsamples.size() >= 8) {
    StateVec lower(dim), upper(dim);
    const double worst = two_tone_fit(wtimes, wsamples, delta, lower, upper);
    double scale = 0.0;
    for (const auto& s : wsamples) scale = std::max(scale, s.norm());
    traj.converged = worst <= kSettleTol * std::max(scale, 1e-306);
    traj.upper_component = Eigen::VectorXcd(upper);
  } else if (!wsamples.empty()) {
    const Eigen::VectorXcd reference = traj.final_envelope;
    double worst = 0.0;
    for (size_t j = 0; j < wsamples.size(); ++j) {
      const Eigen::VectorXcd env =
          wsamples[j] * std::exp(Complex{0.0, delta * wtimes[j]});
      worst = std::max(worst, (env - reference).norm());
    }
    traj.converged = worst <= kSettleTol * std::max(reference.norm(), 1e-306);
  }
  return traj;
}

Trajectory integrate(const SchemeConfig& config, const IntegrationSpec& spec) {
  const int dim = config.kind == SchemeKind::WeakDrive ? 4 : 3;
  return integrate_from(config, spec, Eigen::VectorXcd::Zero(dim));
}

}  // namespace darkline
