#include "doctest.h"

#include <cmath>
#include <random>

#include "darkline/linsys.hpp"
#include "darkline/verify.hpp"

using namespace darkline;

namespace {

SchemeConfig reference_baseline() {
  SchemeConfig c;
  c.kind = SchemeKind::Baseline;
  c.mode1 = {"", 2.0, 1.5};
  c.mode2 = {"", 3.0, 2.0};
  c.mech.gamma_m = 1.0;
  c.g1.g = 0.7;
  c.g2.g = 0.9;
  return c;
}

SchemeConfig unit_baseline() {  // C1 = C2 = 1, eta = 1
  SchemeConfig c;
  c.kind = SchemeKind::Baseline;
  c.mode1 = {"", 1.0, 1.0};
  c.mode2 = {"", 1.0, 1.0};
  c.mech.gamma_m = 0.01;
  c.g1.g = 0.05;
  c.g2.g = 0.05;
  return c;
}

SchemeConfig exact_parametric(double lambda) {  // C1 = C2 = 1 exactly
  SchemeConfig c;
  c.kind = SchemeKind::Parametric;
  c.mode1 = {"", 4.0, 3.0};
  c.mode2 = {"", 4.0, 2.0};
  c.mech.gamma_m = 1.0;
  c.g1.g = 1.0;
  c.g2.g = 1.0;
  c.lambda = Complex{lambda, 0.0};
  return c;
}

}  // namespace

TEST_SUITE("linsys") {

TEST_CASE("assembled 3x3 system, entry by entry") {
  const SchemeConfig c = reference_baseline();
  const double delta = 0.4;
  const LinearSystem sys = build_system(c, delta);
  REQUIRE(sys.dimension() == 3);
  const Complex i{0.0, 1.0};
  CHECK(sys.matrix(0, 0) == Complex{1.0, -delta});
  CHECK(sys.matrix(1, 1) == Complex{1.5, -delta});
  CHECK(sys.matrix(2, 2) == Complex{0.5, -delta});
  CHECK(sys.matrix(0, 2) == i * 0.7);
  CHECK(sys.matrix(2, 0) == i * 0.7);
  CHECK(sys.matrix(1, 2) == i * 0.9);
  CHECK(sys.matrix(2, 1) == i * 0.9);
  CHECK(sys.matrix(0, 1) == Complex{0.0, 0.0});
  CHECK(sys.matrix(1, 0) == Complex{0.0, 0.0});
  CHECK(sys.drive(0) == Complex{std::sqrt(1.5), 0.0});
  CHECK(sys.drive(1) == Complex{0.0, 0.0});
  CHECK(sys.drive(2) == Complex{0.0, 0.0});
  CHECK(sys.variable_labels ==
        std::vector<std::string>{"alpha1", "alpha2", "beta"});
}

TEST_CASE("auxiliary cavity adds one row and one drive entry") {
  SchemeConfig c = reference_baseline();
  c.kind = SchemeKind::WeakDrive;
  c.mode3 = OpticalMode{"", 5.0, 4.0};
  c.g3 = Coupling{0.3};
  c.aux_drive = DriveTone{Complex{0.0, 2.0}, 0.0};
  const LinearSystem sys = build_system(c, 0.0);
  REQUIRE(sys.dimension() == 4);
  CHECK(sys.matrix(3, 3) == Complex{2.5, 0.0});
  CHECK(sys.matrix(2, 3) == Complex{0.0, 0.3});
  CHECK(sys.matrix(3, 2) == Complex{0.0, 0.3});
  CHECK(sys.matrix(0, 3) == Complex{0.0, 0.0});  // cavities couple via mechanics only
  CHECK(sys.matrix(3, 0) == Complex{0.0, 0.0});
  CHECK(sys.drive(0) == Complex{std::sqrt(1.5), 0.0});
  CHECK(sys.drive(3) == Complex{0.0, 2.0} * std::sqrt(4.0));
  CHECK(sys.variable_labels.back() == "alpha3");
}

TEST_CASE("unpumped doubled system is two decoupled conjugate copies") {
  const SchemeConfig par = exact_parametric(0.0);
  SchemeConfig base = par;
  base.kind = SchemeKind::Baseline;
  base.lambda = 0.0;
  const double delta = 0.8;
  const LinearSystem six = build_system(par, delta);
  const LinearSystem three = build_system(base, delta);
  REQUIRE(six.dimension() == 6);
  CHECK((six.matrix.topLeftCorner(3, 3) - three.matrix).norm() == 0.0);
  CHECK(six.matrix.topRightCorner(3, 3).norm() == 0.0);
  CHECK(six.matrix.bottomLeftCorner(3, 3).norm() == 0.0);
  // The conjugate block flips the coupling phases but keeps the diagonals.
  CHECK((six.matrix.bottomRightCorner(3, 3) - three.matrix.conjugate()).norm() ==
        doctest::Approx(2.0 * delta * std::sqrt(3.0)));
  CHECK(six.drive.tail(3).norm() == 0.0);
}

TEST_CASE("pump couples the two mechanical sidebands only") {
  SchemeConfig c = exact_parametric(0.0);
  c.lambda = Complex{0.25, -0.1};
  const LinearSystem sys = build_system(c, 0.3);
  for (int r = 0; r < 3; ++r)
    for (int col = 3; col < 6; ++col) {
      if (r == 2 && col == 5) continue;
      CHECK(sys.matrix(r, col) == Complex{0.0, 0.0});       // upper-right block
      CHECK(sys.matrix(col, r) == Complex{0.0, 0.0});       // lower-left block
    }
  CHECK(sys.matrix(2, 5) == -c.lambda);
  CHECK(sys.matrix(5, 2) == -std::conj(c.lambda));
}

TEST_CASE("direct solve reproduces hand-solved decoupled cavities") {
  SchemeConfig c = reference_baseline();
  c.g1.g = 0.0;
  c.g2.g = 0.0;
  const SteadyState st = solve(build_system(c, 0.0));
  CHECK(std::abs(st.amplitudes(0) - std::sqrt(1.5) / 1.0) <= 1e-15);
  CHECK(std::abs(st.amplitudes(1)) == 0.0);
  CHECK(std::abs(st.amplitudes(2)) == 0.0);
}

TEST_CASE("solve leaves a tiny relative residual") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 50; ++n) {
    const SchemeConfig c = verify::random_config(
        n % 2 ? SchemeKind::WeakDrive : SchemeKind::Parametric, rng,
        verify::full_profile());
    const LinearSystem sys = build_system(c, 0.37);
    const SteadyState st = solve(sys);
    const double res = (sys.matrix * st.amplitudes - sys.drive).norm() / sys.drive.norm();
    CHECK(res <= 1e-10);
  }
}

TEST_CASE("solver refuses the singular threshold system") {
  // At the threshold pump the resonant matrix loses rank.
  const LinearSystem sys = build_system(exact_parametric(1.5), 0.0);
  CHECK_THROWS_AS((void)solve(sys), DegenerateError);
}

TEST_CASE("bright/dark projection inverts cleanly") {
  const SchemeConfig c = reference_baseline();
  const SteadyState st = solve(build_system(c, 0.2));
  const BrightDarkAmplitudes bd = bright_dark_decompose(st, c);
  const double g = std::hypot(c.g1.g, c.g2.g);
  const Complex a1 = (c.g1.g * bd.alpha_b + c.g2.g * bd.alpha_d) / g;
  const Complex a2 = (c.g2.g * bd.alpha_b - c.g1.g * bd.alpha_d) / g;
  CHECK(std::abs(a1 - st.amplitudes(0)) <= 1e-15);
  CHECK(std::abs(a2 - st.amplitudes(1)) <= 1e-15);
  // Norm is preserved by the rotation.
  CHECK(std::norm(bd.alpha_b) + std::norm(bd.alpha_d) ==
        doctest::Approx(std::norm(st.amplitudes(0)) + std::norm(st.amplitudes(1)))
            .epsilon(1e-14));
}

TEST_CASE("equal couplings make the projection the symmetric one") {
  SchemeConfig c = unit_baseline();
  const SteadyState st = solve(build_system(c, 0.0));
  const BrightDarkAmplitudes bd = bright_dark_decompose(st, c);
  const double isq = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(bd.alpha_b - isq * (st.amplitudes(0) + st.amplitudes(1))) <= 1e-15);
  CHECK(std::abs(bd.alpha_d - isq * (st.amplitudes(0) - st.amplitudes(1))) <= 1e-15);
}

TEST_CASE("rewritten basis: decoupling and mixing entries") {
  SchemeConfig c = reference_baseline();
  for (double delta : {0.0, 1.1}) {
    const LinearSystem t = transform_to_bright_dark_basis(c, delta);
    CHECK(t.matrix(1, 2) == Complex{0.0, 0.0});  // dark mode sees no mechanics
    CHECK(t.matrix(2, 1) == Complex{0.0, 0.0});
    const double g2t = c.g1.g * c.g1.g + c.g2.g * c.g2.g;
    const double expected = c.g1.g * c.g2.g * (c.mode1.kappa - c.mode2.kappa) / (2.0 * g2t);
    CHECK(t.matrix(0, 1).real() == doctest::Approx(expected).epsilon(1e-15));
    CHECK(t.matrix(0, 1).imag() == 0.0);  // detuning-independent, purely dissipative
    CHECK(t.matrix(1, 0) == t.matrix(0, 1));
    CHECK(t.matrix(0, 2) == Complex{0.0, std::sqrt(g2t)});
    CHECK(t.variable_labels[1] == "alpha_dark");
  }
}

TEST_CASE("matched linewidths sever the bright-dark link; mismatch restores it") {
  SchemeConfig c = unit_baseline();
  CHECK(transform_to_bright_dark_basis(c, 0.3).matrix(0, 1) == Complex{0.0, 0.0});
  c.mode1.kappa = 10.0;
  c.mode1.kappa_ext = 10.0;
  const Complex mixing = transform_to_bright_dark_basis(c, 0.3).matrix(0, 1);
  CHECK(mixing.real() == doctest::Approx(0.5 * (10.0 - 1.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("basis rewrite preserves the spectrum") {
  std::mt19937_64 rng(22);
  for (int n = 0; n < 50; ++n) {
    const SchemeConfig c =
        verify::random_config(SchemeKind::Baseline, rng, verify::full_profile());
    CHECK(verify::transform_eigenvalue_error(c) <= 1e-10);
  }
}

TEST_CASE("rewrite is defined for the three-mode scheme only") {
  SchemeConfig c = exact_parametric(0.1);
  CHECK_THROWS_AS((void)transform_to_bright_dark_basis(c, 0.0), ConfigError);
}

TEST_CASE("resonant conversion matches the closed-form efficiency") {
  const SchemeConfig c = unit_baseline();
  const SteadyState st = solve(build_system(c, 0.0));
  const TransferReport r = input_output(st, c);
  CHECK(r.chi == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(r.stable);
}

TEST_CASE("cutting the input coupling kills the conversion") {
  SchemeConfig c = unit_baseline();
  c.g1.g = 0.0;
  const SteadyState st = solve(build_system(c, 0.0));
  CHECK(input_output(st, c).chi == doctest::Approx(0.0));
}

TEST_CASE("nulled auxiliary scheme converts perfectly at eta = 1") {
  SchemeConfig c = unit_baseline();
  c.kind = SchemeKind::WeakDrive;
  c.mode3 = OpticalMode{"", 1.0, 1.0};
  c.g3 = Coupling{0.05};
  c.aux_drive = DriveTone{Complex{0.0, 0.0}, 0.0};
  c.aux_drive->amplitude = solve_weak_drive_condition(c);
  const SteadyState st = solve(build_system(c, 0.0));
  const TransferReport r = input_output(st, c);
  CHECK(r.chi == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.alpha_out3.has_value());
  // Flux ledger balances even though two ports inject.
  const double imbalance =
      std::abs(r.flux_in - r.flux_out - r.flux_internal_loss - r.flux_mechanical) /
      r.flux_in;
  CHECK(imbalance <= 1e-12);
}

TEST_CASE("flux ledger balances on random configurations") {
  std::mt19937_64 rng(23);
  for (SchemeKind kind : {SchemeKind::Baseline, SchemeKind::WeakDrive}) {
    double worst = 0.0;
    for (int n = 0; n < 60; ++n) {
      const SchemeConfig c = verify::random_config(kind, rng, verify::full_profile());
      for (double d : verify::delta_grid_for(c, 7))
        worst = std::max(worst, verify::flux_imbalance(c, d));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("input-output needs incoming flux") {
  SchemeConfig c = unit_baseline();
  c.signal.amplitude = Complex{0.0, 0.0};
  const SteadyState st = solve(build_system(c, 0.0));
  CHECK_THROWS_AS((void)input_output(st, c), DegenerateError);
}

TEST_CASE("drift spectrum: passive schemes decay, strong pumps do not") {
  CHECK(stability(reference_baseline()).stable);

  SchemeConfig par = exact_parametric(0.0);
  const double threshold = 1.5;  // gamma_m (1 + C1 + C2) / 2
  par.lambda = Complex{solve_parametric_condition(par), 0.0};
  CHECK(stability(par).stable);

  par.lambda = Complex{1.01 * threshold, 0.0};
  const StabilityReport hot = stability(par);
  CHECK_FALSE(hot.stable);
  CHECK(hot.slowest_rate < 0.0);
}

TEST_CASE("homogeneous generator is the negated resonant system matrix") {
  std::mt19937_64 rng(24);
  for (SchemeKind kind :
       {SchemeKind::Baseline, SchemeKind::WeakDrive, SchemeKind::Parametric}) {
    const SchemeConfig c = verify::random_config(kind, rng, verify::full_profile());
    CHECK((drift_matrix(c) + build_system(c, 0.0).matrix).norm() == 0.0);
  }
}

TEST_CASE("threshold bisection lands on the analytic crossing") {
  const SchemeConfig par = exact_parametric(0.0);
  const double found = locate_instability_threshold(par, 0.0, 3.0);
  CHECK(found == doctest::Approx(1.5).epsilon(1e-10));
  CHECK_THROWS_AS((void)locate_instability_threshold(par, 0.0, 1.0), DegenerateError);
  CHECK_THROWS_AS((void)locate_instability_threshold(par, 2.0, 1.0), ConfigError);
  CHECK_THROWS_AS((void)locate_instability_threshold(reference_baseline(), 0.0, 1.0),
                  ConfigError);
}

}  // TEST_SUITE
