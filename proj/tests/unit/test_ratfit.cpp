#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "mbhom/ratfit.hpp"

using namespace mbh;

TEST_SUITE("ratfit") {
  TEST_CASE("classical branch") {
    const RationalBranch1D b = RationalBranch1D::classical(2.0, 0.5);
    CHECK(b.order() == 1);
    CHECK(b.omega(3.0) == doctest::Approx(6.0));
    CHECK(b.domega_dk(1.0) == doctest::Approx(2.0));
  }

  TEST_CASE("fit pins the static coefficients") {
    for (int order = 1; order <= 4; ++order) {
      const FitResult1D f = fit_branch_1d(cell_a(), order);
      CHECK(f.branch.num[1] == doctest::Approx(1.0 / 0.84).epsilon(1e-15));
      CHECK(f.branch.den[0] == doctest::Approx(1.0));
      CHECK_NOTHROW(f.branch.validate());
    }
  }

  TEST_CASE("fit residual falls with order") {
    double prev = 1e300;
    for (int order = 1; order <= 4; ++order) {
      const double r = fit_branch_1d(cell_a(), order).rms_omega;
      CHECK(r < prev);
      prev = r;
    }
  }

  TEST_CASE("a uniform cell fits to the classical medium") {
    const FitResult1D f = fit_branch_1d(UnitCell::uniform(3.0, 1.0, 1.0), 2);
    CHECK(f.rms_omega < 1e-10);
    CHECK(f.branch.num[2] == doctest::Approx(0.0));
    CHECK(f.branch.den[2] == doctest::Approx(0.0));
  }

  TEST_CASE("masks are validated") {
    FitOptions1D o;
    o.mask = CoefficientMask{{5}, {1}};
    CHECK_THROWS_AS(fit_branch_1d(cell_a(), 2, o), std::invalid_argument);
    CHECK_THROWS_AS(order_index(33), std::invalid_argument);
  }

  TEST_CASE("nnls") {
    Eigen::MatrixXd A(3, 2);
    A << 1, 0, 0, 1, 1, 1;
    Eigen::VectorXd b(3);
    b << 1, -1, 0;
    const Eigen::VectorXd x = nnls(A, b);
    CHECK(x(1) == 0.0);
    CHECK(x(0) == doctest::Approx(0.5));
  }

  TEST_CASE("2-d RF22 fit is close to the exact band") {
    const FitResult2D f = fit_branch_2d(cell_a());
    CHECK_NOTHROW(f.branch.validate());
    CHECK(f.max_rel_error < 0.1);
    // Static limit along the laminae normal is the harmonic mean.
    CHECK(f.branch.N0(0, 0) > 1.0);
  }

  TEST_CASE("two-band fit places the gap on the exact edges") {
    const TwoBandFit1D f = fit_two_band_1d(cell_b());
    CHECK(f.gap_lo == doctest::Approx(f.exact_gap_lo).epsilon(1e-12));
    CHECK(f.gap_hi == doctest::Approx(f.exact_gap_hi).epsilon(1e-12));
    CHECK(f.model.acoustic_omega_sq(0.0) == 0.0);
    CHECK(f.model.optic.omega_sq(0.0) == doctest::Approx(f.model.optic.omega_b * f.model.optic.omega_b));
  }

  TEST_CASE("derived PDE coefficients reproduce both branches") {
    const MultibandModel1D m = fit_two_band_1d(cell_a()).model;
    const MultibandCoeffs1D a = derive_multiband_coeffs(m);
    for (double k : {0.3, 1.0, 2.5}) {
      for (double w2 : {m.acoustic_omega_sq(k), m.optic.omega_sq(k)}) {
        const double w = std::sqrt(w2);
        CHECK(std::abs(multiband_pde_residual(a, k, w)) < 1e-9 * w2 * w2);
        CHECK(std::abs(product_dispersion(m, k, w)) < 1e-9 * w2 * w2);
      }
    }
  }

  TEST_CASE("2-d two-band fits") {
    TwoBandFitOptions2D o;
    o.polynomial = true;
    const TwoBandFit2D p = fit_two_band_2d(cell_a(), o);
    CHECK(p.model.acoustic.D1.isZero());
    CHECK(p.model.optic.Q.isZero());
    const TwoBandFit2D r = fit_two_band_2d(cell_a());
    CHECK(r.rms_acoustic < p.rms_acoustic);
  }
}
