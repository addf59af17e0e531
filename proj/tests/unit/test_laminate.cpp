#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mbhom/laminate.hpp"

using namespace mbh;

TEST_SUITE("laminate") {
  TEST_CASE("preset cells") {
    CHECK(cell_a().period() == doctest::Approx(1.0));
    CHECK(cell_b().period() == doctest::Approx(1.0));
    CHECK(harmonic_mean_modulus(cell_a()) == doctest::Approx(1.0 / 0.84).epsilon(1e-15));
    CHECK(mean_density(cell_a()) == doctest::Approx(1.0));
  }

  TEST_CASE("propagators are unimodular") {
    for (double w : {0.1, 1.0, 3.4, 9.0, 20.0}) {
      CHECK(std::abs(layer_propagator(cell_a().layer(1), w).determinant() - 1.0) < 1e-12);
      CHECK(std::abs(cell_propagator(cell_b(), w, 0.0, Ordering::b_first).determinant() - 1.0) < 1e-12);
      CHECK(std::abs(cell_propagator(cell_a(), w, -4.0).determinant() - 1.0) < 1e-12);
    }
  }

  TEST_CASE("cos_sinc is continuous through alpha^2 = 0") {
    for (double a2 : {1e-12, -1e-12}) {
      const CosSinc cs = cos_sinc(a2, 0.7);
      CHECK(cs.c == doctest::Approx(1.0));
      CHECK(cs.s == doctest::Approx(0.7));
    }
    const CosSinc neg = cos_sinc(-4.0, 0.5);
    CHECK(neg.c == doctest::Approx(std::cosh(1.0)));
    CHECK(neg.s == doctest::Approx(std::sinh(1.0) / 2.0));
  }

  TEST_CASE("uniform cell folds the light line exactly") {
    const UnitCell u = UnitCell::uniform(4.0, 1.0, 1.0);
    for (double K : {0.0, 0.5, 1.7, std::numbers::pi}) CHECK(band_frequency_1d(u, 1, K) == 2.0 * K);
    CHECK(band_frequency_1d(u, 2, 1.0) == doctest::Approx(2.0 * (2.0 * std::numbers::pi - 1.0)));
  }

  TEST_CASE("Bloch wavenumber conventions") {
    const UnitCell c = cell_a();
    const BandEdges b1 = band_edges_1d(c, 1), b2 = band_edges_1d(c, 2);
    CHECK(b1.lo == 0.0);
    CHECK(b1.hi < b2.lo);
    const cplx pass = bloch_wavenumber_1d(c, 0.5 * b1.hi);
    CHECK(std::abs(pass.imag()) < 1e-12);
    CHECK(pass.real() > 0.0);
    const cplx gap = bloch_wavenumber_1d(c, midgap_frequency(c));
    CHECK(gap.imag() < 0.0);
    CHECK(gap.real() == doctest::Approx(std::numbers::pi));
    CHECK(midgap_frequency(c) == doctest::Approx(0.5 * (b1.hi + b2.lo)));
  }

  TEST_CASE("gap edges of CELL_B straddle its midgap") {
    const UnitCell c = cell_b();
    const double w0 = midgap_frequency(c);
    CHECK(band_edges_1d(c, 1).hi < w0);
    CHECK(band_edges_1d(c, 2).lo > w0);
  }

  TEST_CASE("2-d roots and Bloch mode shapes") {
    const UnitCell c = cell_a();
    const double w = 4.2, k1 = 2.9;
    const auto roots = k2_roots(c, w, k1, 4);
    REQUIRE(roots.size() == 4);
    CHECK(roots[0].imag() == 0.0);
    CHECK(roots[3].imag() < roots[2].imag() + 1e-12);
    for (const cplx& k2 : roots) {
      const BlochMode2D m = bloch_mode_shape(c, w, k1, k2);
      CHECK(m.interface_residual() < 1e-9);
      CHECK(m.bloch_residual() < 1e-9);
    }
  }
}
