#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mbhom/numeric.hpp"

using namespace mbh;

TEST_SUITE("numeric") {
  TEST_CASE("composite Gauss rule integrates polynomials and smooth functions") {
    const QuadratureRule q = gauss_legendre_panels(-1.0, 2.0, 3);
    double p = 0.0, e = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      p += q.w[i] * std::pow(q.x[i], 7);
      e += q.w[i] * std::exp(q.x[i]);
    }
    CHECK(p == doctest::Approx((std::pow(2.0, 8) - 1.0) / 8.0).epsilon(1e-14));
    CHECK(e == doctest::Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-14));
  }

  TEST_CASE("bracket_root") {
    const double r = bracket_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(std::abs(r - std::sqrt(2.0)) < 1e-14);
  }

  TEST_CASE("scan_roots finds simple and tangential roots") {
    auto f = [](double x) { return std::cos(x) - 1.0; };  // double roots at 2 pi n
    const auto roots = scan_roots(f, 1.0, 20.0, 0.05, 1e-12);
    REQUIRE(roots.size() == 3);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      CHECK(std::abs(roots[i].x - 2.0 * M_PI * (i + 1)) < 1e-6);
      CHECK(roots[i].multiplicity == 2);
    }
    const auto simple = scan_roots([](double x) { return std::sin(x); }, 0.5, 7.0, 0.1, 1e-12);
    REQUIRE(simple.size() == 2);
    CHECK(simple[0].multiplicity == 1);
  }

  TEST_CASE("parallel_map keeps index order and reports the lowest failing index") {
    const auto v = parallel_map<int>(1000, 8, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
    try {
      parallel_map<int>(100, 4, [](std::size_t i) -> int {
        if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
        return 0;
      });
      FAIL("expected exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
}
