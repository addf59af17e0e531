#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mbhom/errors.hpp"
#include "mbhom/particle.hpp"

using namespace mbh;

TEST_SUITE("particle") {
  TEST_CASE("characteristic roots") {
    const ParticleRoots r = particle_roots(1.5);
    for (const auto& s : r.all()) {
      const auto s2 = s * s;
      CHECK(std::abs(s2 * s2 + 1.5 * s2 - 1.0) < 1e-12);
    }
    CHECK(r.omega * r.lambda == doctest::Approx(1.0));
  }

  TEST_CASE("energy is conserved on the neutral subspace") {
    const double C = 0.7;
    const ParticleState s0 = project_neutral(C, {0.4, -1.0, 0.2, 0.5});
    const double T = 2.0 * std::numbers::pi / particle_roots(C).omega;
    const ParticleDemoResult d = particle_energy_demo(C, s0, T / 200.0, 2000);
    CHECK(d.max_relative_drift < 1e-6);
    CHECK(d.energy0 == doctest::Approx(particle_energy(C, s0)));
  }

  TEST_CASE("initial data with a growing component is rejected") {
    CHECK_THROWS_AS(particle_energy_demo(1.0, {1.0, 0.0, 0.0, 0.0}, 0.01, 10), SolverError);
  }
}
