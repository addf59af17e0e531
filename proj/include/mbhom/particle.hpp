#pragma once

#include <array>
#include <complex>
#include <vector>

namespace mbh {

// State (u, u', u'', u''') of u'''' + C u'' - u = 0.
using ParticleState = std::array<double, 4>;

struct ParticleRoots {
  double omega;   // neutral pair s = +-i omega
  double lambda;  // hyperbolic pair s = +-lambda
  std::vector<std::complex<double>> all() const;
};

ParticleRoots particle_roots(double C);
double particle_energy(double C, const ParticleState& s);

// The neutral (cos, sin) part of a state.
ParticleState project_neutral(double C, const ParticleState& s);

struct ParticleDemoResult {
  double max_relative_drift = 0.0;
  double energy0 = 0.0;
  double omega = 0.0;
  int steps = 0;
};

// RK4 integration restricted to the neutral subspace; initial data with a
// hyperbolic component is rejected.
ParticleDemoResult particle_energy_demo(double C, const ParticleState& initial, double dt, int steps);

}  // namespace mbh
