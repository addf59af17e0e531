#include "mbhom/particle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mbhom/errors.hpp"

namespace mbh {

std::vector<std::complex<double>> ParticleRoots::all() const {
  return {{0.0, omega}, {0.0, -omega}, {lambda, 0.0}, {-lambda, 0.0}};
}

ParticleRoots particle_roots(double C) {
  if (!std::isfinite(C)) throw std::invalid_argument("particle: C must be finite");
  // s^4 + C s^2 - 1 = 0; the product of the two s^2 roots is -1.
  const double disc = std::sqrt(C * C + 4.0);
  const double w2 = 0.5 * (C + disc);
  const double l2 = 1.0 / w2;
  return {std::sqrt(w2), std::sqrt(l2)};
}

double particle_energy(double C, const ParticleState& s) {
  return 0.5 * s[2] * s[2] - 0.5 * C * s[1] * s[1] - s[1] * s[3] + 0.5 * s[0] * s[0];
}

ParticleState project_neutral(double C, const ParticleState& s) {
  const ParticleRoots r = particle_roots(C);
  const double w2 = r.omega * r.omega, l2 = r.lambda * r.lambda;
  // u = a + b, u'' = -w2 a + l2 b; same for (u', u''').
  const double a0 = (l2 * s[0] - s[2]) / (l2 + w2);
  const double a1 = (l2 * s[1] - s[3]) / (l2 + w2);
  return {a0, a1, -w2 * a0, -w2 * a1};
}

ParticleDemoResult particle_energy_demo(double C, const ParticleState& initial, double dt, int steps) {
  if (!(dt > 0.0) || steps < 0) throw std::invalid_argument("particle: dt must be positive, steps >= 0");
  const ParticleRoots r = particle_roots(C);
  const ParticleState p = project_neutral(C, initial);
  double scale = 0.0, off = 0.0;
  for (int i = 0; i < 4; ++i) {
    scale = std::max(scale, std::abs(initial[i]));
    off = std::max(off, std::abs(initial[i] - p[i]));
  }
  if (off > 1e-10 * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "particle: initial data excites the growing mode; roots s = +-" << r.lambda << ", +-i"
        << r.omega;
    throw SolverError(msg.str());
  }
  auto rhs = [C](const ParticleState& s) { return ParticleState{s[1], s[2], s[3], s[0] - C * s[2]}; };
  ParticleDemoResult res;
  res.omega = r.omega;
  res.steps = steps;
  ParticleState s = p;
  res.energy0 = particle_energy(C, s);
  for (int n = 0; n < steps; ++n) {
    const ParticleState k1 = rhs(s);
    ParticleState t;
    for (int i = 0; i < 4; ++i) t[i] = s[i] + 0.5 * dt * k1[i];
    const ParticleState k2 = rhs(t);
    for (int i = 0; i < 4; ++i) t[i] = s[i] + 0.5 * dt * k2[i];
    const ParticleState k3 = rhs(t);
    for (int i = 0; i < 4; ++i) t[i] = s[i] + dt * k3[i];
    const ParticleState k4 = rhs(t);
    for (int i = 0; i < 4; ++i) s[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    s = project_neutral(C, s);
    if (res.energy0 != 0.0)
      res.max_relative_drift =
          std::max(res.max_relative_drift, std::abs(particle_energy(C, s) - res.energy0) / std::abs(res.energy0));
  }
  return res;
}

}  // namespace mbh
