#pragma once

#include <vector>

namespace mbh {

// Nonlocal-in-space-and-time model with K(tau) = 1 and Gaussian spatial
// kernels amplitude * exp(-y^2) / sqrt(pi). Plane-wave transform:
//   time_weight (2 cos(w T0) - 2) + c1 (1 - E)(2 sin(w tau)/w - 2 tau) + c2 (1 - E),
// with E = exp(-k^2 / 4) and tau = tau_extent.
struct NonlocalParams {
  double T0 = 0.8;
  double time_weight = 25.0 / 32.0;
  double tau_extent = 1.0;
  double c1 = 0.01;
  double c2 = 2.0;

  // Reproduces the published closed-form relation for T0 = 0.8.
  static NonlocalParams reference();
  // Unit weight on the time-difference term and tau over [0, T0].
  static NonlocalParams literal(double T0, double c1, double c2);
  void validate() const;
};

double nlt_residual(const NonlocalParams& p, double k, double omega);

struct NlBandPoint {
  double k;
  double omega;
  int multiplicity;  // 2 for tangential roots
};

struct NlBandResult {
  std::vector<double> k;
  // bands[j][i]: j-th root (ascending) at k[i]; NaN where fewer roots exist.
  std::vector<std::vector<double>> bands;
  std::vector<std::vector<int>> multiplicity;
};

// Roots of the residual in (0, omega_max] on each k; step defaults to
// 2.5 pi / 200.
std::vector<NlBandPoint> nlt_roots(const NonlocalParams& p, double k, double omega_max, double step = 0.0);
NlBandResult nlt_bands(const NonlocalParams& p, const std::vector<double>& k, double omega_max,
                       double step = 0.0);

struct NlQuadratureCheck {
  double quadrature;
  double closed_form;
  int tau_nodes;
  int y_nodes;
};

// Direct quadrature of the equation of motion under a plane wave.
NlQuadratureCheck nlt_integral_dispersion_check(const NonlocalParams& p, double k, double omega,
                                                double tol = 1e-10);

}  // namespace mbh
