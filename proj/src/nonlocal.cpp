#include "mbhom/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mbhom/errors.hpp"
#include "mbhom/numeric.hpp"

namespace mbh {

NonlocalParams NonlocalParams::reference() { return {}; }

NonlocalParams NonlocalParams::literal(double T0, double c1, double c2) { return {T0, 1.0, T0, c1, c2}; }

void NonlocalParams::validate() const {
  if (!(T0 > 0.0) || !(tau_extent > 0.0)) throw std::invalid_argument("nonlocal: T0 and tau_extent must be positive");
  if (c1 < 0.0 || c2 < 0.0 || time_weight < 0.0)
    throw std::invalid_argument("nonlocal: kernel amplitudes must be nonnegative");
}

namespace {

double sin_over(double w, double tau) {
  // sin(w tau) / w with its limit tau at w = 0.
  const double x = w * tau;
  if (std::abs(x) < 1e-4) return tau * (1.0 - x * x / 6.0 + x * x * x * x / 120.0);
  return std::sin(x) / w;
}

}  // namespace

double nlt_residual(const NonlocalParams& p, double k, double omega) {
  const double E = std::exp(-0.25 * k * k);
  return p.time_weight * (2.0 * std::cos(omega * p.T0) - 2.0) +
         p.c1 * (1.0 - E) * (2.0 * sin_over(omega, p.tau_extent) - 2.0 * p.tau_extent) + p.c2 * (1.0 - E);
}

std::vector<NlBandPoint> nlt_roots(const NonlocalParams& p, double k, double omega_max, double step) {
  p.validate();
  if (step <= 0.0) step = 2.5 * std::numbers::pi / 200.0;
  const auto roots = scan_roots([&](double w) { return nlt_residual(p, k, w); }, step * 1e-3, omega_max, step, 1e-12);
  std::vector<NlBandPoint> out;
  for (const auto& r : roots) out.push_back({k, r.x, r.multiplicity});
  return out;
}

NlBandResult nlt_bands(const NonlocalParams& p, const std::vector<double>& k, double omega_max, double step) {
  for (std::size_t i = 1; i < k.size(); ++i)
    if (!(k[i] > k[i - 1])) throw std::invalid_argument("nlt_bands: k grid must be strictly increasing");
  NlBandResult res;
  res.k = k;
  std::vector<std::vector<NlBandPoint>> per_k;
  std::size_t nb = 0;
  for (double kv : k) {
    per_k.push_back(nlt_roots(p, kv, omega_max, step));
    nb = std::max(nb, per_k.back().size());
  }
  res.bands.assign(nb, std::vector<double>(k.size(), std::numeric_limits<double>::quiet_NaN()));
  res.multiplicity.assign(nb, std::vector<int>(k.size(), 0));
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j < per_k[i].size(); ++j) {
      res.bands[j][i] = per_k[i][j].omega;
      res.multiplicity[j][i] = per_k[i][j].multiplicity;
    }
  return res;
}

NlQuadratureCheck nlt_integral_dispersion_check(const NonlocalParams& p, double k, double omega, double tol) {
  p.validate();
  const double sigma = 1.0 / std::sqrt(2.0);
  const double ymax = 8.0 * sigma;
  auto evaluate = [&](int tau_panels, int y_panels) {
    const QuadratureRule qt = gauss_legendre_panels(0.0, p.tau_extent, tau_panels);
    const QuadratureRule qy = gauss_legendre_panels(-ymax, ymax, y_panels);
    double time_part = 0.0;  // int K(tau) (2 cos(w tau) - 2) dtau
    for (std::size_t i = 0; i < qt.x.size(); ++i) time_part += qt.w[i] * (2.0 * std::cos(omega * qt.x[i]) - 2.0);
    double s1 = 0.0, s2 = 0.0;  // int C(y) (1 - e^{-iky}) dy, real part
    for (std::size_t i = 0; i < qy.x.size(); ++i) {
      const double g = std::exp(-qy.x[i] * qy.x[i]) / std::sqrt(std::numbers::pi);
      const double d = 1.0 - std::cos(k * qy.x[i]);
      s1 += qy.w[i] * p.c1 * g * d;
      s2 += qy.w[i] * p.c2 * g * d;
    }
    return p.time_weight * (2.0 * std::cos(omega * p.T0) - 2.0) + s1 * time_part + s2;
  };
  int nt = 1, ny = 1;
  double prev = evaluate(nt, ny);
  for (int it = 0; it < 12; ++it) {
    nt *= 2;
    ny *= 2;
    const double cur = evaluate(nt, ny);
    if (std::abs(cur - prev) < tol) return {cur, nlt_residual(p, k, omega), 20 * nt, 20 * ny};
    prev = cur;
  }
  throw SolverError("nonlocal quadrature did not converge with " + std::to_string(20 * nt) + " tau nodes and " +
                    std::to_string(20 * ny) + " y nodes");
}

}  // namespace mbh
