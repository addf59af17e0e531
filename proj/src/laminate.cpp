#include "mbhom/laminate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mbhom/errors.hpp"

namespace mbh {

namespace {

void check_layer(const Layer& l, const char* name) {
  for (double v : {l.modulus, l.density, l.thickness}) {
    if (!std::isfinite(v) || v <= 0.0)
      throw std::invalid_argument(std::string("layer ") + name +
                                  ": modulus, density and thickness must be positive and finite");
  }
}

double travel_time(const UnitCell& cell) {
  double t = 0.0;
  for (int i = 0; i < 2; ++i) {
    const Layer& l = cell.layer(i);
    t += l.thickness * std::sqrt(l.density / l.modulus);
  }
  return t;
}

}  // namespace

UnitCell::UnitCell(const Layer& a, const Layer& b) : a_(a), b_(b) {
  check_layer(a_, "a");
  check_layer(b_, "b");
  period_ = a_.thickness + b_.thickness;
}

UnitCell UnitCell::uniform(double modulus, double density, double period) {
  Layer l{modulus, density, 0.5 * period};
  return UnitCell(l, l);
}

std::array<int, 2> UnitCell::sequence(Ordering o) {
  return o == Ordering::a_first ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 0};
}

UnitCell cell_a() { return UnitCell({1.0, 1.0, 0.8}, {5.0, 1.0, 0.2}); }
UnitCell cell_b() { return UnitCell({1.0, 1.0, 1.0 / 7.0}, {20.0, 1.0, 6.0 / 7.0}); }

double harmonic_mean_modulus(const UnitCell& cell) {
  double compliance = 0.0;
  for (int i = 0; i < 2; ++i) compliance += cell.layer(i).thickness / cell.layer(i).modulus;
  return cell.period() / compliance;
}

double mean_density(const UnitCell& cell) {
  double m = 0.0;
  for (int i = 0; i < 2; ++i) m += cell.layer(i).thickness * cell.layer(i).density;
  return m / cell.period();
}

CosSinc cos_sinc(double alpha_sq, double h) {
  const double x = alpha_sq * h * h;
  if (std::abs(x) < 1e-3) {
    const double c = 1.0 - x / 2.0 * (1.0 - x / 12.0 * (1.0 - x / 30.0 * (1.0 - x / 56.0)));
    const double s = h * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0 * (1.0 - x / 72.0))));
    return {c, s};
  }
  if (alpha_sq > 0.0) {
    const double a = std::sqrt(alpha_sq);
    return {std::cos(a * h), std::sin(a * h) / a};
  }
  const double b = std::sqrt(-alpha_sq);
  return {std::cosh(b * h), std::sinh(b * h) / b};
}

Eigen::Matrix2d layer_propagator(const Layer& layer, double omega, double k2sq,
                                 double length) {
  const double a2 = omega * omega * layer.density / layer.modulus - k2sq;
  const CosSinc cs = cos_sinc(a2, length);
  Eigen::Matrix2d m;
  m << cs.c, cs.s / layer.modulus, -layer.modulus * a2 * cs.s, cs.c;
  return m;
}

Eigen::Matrix2d layer_propagator(const Layer& layer, double omega, double k2sq) {
  return layer_propagator(layer, omega, k2sq, layer.thickness);
}

Eigen::Matrix2d cell_propagator(const UnitCell& cell, double omega, double k2sq,
                                Ordering ordering) {
  const auto seq = UnitCell::sequence(ordering);
  return layer_propagator(cell.layer(seq[1]), omega, k2sq) *
         layer_propagator(cell.layer(seq[0]), omega, k2sq);
}

double dispersion_rhs_2d(const UnitCell& cell, double omega, double k2sq) {
  return 0.5 * cell_propagator(cell, omega, k2sq).trace();
}

double dispersion_rhs_1d(const UnitCell& cell, double omega) {
  if (omega < 0.0) throw std::invalid_argument("dispersion_rhs_1d: omega < 0");
  return dispersion_rhs_2d(cell, omega, 0.0);
}

cplx bloch_wavenumber_1d(const UnitCell& cell, double omega) {
  const double r = dispersion_rhs_1d(cell, omega);
  const double h = cell.period();
  if (r > 1.0) return {0.0, -std::acosh(r) / h};
  if (r < -1.0) return {std::numbers::pi / h, -std::acosh(-r) / h};
  return {std::acos(r) / h, 0.0};
}

BandEdges band_edges_1d(const UnitCell& cell, int band_index, double omega_max) {
  if (band_index < 1) throw std::invalid_argument("band_edges_1d: band_index < 1");
  const double tau = travel_time(cell);
  if (omega_max <= 0.0) omega_max = 2.0 * (band_index + 2) * std::numbers::pi / tau;
  auto r = [&](double w) { return dispersion_rhs_1d(cell, w); };
  const double step = std::numbers::pi / (200.0 * tau);

  // Extrema of the rhs separate consecutive bands; the rhs is monotone within
  // each pass band, so the n-th extremum carries the edge between bands n, n+1.
  std::vector<double> ext{0.0};
  std::vector<double> ext_val{1.0};
  double w0 = 0.0, w1 = step;
  double r0 = r(w0), r1 = r(w1);
  while (static_cast<int>(ext.size()) <= band_index && w1 < omega_max) {
    const double w2 = w1 + step;
    const double r2 = r(w2);
    if ((r1 - r0) * (r2 - r1) < 0.0) {
      const double we = refine_extremum(r, w0, w2, r1 > r0);
      ext.push_back(we);
      ext_val.push_back(r(we));
    }
    w0 = w1;
    w1 = w2;
    r0 = r1;
    r1 = r2;
  }
  if (static_cast<int>(ext.size()) <= band_index)
    throw SolverError("band_edges_1d: bracket not found for band " + std::to_string(band_index) +
                      " below omega_max=" + std::to_string(omega_max));

  auto edge = [&](int j, double lo, double hi) {
    // Crossing of rhs = target (= sign of the j-th extremum) inside [lo, hi].
    const double target = ext_val[j] > 0.0 ? 1.0 : -1.0;
    if (std::abs(ext_val[j]) <= 1.0 + 1e-14) return ext[j];
    return bracket_root([&](double w) { return r(w) - target; }, lo, hi);
  };
  const int n = band_index;
  BandEdges e{};
  e.hi = edge(n, ext[n - 1], ext[n]);
  e.lo = (n == 1) ? 0.0 : edge(n - 1, ext[n - 1], ext[n]);
  return e;
}

double midgap_frequency(const UnitCell& cell) {
  const BandEdges b1 = band_edges_1d(cell, 1);
  const BandEdges b2 = band_edges_1d(cell, 2);
  return 0.5 * (b1.hi + b2.lo);
}

double band_frequency_1d(const UnitCell& cell, int band_index, double K) {
  const double h = cell.period();
  if (K < 0.0 || K * h > std::numbers::pi + 1e-12)
    throw std::invalid_argument("band_frequency_1d: K outside [0, pi/h]");
  const Layer& a = cell.layer(0);
  const Layer& b = cell.layer(1);
  if (a.modulus == b.modulus && a.density == b.density && band_index >= 1) {
    // Folded light line of a homogeneous medium.
    const double c = std::sqrt(a.modulus / a.density);
    const double base = std::numbers::pi * (band_index - band_index % 2) / h;
    return c * (band_index % 2 ? base + K : base - K);
  }
  const BandEdges e = band_edges_1d(cell, band_index);
  const double target = std::cos(K * h);
  auto g = [&](double w) { return dispersion_rhs_1d(cell, w) - target; };
  const double glo = g(e.lo), ghi = g(e.hi);
  if (std::abs(glo) < 1e-13) return e.lo;
  if (std::abs(ghi) < 1e-13) return e.hi;
  return bracket_root(g, e.lo, e.hi);
}

cplx k2_from_sq(double k2sq) {
  if (k2sq >= 0.0) return {std::sqrt(k2sq), 0.0};
  return {0.0, -std::sqrt(-k2sq)};
}

std::vector<double> k2sq_roots(const UnitCell& cell, double omega, double k1, int count,
                               const K2RootOptions& opts) {
  if (count < 1) throw std::invalid_argument("k2_roots: count < 1");
  const double h = cell.period();
  double smax = 0.0;
  for (int i = 0; i < 2; ++i)
    smax = std::max(smax, omega * omega * cell.layer(i).density / cell.layer(i).modulus);
  const double target = std::cos(k1 * h);
  auto g = [&](double t) { return dispersion_rhs_2d(cell, omega, smax - t * t) - target; };
  const double step = opts.t_step > 0.0 ? opts.t_step : std::numbers::pi / (400.0 * h);
  const double cap = opts.window_cap / h;
  double width = std::max(2.0 * std::numbers::pi * (count + 2) / h, std::sqrt(smax) + 1.0);
  for (;;) {
    width = std::min(width, cap);
    const auto found = scan_roots(g, 0.0, width, step, opts.touch_tol);
    std::vector<double> out;
    for (const auto& r : found)
      for (int m = 0; m < r.multiplicity; ++m) out.push_back(smax - r.x * r.x);
    if (static_cast<int>(out.size()) >= count) {
      out.resize(count);
      return out;
    }
    if (width >= cap)
      throw SolverError("k2_roots: root count " + std::to_string(count) +
                        " unreachable within scan window cap " + std::to_string(opts.window_cap));
    width *= 2.0;
  }
}

std::vector<cplx> k2_roots(const UnitCell& cell, double omega, double k1, int count,
                           const K2RootOptions& opts) {
  std::vector<cplx> out;
  for (double s : k2sq_roots(cell, omega, k1, count, opts)) out.push_back(k2_from_sq(s));
  return out;
}

namespace {

Eigen::Vector2cd propagate(const Layer& l, double omega, double k2sq, double d,
                           const Eigen::Vector2cd& s) {
  return layer_propagator(l, omega, k2sq, d).cast<cplx>() * s;
}

}  // namespace

cplx BlochMode2D::value(double x1) const {
  const double h = cell.period();
  const double n = std::floor(x1 / h);
  double xi = x1 - n * h;
  const cplx phase = std::exp(cplx(0.0, -k1 * h * n));
  const double ha = cell.layer_a().thickness;
  if (xi < ha) return phase * propagate(cell.layer_a(), omega, k2sq, xi, start[0])(0);
  return phase * propagate(cell.layer_b(), omega, k2sq, xi - ha, start[1])(0);
}

cplx BlochMode2D::traction(double x1) const {
  const double h = cell.period();
  const double n = std::floor(x1 / h);
  double xi = x1 - n * h;
  const cplx phase = std::exp(cplx(0.0, -k1 * h * n));
  const double ha = cell.layer_a().thickness;
  if (xi < ha) return phase * propagate(cell.layer_a(), omega, k2sq, xi, start[0])(1);
  return phase * propagate(cell.layer_b(), omega, k2sq, xi - ha, start[1])(1);
}

double BlochMode2D::interface_residual() const {
  const Eigen::Vector2cd end_a =
      propagate(cell.layer_a(), omega, k2sq, cell.layer_a().thickness, start[0]);
  return (end_a - start[1]).norm() / start[0].norm();
}

double BlochMode2D::bloch_residual() const {
  const Eigen::Vector2cd end_b =
      propagate(cell.layer_b(), omega, k2sq, cell.layer_b().thickness, start[1]);
  const cplx lambda = std::exp(cplx(0.0, -k1 * cell.period()));
  return (end_b - lambda * start[0]).norm() / start[0].norm();
}

BlochMode2D bloch_mode_shape(const UnitCell& cell, double omega, double k1, cplx k2,
                             int branch) {
  const cplx k2sq_c = k2 * k2;
  const double scale = std::max(1.0, std::abs(k2sq_c));
  if (std::abs(k2sq_c.imag()) > 1e-10 * scale)
    throw std::invalid_argument("bloch_mode_shape: k2^2 must be real");
  const double s = k2sq_c.real();
  const double mismatch = std::abs(dispersion_rhs_2d(cell, omega, s) - std::cos(k1 * cell.period()));
  if (mismatch > 1e-8)
    throw std::invalid_argument("bloch_mode_shape: (omega, k1, k2) off the dispersion surface, residual " +
                                std::to_string(mismatch));
  const Eigen::Matrix2cd m = cell_propagator(cell, omega, s).cast<cplx>();
  const cplx lambda = std::exp(cplx(0.0, -k1 * cell.period()));
  Eigen::Vector2cd v1(m(0, 1), lambda - m(0, 0));
  Eigen::Vector2cd v2(lambda - m(1, 1), m(1, 0));
  Eigen::Vector2cd v;
  const double mnorm = m.norm();
  if (std::max(v1.norm(), v2.norm()) <= 1e-9 * mnorm) {
    v = branch == 0 ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
  } else {
    v = v1.norm() >= v2.norm() ? v1 : v2;
  }

  BlochMode2D mode;
  mode.cell = cell;
  mode.omega = omega;
  mode.k1 = k1;
  mode.k2 = k2;
  mode.k2sq = s;
  mode.start[0] = v;
  mode.start[1] = propagate(cell.layer_a(), omega, s, cell.layer_a().thickness, v);

  double peak = 0.0;
  constexpr int samples = 64;
  for (int i = 0; i < 2; ++i) {
    const Layer& l = cell.layer(i);
    for (int j = 0; j <= samples; ++j) {
      const double d = l.thickness * j / samples;
      peak = std::max(peak, std::abs(propagate(l, omega, s, d, mode.start[i])(0)));
    }
  }
  if (peak == 0.0) throw SolverError("bloch_mode_shape: vanishing mode");
  mode.start[0] /= peak;
  mode.start[1] /= peak;
  return mode;
}

}  // namespace mbh
