#include "mbhom/finescale.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mbhom/errors.hpp"

namespace mbh {

namespace {

constexpr cplx I(0.0, 1.0);

struct Solved1D {
  cplx R, T;
  cplx lambda;          // Bloch multiplier per cell (single boundary)
  Eigen::Vector2cd v;   // Bloch state at x = 0 (single boundary)
  Eigen::Vector2cd s0;  // state at x = 0
  double omega;
  bool gap = false;
  double condition = 1.0;
};

Eigen::Matrix2cd matrix_power(const Eigen::Matrix2cd& m, int n) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd base = m;
  while (n > 0) {
    if (n & 1) out = base * out;
    base = base * base;
    n >>= 1;
  }
  return out;
}

double cond2(const Eigen::MatrixXcd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

// Bloch state of the semi-infinite laminate carrying energy away from x = 0
// (or decaying into it inside a gap); nullopt at a band edge.
std::optional<std::pair<cplx, Eigen::Vector2cd>> outgoing_bloch(const Eigen::Matrix2d& m,
                                                                double omega) {
  const double r = 0.5 * m.trace();
  std::array<cplx, 2> lam;
  if (std::abs(r) < 1.0) {
    const double q = std::sqrt(1.0 - r * r);
    lam = {cplx(r, q), cplx(r, -q)};
  } else {
    const double q = std::sqrt(r * r - 1.0);
    // Decaying multiplier first.
    lam = r > 0 ? std::array<cplx, 2>{r - q, r + q} : std::array<cplx, 2>{r + q, r - q};
  }
  const Eigen::Matrix2cd mc = m.cast<cplx>();
  for (const cplx& l : lam) {
    Eigen::Vector2cd v1(mc(0, 1), l - mc(0, 0));
    Eigen::Vector2cd v2(l - mc(1, 1), mc(1, 0));
    Eigen::Vector2cd v = v1.norm() >= v2.norm() ? v1 : v2;
    if (v.norm() <= 1e-12 * m.norm()) return std::nullopt;
    v /= v.norm();
    if (std::abs(r) >= 1.0) return std::make_pair(l, v);
    if (state_flux(v, omega) > 0.0) return std::make_pair(l, v);
  }
  return std::nullopt;
}

Solved1D solve_1d(const ScatteringProblem1D& p) {
  if (!(p.omega > 0.0)) throw std::invalid_argument("scatter_1d: omega must be positive");
  if (p.geometry == Geometry1D::double_boundary && p.slab_cells < 1)
    throw std::invalid_argument("scatter_1d: slab_cells must be >= 1");
  double omega = p.omega;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double k = p.hom.wavenumber(omega);
    const double z = p.hom.modulus * k;
    const Eigen::Vector2cd a(1.0, -I * z);  // incident state at x = 0
    const Eigen::Vector2cd b(1.0, I * z);   // reflected state per unit amplitude
    const Eigen::Matrix2d m = cell_propagator(p.cell, omega, 0.0, p.ordering);
    Solved1D s;
    s.omega = omega;
    if (p.geometry == Geometry1D::single_boundary) {
      auto bloch = outgoing_bloch(m, omega);
      if (!bloch) {
        omega *= 1.0 + 1e-12;
        continue;
      }
      s.lambda = bloch->first;
      s.v = bloch->second;
      s.gap = std::abs(0.5 * m.trace()) > 1.0;
      Eigen::Matrix2cd A;
      A << b(0), -s.v(0), b(1), -s.v(1);
      const Eigen::Vector2cd x = A.fullPivLu().solve(-a);
      s.R = x(0);
      s.T = x(1);
      s.condition = cond2(A);
    } else {
      const Eigen::Matrix2cd ms = matrix_power(m.cast<cplx>(), p.slab_cells);
      Eigen::Matrix2cd A;
      const Eigen::Vector2cd msb = ms * b;
      A << msb(0), -a(0), msb(1), -a(1);
      const Eigen::Vector2cd x = A.fullPivLu().solve(-(ms * a));
      s.R = x(0);
      s.T = x(1);
      s.condition = cond2(A);
    }
    s.s0 = a + s.R * b;
    if (!std::isfinite(std::abs(s.R)) || !std::isfinite(std::abs(s.T))) {
      omega *= 1.0 + 1e-12;
      continue;
    }
    return s;
  }
  throw SolverError("scatter_1d: singular system at omega=" + std::to_string(p.omega));
}

}  // namespace

double Homogeneous::wavenumber(double omega) const { return omega * std::sqrt(density / modulus); }

Eigen::Matrix2cd transfer_matrix(const Layer& layer, double omega) {
  if (omega < 0.0) throw std::invalid_argument("transfer_matrix: omega < 0");
  return layer_propagator(layer, omega).cast<cplx>();
}

Eigen::Matrix2cd transfer_matrix(const UnitCell& cell, double omega, Ordering ordering) {
  if (omega < 0.0) throw std::invalid_argument("transfer_matrix: omega < 0");
  return cell_propagator(cell, omega, 0.0, ordering).cast<cplx>();
}

double state_flux(const Eigen::Vector2cd& state, double omega) {
  return 0.5 * omega * std::imag(state(0) * std::conj(state(1)));
}

ScatteringSolution scatter_1d(const ScatteringProblem1D& p) {
  const Solved1D s = solve_1d(p);
  const double k = p.hom.wavenumber(s.omega);
  const double incident_flux = 0.5 * s.omega * p.hom.modulus * k;
  ScatteringSolution out;
  out.condition = s.condition;
  out.reflected.push_back({cplx(-k, 0.0), s.R, true});
  out.R_E = std::norm(s.R);
  if (p.geometry == Geometry1D::single_boundary) {
    const cplx K = std::log(s.lambda) * I / p.cell.period();  // lambda = exp(-i K h)
    out.transmitted.push_back({K, s.T, !s.gap});
    out.T_E = s.gap ? 0.0 : state_flux(s.T * s.v, s.omega) / incident_flux;
  } else {
    out.transmitted.push_back({cplx(k, 0.0), s.T, true});
    out.T_E = std::norm(s.T);
  }
  return out;
}

std::vector<cplx> field_1d(const ScatteringProblem1D& p, const std::vector<double>& xs) {
  const Solved1D s = solve_1d(p);
  const double k = p.hom.wavenumber(s.omega);
  const double h = p.cell.period();
  const auto seq = UnitCell::sequence(p.ordering);
  const Eigen::Matrix2cd m = cell_propagator(p.cell, s.omega, 0.0, p.ordering).cast<cplx>();
  const double slab = p.slab_cells * h;
  std::vector<cplx> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (x < 0.0) {
      out.push_back(std::exp(-I * k * x) + s.R * std::exp(I * k * x));
      continue;
    }
    if (p.geometry == Geometry1D::double_boundary && x > slab) {
      out.push_back(s.T * std::exp(-I * k * (x - slab)));
      continue;
    }
    int n = static_cast<int>(std::floor(x / h));
    if (p.geometry == Geometry1D::double_boundary) n = std::min(n, p.slab_cells - 1);
    Eigen::Vector2cd st;
    if (p.geometry == Geometry1D::single_boundary)
      st = s.T * std::pow(s.lambda, n) * s.v;
    else
      st = matrix_power(m, n) * s.s0;
    double d = x - n * h;
    const Layer& first = p.cell.layer(seq[0]);
    const Layer& second = p.cell.layer(seq[1]);
    if (d <= first.thickness) {
      st = layer_propagator(first, s.omega, 0.0, d).cast<cplx>() * st;
    } else {
      st = layer_propagator(first, s.omega, 0.0).cast<cplx>() * st;
      st = layer_propagator(second, s.omega, 0.0, d - first.thickness).cast<cplx>() * st;
    }
    out.push_back(st(0));
  }
  return out;
}

double ScatteringProblem2D::incidence_k1() const {
  if (theta.has_value() == k1.has_value())
    throw std::invalid_argument("scatter_2d: give exactly one of theta or k1");
  if (k1) return *k1;
  if (!(*theta > 0.0 && *theta <= std::numbers::pi / 2 + 1e-15))
    throw std::invalid_argument("scatter_2d: theta must lie in (0, pi/2]");
  return hom.wavenumber(omega) * std::cos(*theta);
}

ScatteringSolution2D scatter_2d_fixed(const ScatteringProblem2D& p, int M) {
  if (M < 0) throw std::invalid_argument("scatter_2d: truncation < 0");
  const double k1 = p.incidence_k1();
  const double h = p.cell.period();
  const double K0 = p.hom.wavenumber(p.omega);
  if (!(std::abs(k1) < K0))
    throw std::invalid_argument("scatter_2d: incidence requires |k1| < K0");
  const double K2inc = std::sqrt(K0 * K0 - k1 * k1);
  const double mu_h = p.hom.modulus;
  const int N = 2 * M + 1;

  ScatteringSolution2D sol;
  sol.k1 = k1;
  sol.truncation = M;
  for (int m = -M; m <= M; ++m) {
    const double xi = k1 + 2.0 * std::numbers::pi * m / h;
    sol.harmonic_xi.push_back(xi);
    const double d = K0 * K0 - xi * xi;
    sol.harmonic_kappa.push_back(d >= 0.0 ? cplx(std::sqrt(d), 0.0) : cplx(0.0, -std::sqrt(-d)));
  }

  const auto s = k2sq_roots(p.cell, p.omega, k1, N);
  for (int n = 0; n < N; ++n) {
    const int branch = (n > 0 && s[n] == s[n - 1]) ? 1 : 0;
    sol.modes.push_back(bloch_mode_shape(p.cell, p.omega, k1, k2_from_sq(s[n]), branch));
  }

  // Mode values at quadrature nodes, layer by layer.
  const int panels = std::max(4, p.panels_per_harmonic * M);
  std::vector<double> xq, wq, muq;
  std::vector<int> lid;
  double x0 = 0.0;
  for (int j = 0; j < 2; ++j) {
    const Layer& l = p.cell.layer(j);
    const auto q = gauss_legendre_panels(0.0, l.thickness, panels);
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      xq.push_back(x0 + q.x[i]);
      wq.push_back(q.w[i]);
      muq.push_back(l.modulus);
      lid.push_back(j);
    }
    x0 += l.thickness;
  }
  const std::size_t nq = xq.size();
  Eigen::MatrixXcd U(nq, N);
  for (int n = 0; n < N; ++n) {
    const BlochMode2D& md = sol.modes[n];
    double start = 0.0;
    for (std::size_t i = 0; i < nq; ++i) {
      start = lid[i] == 0 ? 0.0 : p.cell.layer_a().thickness;
      const Layer& l = p.cell.layer(lid[i]);
      U(i, n) = (layer_propagator(l, p.omega, md.k2sq, xq[i] - start).cast<cplx>() *
                 md.start[lid[i]])(0);
    }
  }
  Eigen::MatrixXcd H(N, nq), Hmu(N, nq);
  for (int m = 0; m < N; ++m)
    for (std::size_t i = 0; i < nq; ++i) {
      const cplx e = std::exp(I * sol.harmonic_xi[m] * xq[i]) * (wq[i] / h);
      H(m, i) = e;
      Hmu(m, i) = e * muq[i];
    }
  const Eigen::MatrixXcd P = H * U;
  const Eigen::MatrixXcd Q = Hmu * U;
  Eigen::VectorXcd kappa(N), k2(N);
  for (int m = 0; m < N; ++m) kappa(m) = sol.harmonic_kappa[m];
  for (int n = 0; n < N; ++n) k2(n) = sol.modes[n].k2;
  const Eigen::MatrixXcd A = mu_h * kappa.asDiagonal() * P + Q * k2.asDiagonal();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
  rhs(M) = mu_h * (K2inc + kappa(M));
  auto lu = A.fullPivLu();
  const Eigen::VectorXcd T = lu.solve(rhs);
  Eigen::VectorXcd R = P * T;
  R(M) -= 1.0;
  sol.condition = cond2(A);

  for (int m = 0; m < N; ++m) {
    const bool prop = sol.harmonic_kappa[m].imag() == 0.0;
    sol.harmonic_amplitudes.push_back(R(m));
    sol.reflected.push_back({sol.harmonic_kappa[m], R(m), prop});
    if (prop) sol.R_E += std::norm(R(m)) * sol.harmonic_kappa[m].real() / K2inc;
  }
  sol.specular = R(M);
  for (int n = 0; n < N; ++n) {
    const bool prop = s[n] > 0.0;
    sol.mode_amplitudes.push_back(T(n));
    sol.transmitted.push_back({sol.modes[n].k2, T(n), prop});
    if (!prop) continue;
    ++sol.propagating_modes;
    double energy = 0.0;
    for (std::size_t i = 0; i < nq; ++i) energy += wq[i] * muq[i] * std::norm(U(i, n));
    sol.T_E += std::norm(T(n)) * sol.modes[n].k2.real() * energy / (mu_h * K2inc * h);
  }
  sol.history.push_back({M, sol.R_E, sol.T_E, sol.energy_defect(), sol.condition});
  return sol;
}

ScatteringSolution2D scatter_2d(const ScatteringProblem2D& p) {
  int M = std::max(0, p.truncation);
  std::vector<ConvergenceStep> history;
  for (;;) {
    ScatteringSolution2D sol = scatter_2d_fixed(p, M);
    history.push_back(sol.history.back());
    const int next = std::max(1, 2 * M);
    if (!p.grow || sol.energy_defect() < p.defect_tol || next > p.max_truncation) {
      sol.history = history;
      return sol;
    }
    M = next;
  }
}

cplx field_2d(const ScatteringProblem2D& p, const ScatteringSolution2D& sol, double x1,
              double x2) {
  const double K0 = p.hom.wavenumber(p.omega);
  const double K2inc = std::sqrt(K0 * K0 - sol.k1 * sol.k1);
  if (x2 < 0.0) {
    cplx u = std::exp(-I * (sol.k1 * x1 + K2inc * x2));
    for (std::size_t m = 0; m < sol.harmonic_xi.size(); ++m)
      u += sol.harmonic_amplitudes[m] *
           std::exp(-I * sol.harmonic_xi[m] * x1 + I * sol.harmonic_kappa[m] * x2);
    return u;
  }
  cplx u = 0.0;
  for (std::size_t n = 0; n < sol.modes.size(); ++n)
    u += sol.mode_amplitudes[n] * sol.modes[n].value(x1) * std::exp(-I * sol.modes[n].k2 * x2);
  return u;
}

}  // namespace mbh
