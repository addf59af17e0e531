#include "mbhom/ratfit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mbhom/errors.hpp"

namespace mbh {

namespace {

double poly_k2(const std::vector<double>& c, double k) {
  const double k2 = k * k;
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * k2 + c[i];
  return v;
}

double dpoly_k2(const std::vector<double>& c, double k) {
  // d/dk sum c_i k^(2i)
  double v = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) v += 2.0 * i * c[i] * std::pow(k, 2.0 * i - 1.0);
  return v;
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

double rms_value(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s / static_cast<double>(a.size()));
}

// Levenberg-Marquardt with a forward-difference Jacobian and projection onto
// the nonnegative orthant.
Eigen::VectorXd lm_nonnegative(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& resid,
                               Eigen::VectorXd x, int max_iter = 300) {
  x = x.cwiseMax(0.0);
  Eigen::VectorXd r = resid(x);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::MatrixXd J(r.size(), x.size());
    for (int j = 0; j < x.size(); ++j) {
      const double hstep = 1e-7 * std::max(std::abs(x(j)), 1e-4);
      Eigen::VectorXd xp = x;
      xp(j) += hstep;
      J.col(j) = (resid(xp) - r) / hstep;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd Aug = JtJ;
      for (int j = 0; j < x.size(); ++j) Aug(j, j) += lambda * std::max(JtJ(j, j), 1e-12);
      const Eigen::VectorXd step = Aug.ldlt().solve(-g);
      const Eigen::VectorXd xn = (x + step).cwiseMax(0.0);
      const Eigen::VectorXd rn = resid(xn);
      const double cn = rn.squaredNorm();
      if (cn < cost) {
        const double rel = (cost - cn) / std::max(cost, 1e-300);
        const double dx = (xn - x).norm() / std::max(x.norm(), 1e-300);
        x = xn;
        r = rn;
        cost = cn;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (rel < 1e-15 || dx < 1e-13) return x;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  return x;
}

}  // namespace

RationalBranch1D RationalBranch1D::classical(double modulus, double density) {
  return {{0.0, modulus}, {density}};
}

int RationalBranch1D::order() const {
  int n = 0;
  for (std::size_t i = 0; i < num.size(); ++i)
    if (num[i] != 0.0) n = std::max(n, static_cast<int>(i));
  for (std::size_t i = 0; i < den.size(); ++i)
    if (den[i] != 0.0) n = std::max(n, static_cast<int>(i));
  return n;
}

double RationalBranch1D::numerator(double k) const { return poly_k2(num, k); }
double RationalBranch1D::denominator(double k) const { return poly_k2(den, k); }
double RationalBranch1D::omega_sq(double k) const { return numerator(k) / denominator(k); }
double RationalBranch1D::omega(double k) const { return std::sqrt(std::max(0.0, omega_sq(k))); }

double RationalBranch1D::domega_dk(double k) const {
  const double n = numerator(k), d = denominator(k);
  const double w = omega(k);
  if (w == 0.0) return std::sqrt(std::max(0.0, num.size() > 1 ? num[1] / den[0] : 0.0));
  return (dpoly_k2(num, k) * d - n * dpoly_k2(den, k)) / (d * d) / (2.0 * w);
}

void RationalBranch1D::validate() const {
  if (den.empty() || !(den[0] > 0.0))
    throw std::invalid_argument("rational branch: D0 must be positive");
  if (!num.empty() && num[0] != 0.0)
    throw std::invalid_argument("rational branch: num[0] must be zero");
  for (double v : num)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("rational branch: numerator coefficients must be >= 0");
  for (double v : den)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("rational branch: denominator coefficients must be >= 0");
}

int order_index(int label) {
  switch (label) {
    case 22: return 1;
    case 44: return 2;
    case 66: return 3;
    case 88: return 4;
    default:
      throw std::invalid_argument("unknown approximation order " + std::to_string(label) +
                                  " (expected 22, 44, 66 or 88)");
  }
}

CoefficientMask default_mask(int order) {
  switch (order) {
    case 1: return {{}, {1}};
    case 2: return {{2}, {2}};
    case 3: return {{3}, {1, 3}};
    case 4: return {{4}, {1, 4}};
    default: throw std::invalid_argument("default_mask: order must be 1..4");
  }
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A0, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A0.cols());
  if (A0.rows() != b.size()) throw std::invalid_argument("nnls: dimension mismatch");
  if (n == 0) return Eigen::VectorXd();
  // Unit-norm columns for conditioning; positive scaling preserves x >= 0.
  Eigen::VectorXd scale(n);
  Eigen::MatrixXd A = A0;
  for (int j = 0; j < n; ++j) {
    scale(j) = A.col(j).norm();
    if (scale(j) == 0.0) scale(j) = 1.0;
    A.col(j) /= scale(j);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * std::max<double>(A.rows(), n) *
                     std::max(1.0, b.norm());
  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd Ap(A.rows(), idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
    const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    z.setZero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) z(idx[c]) = zp(c);
  };
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    int t = -1;
    double wmax = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w(j) > wmax) {
        wmax = w(j);
        t = j;
      }
    if (t < 0) break;
    passive[t] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      Eigen::VectorXd z;
      solve_passive(z);
      bool feasible = true;
      for (int j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (int j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      x += alpha * (z - x);
      for (int j = 0; j < n; ++j)
        if (passive[j] && x(j) <= tol * 1e-3) {
          passive[j] = false;
          x(j) = 0.0;
        }
    }
  }
  return x.cwiseQuotient(scale);
}

void band1_samples(const UnitCell& cell, int points, std::vector<double>& K,
                   std::vector<double>& omega) {
  if (points < 2) throw std::invalid_argument("fit: at least two grid points required");
  const double h = cell.period();
  const double edge = band_edges_1d(cell, 1).hi;
  K.clear();
  omega.clear();
  for (int j = 1; j <= points; ++j) {
    const double Kh = std::numbers::pi * j / points;
    K.push_back(Kh / h);
    if (j == points) {
      omega.push_back(edge);
      continue;
    }
    const double target = std::cos(Kh);
    omega.push_back(bracket_root([&](double w) { return dispersion_rhs_1d(cell, w) - target; }, 0.0, edge));
  }
}

FitResult1D fit_branch_1d(const UnitCell& cell, int order, const FitOptions1D& opts) {
  if (order < 1 || order > 4) throw std::invalid_argument("fit_branch_1d: order must be 1..4");
  FitResult1D res;
  res.mask = opts.mask ? *opts.mask : default_mask(order);
  for (int i : res.mask.num_free)
    if (i < 2 || i > order) throw std::invalid_argument("fit_branch_1d: infeasible numerator mask");
  for (int i : res.mask.den_free)
    if (i < 1 || i > order) throw std::invalid_argument("fit_branch_1d: infeasible denominator mask");
  band1_samples(cell, opts.points, res.K, res.omega_exact);

  const double N1 = harmonic_mean_modulus(cell);
  const double D0 = mean_density(cell);
  const int rows = static_cast<int>(res.K.size());
  const int cols = static_cast<int>(res.mask.num_free.size() + res.mask.den_free.size());
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (int r = 0; r < rows; ++r) {
    const double k = res.K[r], w2 = res.omega_exact[r] * res.omega_exact[r];
    int c = 0;
    for (int i : res.mask.num_free) A(r, c++) = -std::pow(k, 2 * i);
    for (int i : res.mask.den_free) A(r, c++) = w2 * std::pow(k, 2 * i);
    b(r) = N1 * k * k - w2 * D0;
  }
  const Eigen::VectorXd x = nnls(A, b);
  res.linear_residual = (A * x - b).norm();

  res.branch.num.assign(order + 1, 0.0);
  res.branch.den.assign(order + 1, 0.0);
  res.branch.num[1] = N1;
  res.branch.den[0] = D0;
  int c = 0;
  for (int i : res.mask.num_free) res.branch.num[i] = x(c++);
  for (int i : res.mask.den_free) res.branch.den[i] = x(c++);

  std::vector<double> wf;
  for (double k : res.K) wf.push_back(res.branch.omega(k));
  res.rms_omega = rms(wf, res.omega_exact);
  res.rel_rms_omega = res.rms_omega / rms_value(res.omega_exact);
  res.edge_exact = res.omega_exact.back();
  res.edge_fit = wf.back();
  return res;
}

double branch_curve_distance(const RationalBranch1D& a, const RationalBranch1D& b,
                             const UnitCell& cell, int points) {
  std::vector<double> wa, wb;
  for (int j = 1; j <= points; ++j) {
    const double k = std::numbers::pi * j / points / cell.period();
    wa.push_back(a.omega(k));
    wb.push_back(b.omega(k));
  }
  return rms(wa, wb) / rms_value(wb);
}

double TensorBranch2D::omega_sq(double K1, double K2) const {
  const Eigen::Vector2d K(K1, K2);
  return K.dot(N0 * K) / (D0 + K.dot(D1 * K));
}

void TensorBranch2D::validate() const {
  if (!(D0 > 0.0)) throw std::invalid_argument("tensor branch: D0 must be positive");
  for (const Eigen::Matrix2d* m : {&N0, &D1}) {
    if (std::abs((*m)(0, 1) - (*m)(1, 0)) > 1e-12 * std::max(1.0, m->norm()))
      throw std::invalid_argument("tensor branch: tensors must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(*m);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, m->norm()))
      throw std::invalid_argument("tensor branch: tensors must be positive semidefinite");
  }
}

std::vector<double> band_frequencies_2d(const UnitCell& cell, double K1, double K2, int bands) {
  const double h = cell.period();
  double tau = 0.0, cmax = 0.0;
  for (int i = 0; i < 2; ++i) {
    const Layer& l = cell.layer(i);
    tau += l.thickness * std::sqrt(l.density / l.modulus);
    cmax = std::max(cmax, std::sqrt(l.modulus / l.density));
  }
  const double target = std::cos(K1 * h);
  auto g = [&](double w) { return dispersion_rhs_2d(cell, w, K2 * K2) - target; };
  const double step = std::numbers::pi / (200.0 * tau);
  double wmax = cmax * std::abs(K2) + (bands + 1) * std::numbers::pi / tau;
  for (int grow = 0; grow < 20; ++grow) {
    const auto roots = scan_roots(g, 1e-12, wmax, step, 1e-12);
    std::vector<double> out;
    for (const auto& r : roots)
      for (int m = 0; m < r.multiplicity; ++m) out.push_back(r.x);
    if (static_cast<int>(out.size()) >= bands) {
      out.resize(bands);
      return out;
    }
    wmax *= 2.0;
  }
  throw SolverError("band_frequencies_2d: bands not found");
}

std::vector<BandSample2D> band_samples_2d(const UnitCell& cell, const FitOptions2D& opts) {
  const double h = cell.period();
  const double K1max = opts.K1max > 0.0 ? opts.K1max : std::numbers::pi / h;
  const double K2max = opts.K2max > 0.0 ? opts.K2max : 2.0 * std::numbers::pi / h;
  std::vector<BandSample2D> out;
  for (int i = 0; i < opts.n1; ++i) {
    for (int j = 0; j < opts.n2; ++j) {
      if (i == 0 && j == 0) continue;
      const double K1 = K1max * i / (opts.n1 - 1);
      const double K2 = K2max * j / (opts.n2 - 1);
      const auto w = band_frequencies_2d(cell, K1, K2, 2);
      out.push_back({K1, K2, w[0], w[1]});
    }
  }
  return out;
}

FitResult2D fit_branch_2d(const UnitCell& cell, const std::vector<BandSample2D>& s) {
  const double D0 = mean_density(cell);
  const int m = static_cast<int>(s.size());
  Eigen::MatrixXd A(m, 4);
  Eigen::VectorXd b(m);
  for (int r = 0; r < m; ++r) {
    const double a1 = s[r].K1 * s[r].K1, a2 = s[r].K2 * s[r].K2, w2 = s[r].omega1 * s[r].omega1;
    A.row(r) << a1, a2, -w2 * a1, -w2 * a2;
    b(r) = w2 * D0;
  }
  const Eigen::VectorXd x0 = nnls(A, b);
  auto model = [&](const Eigen::VectorXd& x) {
    TensorBranch2D t;
    t.N0.diagonal() << x(0), x(1);
    t.D1.diagonal() << x(2), x(3);
    t.D0 = D0;
    return t;
  };
  auto resid = [&](const Eigen::VectorXd& x) {
    const TensorBranch2D t = model(x);
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i)
      r(i) = std::sqrt(std::max(0.0, t.omega_sq(s[i].K1, s[i].K2))) - s[i].omega1;
    return r;
  };
  const Eigen::VectorXd x = lm_nonnegative(resid, x0);
  FitResult2D res;
  res.branch = model(x);
  const Eigen::VectorXd r = resid(x);
  res.rms_omega = std::sqrt(r.squaredNorm() / m);
  for (int i = 0; i < m; ++i) res.max_rel_error = std::max(res.max_rel_error, std::abs(r(i)) / s[i].omega1);
  return res;
}

FitResult2D fit_branch_2d(const UnitCell& cell, const FitOptions2D& opts) {
  return fit_branch_2d(cell, band_samples_2d(cell, opts));
}

double OpticBranch1D::omega_sq(double k) const {
  return omega_b * omega_b - p * k * k / (1.0 + q * k * k);
}

double MultibandModel1D::acoustic_omega_sq(double k) const {
  return n * k * k / (1.0 + d * k * k);
}

MultibandCoeffs1D derive_multiband_coeffs(const MultibandModel1D& m) {
  const double wb2 = m.optic.omega_b * m.optic.omega_b;
  const double p = m.optic.p, q = m.optic.q, n = m.n, d = m.d;
  return {q + d,
          q * d,
          -wb2 * d * q + p * d - n * q,
          p - wb2 * q - wb2 * d - n,
          wb2,
          wb2 * n,
          wb2 * n * q - n * p};
}

double product_dispersion(const MultibandModel1D& m, double k, double omega) {
  const double k2 = k * k, w2 = omega * omega;
  const double x = w2 * (1.0 + m.d * k2) - m.n * k2;
  const double y = (w2 - m.optic.omega_b * m.optic.omega_b) * (1.0 + m.optic.q * k2) + m.optic.p * k2;
  return x * y;
}

double multiband_pde_residual(const MultibandCoeffs1D& a, double k, double omega) {
  const double k2 = k * k, k4 = k2 * k2, w2 = omega * omega, w4 = w2 * w2;
  return w4 + a.A1 * w4 * k2 + a.A2 * w4 * k4 - a.A5 * w2 + a.A4 * w2 * k2 + a.A3 * w2 * k4 +
         a.A6 * k2 + a.A7 * k4;
}

TwoBandFit1D fit_two_band_1d(const UnitCell& cell, const TwoBandFitOptions1D& opts) {
  TwoBandFit1D res;
  const double h = cell.period();
  const double D0 = mean_density(cell);
  const BandEdges b1 = band_edges_1d(cell, 1);
  const BandEdges b2 = band_edges_1d(cell, 2);
  res.exact_gap_lo = b1.hi;
  res.exact_gap_hi = b2.lo;
  MultibandModel1D& m = res.model;
  m.density = D0;
  m.n = harmonic_mean_modulus(cell) / D0;
  m.optic.omega_b = b2.hi;
  const double wb2 = m.optic.omega_b * m.optic.omega_b;

  std::vector<double> K, w1, w2;
  band1_samples(cell, opts.points, K, w1);
  for (double k : K) {
    if (std::abs(k * h - std::numbers::pi) < 1e-14) {
      w2.push_back(b2.lo);
      continue;
    }
    const double target = std::cos(k * h);
    w2.push_back(bracket_root([&](double w) { return dispersion_rhs_1d(cell, w) - target; }, b2.lo, b2.hi));
  }

  if (opts.pin_gap) {
    m.d = m.n / (b1.hi * b1.hi);
    const double e2 = b2.lo * b2.lo;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < K.size(); ++j) {
      const double a = wb2 - w2[j] * w2[j];
      const double b = K[j] * K[j] * (e2 - w2[j] * w2[j]);
      num += a * b;
      den += b * b;
    }
    m.optic.q = den > 0.0 ? std::max(0.0, -num / den) : 0.0;
    m.optic.p = (wb2 - e2) * m.optic.q;
  } else {
    const FitResult1D f = fit_branch_1d(cell, 1, {opts.points, std::nullopt});
    m.d = f.branch.den[1] / D0;
    Eigen::MatrixXd A(K.size(), 2);
    Eigen::VectorXd b(K.size());
    for (std::size_t j = 0; j < K.size(); ++j) {
      const double k2 = K[j] * K[j], g = wb2 - w2[j] * w2[j];
      A.row(j) << k2, -g * k2;
      b(j) = g;
    }
    const Eigen::VectorXd x = nnls(A, b);
    m.optic.p = x(0);
    m.optic.q = x(1);
  }

  std::vector<double> fa, fo;
  for (double k : K) {
    fa.push_back(std::sqrt(std::max(0.0, m.acoustic_omega_sq(k))));
    fo.push_back(std::sqrt(std::max(0.0, m.optic.omega_sq(k))));
  }
  res.rms_acoustic = rms(fa, w1);
  res.rms_optic = rms(fo, w2);
  res.gap_lo = m.d > 0.0 ? std::sqrt(m.n / m.d) : std::numeric_limits<double>::infinity();
  res.gap_hi = m.optic.q > 0.0 ? std::sqrt(std::max(0.0, wb2 - m.optic.p / m.optic.q)) : m.optic.omega_b;
  return res;
}

double OpticBranch2D::omega_sq(double K1, double K2) const {
  const Eigen::Vector2d K(K1, K2);
  return omega_b * omega_b - K.dot(P * K) / (1.0 + K.dot(Q * K));
}

MultibandCoeffs2D derive_multiband_coeffs(const MultibandModel2D& model) {
  const double D0 = model.acoustic.D0;
  const Eigen::Matrix2d N = model.acoustic.N0 / D0;
  const Eigen::Matrix2d D = model.acoustic.D1 / D0;
  const Eigen::Matrix2d& P = model.optic.P;
  const Eigen::Matrix2d& Q = model.optic.Q;
  const double wb2 = model.optic.omega_b * model.optic.omega_b;
  MultibandCoeffs2D a;
  a.A1 = Q + D;
  a.A4 = -wb2 * (Q + D) + P - N;
  a.A5 = wb2;
  a.A6 = wb2 * N;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          const int i = t4(m, n, p, q);
          a.A2[i] = D(m, n) * Q(p, q);
          a.A3[i] = -wb2 * D(m, n) * Q(p, q) + D(m, n) * P(p, q) - N(m, n) * Q(p, q);
          a.A7[i] = wb2 * N(m, n) * Q(p, q) - N(m, n) * P(p, q);
        }
  return a;
}

TwoBandFit2D fit_two_band_2d(const UnitCell& cell, const TwoBandFitOptions2D& opts) {
  const auto s = band_samples_2d(cell, opts.grid);
  const int m = static_cast<int>(s.size());
  TwoBandFit2D res;
  MultibandModel2D& md = res.model;
  md.optic.omega_b = band_edges_1d(cell, 2).hi;
  const double wb2 = md.optic.omega_b * md.optic.omega_b;
  const double D0 = mean_density(cell);

  if (opts.polynomial) {
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd ba(m), bo(m);
    for (int r = 0; r < m; ++r) {
      A.row(r) << s[r].K1 * s[r].K1, s[r].K2 * s[r].K2;
      ba(r) = s[r].omega1 * s[r].omega1;
      bo(r) = wb2 - s[r].omega2 * s[r].omega2;
    }
    const Eigen::VectorXd xa = A.colPivHouseholderQr().solve(ba);
    const Eigen::VectorXd xo = A.colPivHouseholderQr().solve(bo);
    md.acoustic.D0 = D0;
    md.acoustic.N0.diagonal() << D0 * xa(0), D0 * xa(1);
    md.optic.P.diagonal() << xo(0), xo(1);
  } else {
    md.acoustic = fit_branch_2d(cell, s).branch;
    Eigen::MatrixXd A(m, 4);
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) {
      const double a1 = s[r].K1 * s[r].K1, a2 = s[r].K2 * s[r].K2;
      const double g = s[r].omega2 * s[r].omega2 - wb2;
      A.row(r) << a1, a2, g * a1, g * a2;
      b(r) = -g;
    }
    const Eigen::VectorXd x0 = nnls(A, b);
    auto optic = [&](const Eigen::VectorXd& x) {
      OpticBranch2D o;
      o.omega_b = md.optic.omega_b;
      o.P.diagonal() << x(0), x(1);
      o.Q.diagonal() << x(2), x(3);
      return o;
    };
    auto resid = [&](const Eigen::VectorXd& x) {
      const OpticBranch2D o = optic(x);
      Eigen::VectorXd r(m);
      for (int i = 0; i < m; ++i)
        r(i) = std::sqrt(std::max(0.0, o.omega_sq(s[i].K1, s[i].K2))) - s[i].omega2;
      return r;
    };
    md.optic = optic(lm_nonnegative(resid, x0));
  }
  std::vector<double> fa, fo, ea, eo;
  for (const auto& p : s) {
    fa.push_back(std::sqrt(std::max(0.0, md.acoustic.omega_sq(p.K1, p.K2))));
    fo.push_back(std::sqrt(std::max(0.0, md.optic.omega_sq(p.K1, p.K2))));
    ea.push_back(p.omega1);
    eo.push_back(p.omega2);
  }
  res.rms_acoustic = rms(fa, ea);
  res.rms_optic = rms(fo, eo);
  return res;
}

}  // namespace mbh
