#include "mbhom/homsolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mbhom/errors.hpp"

namespace mbh {

namespace {

constexpr cplx I(0.0, 1.0);

// Degenerate roots or group-velocity ties; the solver retries at a nudged omega.
struct TieError : SolverError {
  using SolverError::SolverError;
};

int sign_pow(int e) { return (std::abs(e) % 2 == 0) ? 1 : -1; }

cplx ipow(cplx z, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

double omega_b_of(const HomogenizedMedium& m) {
  if (const auto* a = std::get_if<MultibandModel1D>(&m.model)) return a->optic.omega_b;
  if (const auto* b = std::get_if<MultibandModel2D>(&m.model)) return b->optic.omega_b;
  return 0.0;
}

Eigen::MatrixXd trim(Eigen::MatrixXd c) {
  while (c.rows() > 1) {
    const int n = static_cast<int>(c.rows()) - 1;
    if (c.row(n).cwiseAbs().maxCoeff() != 0.0 || c.col(n).cwiseAbs().maxCoeff() != 0.0) break;
    c = c.topLeftCorner(n, n).eval();
  }
  return c;
}

void require_diagonal(const Eigen::Matrix2d& m, const char* what) {
  if (m(0, 1) != 0.0 || m(1, 0) != 0.0)
    throw std::invalid_argument(std::string(what) + ": only diagonal tensors are supported in scattering");
}

double tensor_entry(const Tensor4& t, int m, int n, int p, int q) { return t[t4(m, n, p, q)]; }

// Ordered by |k| so that the result does not depend on root-finder order.
bool mode_less(const Mode& a, const Mode& b) {
  if (std::abs(a.k) != std::abs(b.k)) return std::abs(a.k) < std::abs(b.k);
  if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
  return a.k.imag() < b.k.imag();
}

cplx phase(cplx k, double x, double ref) { return std::exp(-I * k * (x - ref)); }

double char_value_at(const HomogenizedMedium& m, double omega, double k1, double k) {
  return normal_operator(m, omega, k1).char_value(k);
}

// dP/domega at fixed k by a five-point stencil.
double char_domega(const HomogenizedMedium& m, double omega, double k1, double k) {
  const double h = 1e-3 * omega;
  return (-char_value_at(m, omega + 2 * h, k1, k) + 8 * char_value_at(m, omega + h, k1, k) -
          8 * char_value_at(m, omega - h, k1, k) + char_value_at(m, omega - 2 * h, k1, k)) /
         (12.0 * h);
}

std::vector<cplx> poly_roots(const std::vector<double>& p) {
  const int n = static_cast<int>(p.size()) - 1;
  std::vector<cplx> roots;
  if (n == 1) {
    roots.push_back(-p[0] / p[1]);
    return roots;
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -p[i] / p[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()(i));
  // Newton polish.
  for (cplx& z : roots) {
    for (int it = 0; it < 3; ++it) {
      cplx f = 0.0, df = 0.0;
      for (int j = n; j >= 0; --j) {
        df = df * z + f;
        f = f * z + p[j];
      }
      if (df == 0.0) break;
      const cplx step = f / df;
      z -= step;
      if (std::abs(step) <= 1e-16 * std::abs(z)) break;
    }
  }
  return roots;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::fitted: return "fitted";
    case Provenance::published_table: return "published-table";
    case Provenance::classical_limit: return "classical-limit";
  }
  return "unknown";
}

HomogenizedMedium HomogenizedMedium::classical(double modulus, double density) {
  if (!(modulus > 0.0) || !(density > 0.0) || !std::isfinite(modulus) || !std::isfinite(density))
    throw std::invalid_argument("classical medium: modulus and density must be positive");
  return {ClassicalMedium{modulus, density}, Provenance::classical_limit, 0.0, false};
}

bool HomogenizedMedium::two_band() const {
  return std::holds_alternative<MultibandModel1D>(model) || std::holds_alternative<MultibandModel2D>(model);
}

std::string HomogenizedMedium::kind() const {
  switch (model.index()) {
    case 0: return "classical";
    case 1: return "single_band_1d";
    case 2: return "single_band_2d";
    case 3: return "two_band_1d";
    default: return "two_band_2d";
  }
}

std::vector<double> NormalOperator::char_poly() const {
  const int n = order();
  std::vector<double> p(n + 1, 0.0);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      if ((a + b) % 2 == 0) p[(a + b) / 2] += c(a, b) * sign_pow((a - b) / 2);
  return p;
}

double NormalOperator::char_value(cplx k) const {
  const int n = order();
  cplx v = 0.0;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) v += c(a, b) * ipow(I * k, a) * ipow(-I * k, b);
  return v.real();
}

NormalOperator normal_operator(const HomogenizedMedium& medium, double omega, double k1) {
  const double w2 = omega * omega, w4 = w2 * w2;
  Eigen::MatrixXd c;
  if (const auto* m = std::get_if<ClassicalMedium>(&medium.model)) {
    c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 0) = m->modulus * k1 * k1 - w2 * m->density;
    c(1, 1) = m->modulus;
  } else if (const auto* r = std::get_if<RationalBranch1D>(&medium.model)) {
    if (k1 != 0.0) throw std::invalid_argument("1-d rational medium used with nonzero k1");
    const int n = std::max<int>(1, std::max(r->num.size(), r->den.size()) - 1);
    c = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
      const double N = i < static_cast<int>(r->num.size()) ? r->num[i] : 0.0;
      const double D = i < static_cast<int>(r->den.size()) ? r->den[i] : 0.0;
      c(i, i) = N - w2 * D;
    }
  } else if (const auto* t = std::get_if<TensorBranch2D>(&medium.model)) {
    require_diagonal(t->N0, "N0");
    require_diagonal(t->D1, "D1");
    c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 0) = -w2 * t->D0 + k1 * k1 * (t->N0(0, 0) - w2 * t->D1(0, 0));
    c(1, 1) = t->N0(1, 1) - w2 * t->D1(1, 1);
  } else if (const auto* mb = std::get_if<MultibandModel1D>(&medium.model)) {
    if (k1 != 0.0) throw std::invalid_argument("1-d two-band medium used with nonzero k1");
    const MultibandCoeffs1D A = derive_multiband_coeffs(*mb);
    const double w = mb->density / (mb->optic.omega_b * mb->optic.omega_b);
    c = Eigen::MatrixXd::Zero(3, 3);
    c(0, 0) = w * (w4 - w2 * A.A5);
    c(1, 1) = w * (w4 * A.A1 + w2 * A.A4 + A.A6);
    c(2, 2) = w * (w4 * A.A2 + w2 * A.A3 + A.A7);
  } else {
    const auto& m2 = std::get<MultibandModel2D>(medium.model);
    require_diagonal(m2.acoustic.N0, "N0");
    require_diagonal(m2.acoustic.D1, "D1");
    require_diagonal(m2.optic.P, "P");
    require_diagonal(m2.optic.Q, "Q");
    const MultibandCoeffs2D A = derive_multiband_coeffs(m2);
    const double w = m2.acoustic.D0 / (m2.optic.omega_b * m2.optic.omega_b);
    auto C = [&](int m, int n, int p, int q) {
      return w4 * tensor_entry(A.A2, m, n, p, q) + w2 * tensor_entry(A.A3, m, n, p, q) +
             tensor_entry(A.A7, m, n, p, q);
    };
    auto B = [&](int m, int n) { return w4 * A.A1(m, n) + w2 * A.A4(m, n) + A.A6(m, n); };
    const double k1s = k1 * k1;
    const double cs = 0.5 * (C(0, 0, 1, 1) + C(1, 1, 0, 0));
    c = Eigen::MatrixXd::Zero(3, 3);
    c(0, 0) = w * (w4 - w2 * A.A5 + B(0, 0) * k1s + C(0, 0, 0, 0) * k1s * k1s);
    c(1, 1) = w * B(1, 1);
    if (medium.literal_naturals) {
      c(2, 0) = -w * k1s * C(1, 1, 0, 0);
      c(0, 2) = -w * k1s * C(0, 0, 1, 1);
    } else {
      c(0, 2) = c(2, 0) = -w * k1s * cs;
    }
    c(2, 2) = w * C(1, 1, 1, 1);
  }
  if (medium.lift_omega_b > 0.0) c *= 1.0 - w2 / (medium.lift_omega_b * medium.lift_omega_b);
  return {trim(c)};
}

std::vector<Mode> ModeSet::plus() const {
  std::vector<Mode> out;
  for (const Mode& m : modes)
    if (m.plus()) out.push_back(m);
  return out;
}

std::vector<Mode> ModeSet::minus() const {
  std::vector<Mode> out;
  for (const Mode& m : modes)
    if (!m.plus()) out.push_back(m);
  return out;
}

Eigen::VectorXcd mode_traces(const NormalOperator& op, cplx k, int essentials) {
  const int n = op.order();
  const cplx d = -I * k;
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(2 * essentials);
  for (int m = 0; m < essentials; ++m) {
    t(m) = ipow(d, m);
    cplx q = 0.0;
    for (int a = m + 1; a <= n; ++a)
      for (int b = 0; b <= n; ++b)
        if (op.c(a, b) != 0.0) q += static_cast<double>(sign_pow(a - 1 - m)) * ipow(d, a - 1 - m) * op.c(a, b) * ipow(d, b);
    t(essentials + m) = q;
  }
  return t;
}

double energy_flux_hom(const NormalOperator& op, const Eigen::VectorXcd& traces, double omega) {
  (void)op;
  const int e = static_cast<int>(traces.size()) / 2;
  double f = 0.0;
  for (int m = 0; m < e; ++m) f += (traces(e + m) * std::conj(I * omega * traces(m))).real();
  return -0.5 * f;
}

double energy_density_hom(const HomogenizedMedium& medium, double omega, double k1, double k) {
  const double P = char_value_at(medium, omega, k1, k);
  return -0.25 * (omega * char_domega(medium, omega, k1, k) - P);
}

ModeSet char_roots(const HomogenizedMedium& medium, double omega, double k1, OutgoingRule rule) {
  if (!(omega > 0.0)) throw std::invalid_argument("char_roots: omega must be positive");
  const NormalOperator op = normal_operator(medium, omega, k1);
  const std::vector<double> p = op.char_poly();
  const int n = op.order();
  if (n < 1) throw SolverError("char_roots: medium has no spatial derivatives");
  double pmax = 0.0;
  for (double v : p) pmax = std::max(pmax, std::abs(v));
  if (std::abs(p[n]) <= 1e-13 * pmax) throw TieError("char_roots: degenerate leading coefficient");
  ModeSet set;
  set.ksq = poly_roots(p);
  std::sort(set.ksq.begin(), set.ksq.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  for (std::size_t i = 0; i < set.ksq.size(); ++i) {
    if (std::abs(set.ksq[i]) == 0.0) throw TieError("char_roots: zero root");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(set.ksq[i] - set.ksq[j]) <= 1e-8 * std::max(std::abs(set.ksq[i]), std::abs(set.ksq[j])))
        throw TieError("char_roots: repeated root");
  }
  for (const cplx& K : set.ksq) {
    cplx k = std::sqrt(K);
    if (std::abs(k.imag()) < 1e-9 * std::abs(k)) {
      const double kr = std::abs(k.real());
      double dPdk = 0.0;
      for (int j = 1; j <= n; ++j) dPdk += 2.0 * j * p[j] * std::pow(kr, 2 * j - 1);
      const double dPdw = char_domega(medium, omega, k1, kr);
      if (dPdw == 0.0 || dPdk == 0.0) throw TieError("char_roots: zero group velocity");
      const double gv = -dPdk / dPdw;
      bool forward = gv > 0.0;
      if (rule == OutgoingRule::flux) {
        const double f = energy_flux_hom(op, mode_traces(op, kr, n), omega);
        if (f == 0.0) throw TieError("char_roots: zero modal flux");
        forward = f > 0.0;
      }
      set.modes.push_back({kr, forward ? ModeKind::propagating_plus : ModeKind::propagating_minus, gv});
      set.modes.push_back({-kr, forward ? ModeKind::propagating_minus : ModeKind::propagating_plus, -gv});
    } else {
      if (k.imag() > 0.0) k = -k;
      set.modes.push_back({k, ModeKind::evanescent_plus, 0.0});
      set.modes.push_back({-k, ModeKind::evanescent_minus, 0.0});
    }
  }
  return set;
}

std::vector<double> InterfaceStack::interfaces() const {
  std::vector<double> x;
  double pos = 0.0;
  for (std::size_t r = 0; r + 1 < regions.size(); ++r) {
    if (r > 0) pos += regions[r].length;
    x.push_back(pos);
  }
  return x;
}

std::vector<HomogenizedMedium> effective_media(const InterfaceStack& stack) {
  std::vector<HomogenizedMedium> out;
  double wb = 0.0;
  for (const Region& r : stack.regions)
    if (wb == 0.0 && r.medium.two_band()) wb = omega_b_of(r.medium);
  for (const Region& r : stack.regions) {
    HomogenizedMedium m = r.medium;
    if (stack.lift_classical && wb > 0.0 && std::holds_alternative<ClassicalMedium>(m.model))
      m.lift_omega_b = wb;
    out.push_back(m);
  }
  return out;
}

InterfaceSystem assemble_interface_system(const InterfaceStack& stack) {
  const int nreg = static_cast<int>(stack.regions.size());
  if (nreg < 2) throw std::invalid_argument("interface stack needs at least two regions");
  for (int r = 1; r + 1 < nreg; ++r)
    if (!(stack.regions[r].length > 0.0) || !std::isfinite(stack.regions[r].length))
      throw std::invalid_argument("interface stack: slab lengths must be positive and finite");
  const std::vector<HomogenizedMedium> media = effective_media(stack);
  const std::vector<double> xs = stack.interfaces();

  InterfaceSystem sys;
  int cols = 0;
  for (int r = 0; r < nreg; ++r) {
    const ModeSet ms = char_roots(media[r], stack.omega, stack.k1, stack.outgoing);
    RegionModes rm;
    rm.op = normal_operator(media[r], stack.omega, stack.k1);
    const int n = rm.op.order();
    if (r == 0) {
      std::vector<Mode> inc;
      for (const Mode& m : ms.plus())
        if (m.propagating()) inc.push_back(m);
      std::sort(inc.begin(), inc.end(), mode_less);
      if (stack.incident_mode < 0 || stack.incident_mode >= static_cast<int>(inc.size()))
        throw SolverError("no propagating incident mode in the first region");
      sys.incident = inc[stack.incident_mode];
      rm.modes = ms.minus();
    } else if (r == nreg - 1) {
      rm.modes = ms.plus();
    } else {
      rm.modes = ms.modes;
    }
    std::sort(rm.modes.begin(), rm.modes.end(), mode_less);
    const int expected = (r == 0 || r == nreg - 1) ? n : 2 * n;
    if (static_cast<int>(rm.modes.size()) != expected)
      throw SolverError("region " + std::to_string(r) + ": mode classification is not balanced");
    for (const Mode& m : rm.modes) {
      double ref;
      if (r == 0) ref = xs.front();
      else if (r == nreg - 1) ref = xs.back();
      else ref = m.k.imag() <= 0.0 ? xs[r - 1] : xs[r];
      rm.reference.push_back(ref);
      rm.unknown.push_back(cols++);
    }
    sys.regions.push_back(rm);
  }

  struct Row {
    std::vector<std::pair<int, cplx>> terms;
    cplx rhs;
    std::string label;
  };
  std::vector<Row> rows;
  for (int j = 0; j + 1 < nreg; ++j) {
    const RegionModes& L = sys.regions[j];
    const RegionModes& R = sys.regions[j + 1];
    const int nl = L.op.order(), nr = R.op.order();
    const int nc = std::min(nl, nr), nh = std::max(nl, nr);
    const double x = xs[j];
    auto side_traces = [&](const RegionModes& rm, int i) {
      return Eigen::VectorXcd(mode_traces(rm.op, rm.modes[i].k, nh) * phase(rm.modes[i].k, x, rm.reference[i]));
    };
    std::vector<Eigen::VectorXcd> tl, tr;
    for (std::size_t i = 0; i < L.modes.size(); ++i) tl.push_back(side_traces(L, i));
    for (std::size_t i = 0; i < R.modes.size(); ++i) tr.push_back(side_traces(R, i));
    Eigen::VectorXcd tinc = Eigen::VectorXcd::Zero(2 * nh);
    if (j == 0) tinc = mode_traces(L.op, sys.incident.k, nh) * phase(sys.incident.k, x, xs.front());

    // Continuity of trace index `idx` (left minus right), or one-sided zero.
    auto add = [&](int idx, bool use_left, bool use_right, const std::string& label) {
      Row row;
      if (use_left)
        for (std::size_t i = 0; i < tl.size(); ++i) row.terms.push_back({L.unknown[i], tl[i](idx)});
      if (use_right)
        for (std::size_t i = 0; i < tr.size(); ++i) row.terms.push_back({R.unknown[i], -tr[i](idx)});
      row.rhs = use_left ? -tinc(idx) : 0.0;
      row.label = "interface " + std::to_string(j) + ": " + label;
      rows.push_back(row);
    };
    for (int m = 0; m < nc; ++m) {
      add(m, true, true, "e" + std::to_string(m));
      add(nh + m, true, true, "Q" + std::to_string(m));
    }
    for (int m = nc; m < nh; ++m) {
      if (stack.pairing == Pairing::natural_one_sided)
        add(nh + m, nl > nr, nr > nl, "Q" + std::to_string(m) + "=0");
      else
        add(m, true, true, "e" + std::to_string(m));
    }
  }
  if (static_cast<int>(rows.size()) != cols) {
    std::ostringstream msg;
    msg << "interface system is not square: " << rows.size() << " conditions for " << cols
        << " unknowns; conditions:";
    for (const Row& r : rows) msg << " [" << r.label << "]";
    throw SolverError(msg.str());
  }
  sys.matrix = Eigen::MatrixXcd::Zero(cols, cols);
  sys.rhs = Eigen::VectorXcd::Zero(cols);
  for (int i = 0; i < cols; ++i) {
    for (const auto& [col, v] : rows[i].terms) sys.matrix(i, col) += v;
    sys.rhs(i) = rows[i].rhs;
    sys.row_labels.push_back(rows[i].label);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys.matrix);
  const auto& s = svd.singularValues();
  sys.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  return sys;
}

HomScatteringSolution solve_scattering_hom(const InterfaceStack& stack_in) {
  InterfaceStack stack = stack_in;
  for (int attempt = 0;; ++attempt) {
    try {
      HomScatteringSolution sol;
      sol.system = assemble_interface_system(stack);
      sol.stack = stack;
      sol.omega_used = stack.omega;
      sol.condition = sol.system.condition;
      if (!std::isfinite(sol.condition)) throw TieError("singular interface system");
      sol.amplitudes = sol.system.matrix.fullPivLu().solve(sol.system.rhs);

      const RegionModes& first = sol.system.regions.front();
      const RegionModes& last = sol.system.regions.back();
      const double w = stack.omega;
      const double f_inc = energy_flux_hom(first.op, mode_traces(first.op, sol.system.incident.k, first.op.order()), w);
      // Optic-branch modes of a two-band medium carry negative energy, so the
      // incident flux may be negative; fluxes are normalized by its signed value.
      if (!(std::abs(f_inc) > 0.0) || !std::isfinite(f_inc))
        throw SolverError("incident mode carries no energy");
      for (std::size_t i = 0; i < first.modes.size(); ++i) {
        const cplx a = sol.amplitudes(first.unknown[i]);
        const Mode& m = first.modes[i];
        sol.reflected.push_back({m.k, a, m.propagating()});
        if (m.propagating())
          sol.R_E += -energy_flux_hom(first.op, mode_traces(first.op, m.k, first.op.order()) * a, w) / f_inc;
      }
      for (std::size_t i = 0; i < last.modes.size(); ++i) {
        const cplx a = sol.amplitudes(last.unknown[i]);
        const Mode& m = last.modes[i];
        sol.transmitted.push_back({m.k, a, m.propagating()});
        if (m.propagating())
          sol.T_E += energy_flux_hom(last.op, mode_traces(last.op, m.k, last.op.order()) * a, w) / f_inc;
      }
      return sol;
    } catch (const TieError&) {
      if (attempt >= 3) throw;
      stack.omega *= 1.0 + 1e-12;
    }
  }
}

Eigen::VectorXcd field_traces(const HomScatteringSolution& sol, int region, double x, int essentials) {
  const RegionModes& rm = sol.system.regions.at(region);
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(2 * essentials);
  for (std::size_t i = 0; i < rm.modes.size(); ++i)
    t += mode_traces(rm.op, rm.modes[i].k, essentials) * (sol.amplitudes(rm.unknown[i]) * phase(rm.modes[i].k, x, rm.reference[i]));
  if (region == 0) {
    const double x0 = sol.stack.interfaces().front();
    t += mode_traces(rm.op, sol.system.incident.k, essentials) * phase(sol.system.incident.k, x, x0);
  }
  return t;
}

std::vector<cplx> displacement_field_hom(const HomScatteringSolution& sol, const std::vector<double>& x) {
  const std::vector<double> xs = sol.stack.interfaces();
  std::vector<cplx> out;
  out.reserve(x.size());
  for (double xv : x) {
    const int region = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), xv) - xs.begin());
    out.push_back(field_traces(sol, region, xv, 1)(0));
  }
  return out;
}

double continuity_residual(const HomScatteringSolution& sol) {
  const std::vector<double> xs = sol.stack.interfaces();
  double worst = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const int nl = sol.system.regions[j].op.order(), nr = sol.system.regions[j + 1].op.order();
    const int nc = std::min(nl, nr), nh = std::max(nl, nr);
    const Eigen::VectorXcd L = field_traces(sol, static_cast<int>(j), xs[j], nh);
    const Eigen::VectorXcd R = field_traces(sol, static_cast<int>(j + 1), xs[j], nh);
    for (int m = 0; m < nc; ++m) {
      worst = std::max(worst, std::abs(L(m) - R(m)));
      worst = std::max(worst, std::abs(L(nh + m) - R(nh + m)));
    }
    for (int m = nc; m < nh; ++m) {
      if (sol.stack.pairing == Pairing::natural_one_sided)
        worst = std::max(worst, std::abs(nl > nr ? L(nh + m) : R(nh + m)));
      else
        worst = std::max(worst, std::abs(L(m) - R(m)));
    }
  }
  return worst;
}

}  // namespace mbh
