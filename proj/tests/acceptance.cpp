// Acceptance suite: one line per criterion. Criteria listed in kKnownDeviations
// are reported as FAIL (known deviation) and do not fail the run.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mbhom/commands.hpp"
#include "mbhom/errors.hpp"
#include "mbhom/homsolve.hpp"
#include "mbhom/nonlocal.hpp"
#include "mbhom/particle.hpp"

using namespace mbh;

namespace {

const std::set<int> kKnownDeviations = {1, 3, 8};

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

struct Line {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string num(double v, int prec = 6) {
  char b[64];
  std::snprintf(b, sizeof b, "%.*g", prec, v);
  return b;
}

int g_unexpected = 0;

void report(int id, const char* title, const Line& l) {
  const char* status = l.pass ? "PASS" : (kKnownDeviations.count(id) ? "FAIL (known deviation)" : "FAIL");
  if (!l.pass && !kKnownDeviations.count(id)) ++g_unexpected;
  std::printf("criterion %2d %-34s %s | %s\n", id, title, status, l.detail.str().c_str());
  std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Largest energy defect seen over homogenized solves; fed by several criteria.
double g_hom_defect = 0.0;
double g_oracle_defect = 0.0;

HomScatteringSolution hom_solve(InterfaceStack st) {
  HomScatteringSolution s = solve_scattering_hom(st);
  g_hom_defect = std::max(g_hom_defect, s.energy_defect());
  return s;
}

ScatteringSolution oracle_1d(ScatteringProblem1D p) {
  ScatteringSolution s = scatter_1d(p);
  g_oracle_defect = std::max(g_oracle_defect, s.energy_defect());
  return s;
}

void criterion1() {
  Line l;
  Timer t;
  const double wa = midgap_frequency(cell_a());
  const double wb = midgap_frequency(cell_b());
  const double dt = t.seconds();
  l.require(std::abs(wa - 3.448685) <= 1e-3, "CELL_A omega0 " + num(wa, 9) + " vs 3.448685");
  l.require(std::abs(wb - 8.64675) <= 1e-3, "CELL_B omega0 " + num(wb, 9) + " vs 8.64675");
  l.require(dt < 1.0, "time " + num(dt, 3) + " s");
  report(1, "midgap frequencies", l);
}

void criterion2() {
  Line l;
  const double e = harmonic_mean_modulus(cell_a());
  l.require(std::abs(e - 1.0 / 0.84) <= 1e-15, "E_h " + num(e, 17) + " vs 1/0.84");
  l.require(std::abs(e - 1.19047619) <= 5e-9, "agrees with 1.19047619 to printed digits");
  report(2, "static pinning", l);
}

void criterion3() {
  Line l;
  Timer t;
  const UnitCell c = cell_a();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::string resid;
  for (int label : {22, 44, 66, 88}) {
    const FitResult1D f = fit_branch_1d(c, order_index(label));
    const RationalBranch1D published = published_branch_1d(label);
    double worst = 0.0;
    for (std::size_t i = 2; i < published.num.size(); ++i)
      if (published.num[i] != 0.0) worst = std::max(worst, rel(f.branch.num[i], published.num[i]));
    for (std::size_t i = 1; i < published.den.size(); ++i)
      if (published.den[i] != 0.0) worst = std::max(worst, rel(f.branch.den[i], published.den[i]));
    const double dist = branch_curve_distance(f.branch, published, c);
    l.require(worst <= 0.20 || dist <= 0.02,
              "RF" + std::to_string(label) + " coeff err " + num(100 * worst, 3) + "% band dist " +
                  num(100 * dist, 3) + "%");
    if (!(f.rms_omega < prev)) decreasing = false;
    prev = f.rms_omega;
    resid += (resid.empty() ? "" : ",") + num(f.rms_omega, 4);
  }
  l.require(decreasing, "rms residual decreasing (" + resid + ")");
  const double dt = t.seconds();
  l.require(dt < 5.0, "time " + num(dt, 3) + " s");
  report(3, "rational fits", l);
}

void criterion4() {
  Line l;
  Timer t;
  const UnitCell c = cell_a();
  const double w0 = midgap_frequency(c);
  const HomogenizedMedium rf{fit_branch_1d(c, 3).branch};
  const auto err = parallel_map<double>(200, threads(), [&](std::size_t i) {
    const double w = 0.8 * (i + 1) / 200.0 * w0;
    ScatteringProblem1D p;
    p.cell = c;
    p.hom = {0.25, 1.0};
    p.omega = w;
    InterfaceStack st;
    st.regions = {{HomogenizedMedium::classical(0.25, 1.0)}, {rf}};
    st.omega = w;
    return std::abs(hom_solve(st).T_E - oracle_1d(p).T_E);
  });
  const double dt = t.seconds();
  const double worst = *std::max_element(err.begin(), err.end());
  l.require(worst <= 0.06, "max |dT| " + num(worst, 4) + " on 200 points to 0.8 omega0");
  l.require(dt < 10.0, "time " + num(dt, 3) + " s");
  report(4, "1-d single boundary RF66", l);
}

std::vector<double> local_minima(const std::vector<double>& x, const std::function<double(double)>& f,
                                 const std::vector<double>& y) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] < y[i - 1] && y[i] <= y[i + 1]) out.push_back(refine_extremum(f, x[i - 1], x[i + 1], false));
  return out;
}

void criterion5() {
  Line l;
  const UnitCell c = cell_a();
  const double w0 = midgap_frequency(c);
  const HomogenizedMedium rf{fit_branch_1d(c, 3).branch};
  auto exact = [&](double r) {
    ScatteringProblem1D p;
    p.geometry = Geometry1D::double_boundary;
    p.cell = c;
    p.hom = {2.0, 1.0};
    p.omega = r * w0;
    return oracle_1d(p).T_E;
  };
  auto hom = [&](double r) {
    InterfaceStack st;
    st.regions = {{HomogenizedMedium::classical(2.0, 1.0)}, {rf, 10 * c.period()}, {HomogenizedMedium::classical(2.0, 1.0)}};
    st.omega = r * w0;
    return hom_solve(st).T_E;
  };
  std::vector<double> r(200);
  for (int i = 0; i < 200; ++i) r[i] = 0.8 * (i + 1) / 200.0;
  const auto te = parallel_map<double>(r.size(), threads(), [&](std::size_t i) { return exact(r[i]); });
  const auto th = parallel_map<double>(r.size(), threads(), [&](std::size_t i) { return hom(r[i]); });
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(te[i] - th[i]));
  const auto de = local_minima(r, exact, te);
  const auto dh = local_minima(r, hom, th);
  double dip_err = 0.0;
  for (double d : de) {
    double best = std::numeric_limits<double>::infinity();
    for (double e : dh) best = std::min(best, rel(e, d));
    dip_err = std::max(dip_err, best);
  }
  // Dense scan: narrow resonances of the spurious large-k RF66 mode.
  const auto dense = parallel_map<double>(4000, threads(), [&](std::size_t i) {
    const double x = 0.8 * (i + 1) / 4000.0;
    return std::abs(exact(x) - hom(x));
  });
  l.require(!de.empty() && dip_err <= 0.03,
            std::to_string(de.size()) + " oracle dips, worst shift " + num(100 * dip_err, 3) + "%");
  l.require(worst <= 0.25, "max |dT| " + num(worst, 4) + " on 200 points to 0.8 omega0");
  l.detail << "; info: 4000-point max |dT| " << num(*std::max_element(dense.begin(), dense.end()), 4);
  report(5, "1-d double boundary RF66", l);
}

void criterion6() {
  Line l;
  const UnitCell c = cell_a();
  const double w = 1.025 * midgap_frequency(c);
  InterfaceStack st;
  st.regions = {{HomogenizedMedium::classical(0.25, 1.0)}, {HomogenizedMedium{fit_branch_1d(c, 3).branch}}};
  st.omega = w;
  const HomScatteringSolution s = hom_solve(st);
  l.require(s.T_E == 0.0, "T_E hom " + num(s.T_E, 3));
  // Envelope: maximum of |u| over each period, 20 periods.
  const int per = 64, cells = 20;
  std::vector<double> xs;
  for (int i = 0; i <= per * cells; ++i) xs.push_back(c.period() * i / per);
  const auto u = displacement_field_hom(s, xs);
  std::vector<double> env(cells, 0.0);
  for (int i = 0; i < per * cells; ++i) env[i / per] = std::max(env[i / per], std::abs(u[i]));
  bool mono = true;
  for (int n = 1; n < cells; ++n) mono = mono && env[n] < env[n - 1];
  l.require(mono, "per-period max |u| decreasing, " + num(env[0], 3) + " -> " + num(env[cells - 1], 3));
  report(6, "band-gap capture", l);
}

void criterion7() {
  Line l;
  const UnitCell c = cell_a();
  const double w0 = midgap_frequency(c);
  const HomogenizedMedium rf = approximation_2d(RunConfig{}, c);
  for (double r : {0.29, 0.41, 0.6484, 1.004}) {
    const auto d = parallel_map<double>(90, threads(), [&](std::size_t i) {
      ScatteringProblem2D p;
      p.cell = c;
      p.hom = {2.0, 1.0};
      p.omega = r * w0;
      p.theta = (i + 1.0) * std::numbers::pi / 180.0;
      p.defect_tol = 1e-3;
      const ScatteringSolution2D ex = scatter_2d(p);
      if (!(ex.energy_defect() < 1e-3)) throw SolverError("oracle truncation did not converge");
      InterfaceStack st;
      st.regions = {{HomogenizedMedium::classical(2.0, 1.0)}, {rf}};
      st.omega = p.omega;
      st.k1 = p.incidence_k1();
      const HomScatteringSolution hs = hom_solve(st);
      double rh = 0.0;
      for (const auto& m : hs.reflected)
        if (m.propagating) rh = std::abs(m.amplitude);
      return std::abs(rh - std::abs(ex.specular));
    });
    const double worst = *std::max_element(d.begin(), d.end());
    l.require(worst <= 0.1, num(r, 4) + ": " + num(worst, 3));
  }
  report(7, "2-d RF22 reflection", l);
}

void criterion8() {
  Line l;
  Timer t;
  const UnitCell c = cell_a();
  const double w = 1.218 * midgap_frequency(c);
  const double k1 = 2.9 / c.period();
  ScatteringProblem2D p;
  p.cell = c;
  p.hom = {2.0, 1.0};
  p.omega = w;
  p.k1 = k1;
  p.defect_tol = 1e-3;
  const ScatteringSolution2D ex = scatter_2d(p);
  l.require(std::abs(ex.T_E - 0.7914) <= 0.002,
            "fine-scale T_E " + num(ex.T_E, 5) + " (M=" + std::to_string(ex.truncation) + ", defect " +
                num(ex.energy_defect(), 2) + ")");
  auto hom_T = [&](const MultibandModel2D& m) {
    InterfaceStack st;
    st.regions = {{HomogenizedMedium::classical(2.0, 1.0)}, {HomogenizedMedium{m}}};
    st.omega = w;
    st.k1 = k1;
    return hom_solve(st).T_E;
  };
  const double tr = hom_T(published_two_band_2d());
  l.require(std::abs(tr - 0.7001) <= 0.05, "rational T_E " + num(tr, 4));
  TwoBandFitOptions2D po;
  po.polynomial = true;
  const double tp = hom_T(fit_two_band_2d(c, po).model);
  l.require(std::abs(tp - 0.2844) <= 0.05, "polynomial T_E " + num(tp, 4));
  const double dt = t.seconds();
  l.require(dt < 60.0, "time " + num(dt, 3) + " s");
  report(8, "two-band 2-d headline numbers", l);
}

void criterion9() {
  Line l;
  const UnitCell c = cell_b();
  const TwoBandFit1D f = fit_two_band_1d(c);
  const TwoBandFit1D fh = fit_two_band_1d(UnitCell::uniform(8.0, 1.0, c.period()));
  auto T = [&](double w) {
    InterfaceStack st;
    st.regions = {{HomogenizedMedium{fh.model}}, {HomogenizedMedium{f.model}}};
    st.omega = w;
    return hom_solve(st).T_E;
  };
  // Bisect the edges of the T_E == 0 interval around the fitted midgap.
  auto edge = [&](double inside, double outside) {
    if (!(T(inside) == 0.0) || !(T(outside) > 0.0)) throw SolverError("gap edge not bracketed");
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (inside + outside);
      (T(mid) == 0.0 ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  const double mid = 0.5 * (f.gap_lo + f.gap_hi);
  const double lo = edge(mid, f.gap_lo - 0.05);
  const double hi = edge(mid, f.gap_hi + 0.05);
  l.require(std::abs(lo - f.gap_lo) <= 1e-6 && std::abs(hi - f.gap_hi) <= 1e-6,
            "zero-T interval [" + num(lo, 10) + ", " + num(hi, 10) + "] vs fitted [" + num(f.gap_lo, 10) + ", " +
                num(f.gap_hi, 10) + "]");
  const double tol = 1e-9;
  l.require(lo <= f.exact_gap_lo + tol && hi >= f.exact_gap_hi - tol,
            "contains exact gap [" + num(f.exact_gap_lo, 10) + ", " + num(f.exact_gap_hi, 10) + "]");
  report(9, "two-band 1-d gap capture", l);
}

// Cell-averaged energy density and flux of the 1-d Bloch mode at omega.
void bloch_energy(const UnitCell& c, double w, double& flux, double& density) {
  const Eigen::Matrix2cd m = transfer_matrix(c, w);
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m);
  const cplx K = bloch_wavenumber_1d(c, w);
  const cplx lam = std::exp(-cplx(0, 1) * K * c.period());
  int j = std::abs(es.eigenvalues()(0) - lam) < std::abs(es.eigenvalues()(1) - lam) ? 0 : 1;
  Eigen::Vector2cd v = es.eigenvectors().col(j);
  flux = state_flux(v, w);
  density = 0.0;
  for (int li = 0; li < 2; ++li) {
    const Layer& L = c.layer(li);
    const QuadratureRule q = gauss_legendre_panels(0.0, L.thickness, 8);
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      const Eigen::Vector2cd s = layer_propagator(L, w, 0.0, q.x[i]).cast<cplx>() * v;
      density += q.w[i] * 0.25 * (L.density * w * w * std::norm(s(0)) + std::norm(s(1)) / L.modulus);
    }
    v = layer_propagator(L, w, 0.0, L.thickness).cast<cplx>() * v;
  }
  density /= c.period();
}

void criterion10() {
  Line l;
  const UnitCell ca = cell_a();
  const double w0 = midgap_frequency(ca);

  // Homogenized solves from the scattering criteria plus a few 2-d ones.
  const HomogenizedMedium rf2 = approximation_2d(RunConfig{}, ca);
  for (double r : {0.2, 0.5, 0.9})
    for (double th : {15.0, 45.0, 80.0}) {
      InterfaceStack st;
      st.regions = {{HomogenizedMedium::classical(2.0, 1.0)}, {rf2}};
      st.omega = r * w0;
      st.k1 = st.omega / std::sqrt(2.0) * std::cos(th * std::numbers::pi / 180.0);
      hom_solve(st);
    }
  l.require(g_hom_defect <= 1e-9, "hom |R+T-1| " + num(g_hom_defect, 2));
  l.require(g_oracle_defect <= 1e-9, "1-d oracle |R+T-1| " + num(g_oracle_defect, 2));

  double det_err = 0.0;
  for (const UnitCell& c : {cell_a(), cell_b()})
    for (int i = 1; i <= 50; ++i) {
      const double w = 0.4 * i;
      det_err = std::max(det_err, std::abs(cell_propagator(c, w).determinant() - 1.0));
      det_err = std::max(det_err, std::abs(layer_propagator(c.layer(0), w).determinant() - 1.0));
      det_err = std::max(det_err, std::abs(transfer_matrix(c, w).determinant() - 1.0));
    }
  l.require(det_err <= 1e-12, "transfer det " + num(det_err, 2));

  double fg = 0.0;
  {
    const HomogenizedMedium rf{fit_branch_1d(ca, 3).branch};
    const TwoBandFit1D tb = fit_two_band_1d(cell_b());
    const std::vector<std::pair<HomogenizedMedium, double>> cases = {
        {rf, 0.3 * w0}, {rf, 0.75 * w0}, {HomogenizedMedium{tb.model}, 3.0}, {HomogenizedMedium{tb.model}, 15.0}};
    for (const auto& [m, w] : cases) {
      const NormalOperator op = normal_operator(m, w);
      for (const Mode& md : char_roots(m, w).modes) {
        if (!md.propagating()) continue;
        const double F = energy_flux_hom(op, mode_traces(op, md.k, op.order()), w);
        const double E = energy_density_hom(m, w, 0.0, md.k.real());
        fg = std::max(fg, std::abs(F - md.group_velocity * E) / std::abs(F));
      }
    }
    for (double w : {0.5, 1.5, 2.5}) {
      double F, E;
      bloch_energy(ca, w, F, E);
      const double h = 1e-5 * w;
      const double dK = (bloch_wavenumber_1d(ca, w + h).real() - bloch_wavenumber_1d(ca, w - h).real()) / (2 * h);
      fg = std::max(fg, std::abs(F - E / dK) / std::abs(F));
    }
  }
  l.require(fg <= 1e-6, "flux vs gv*E " + num(fg, 2));

  double pde = 0.0;
  for (const UnitCell& c : {cell_a(), cell_b()}) {
    const MultibandModel1D m = fit_two_band_1d(c).model;
    const MultibandCoeffs1D a = derive_multiband_coeffs(m);
    for (int i = 1; i <= 50; ++i) {
      const double k = 0.1 * i;
      for (double w2 : {m.acoustic_omega_sq(k), m.optic.omega_sq(k)}) {
        const double w = std::sqrt(w2);
        const double k2 = k * k;
        const double scale = w2 * w2 * (1 + std::abs(a.A1) * k2 + std::abs(a.A2) * k2 * k2) +
                             w2 * (std::abs(a.A5) + std::abs(a.A4) * k2 + std::abs(a.A3) * k2 * k2) +
                             std::abs(a.A6) * k2 + std::abs(a.A7) * k2 * k2;
        pde = std::max(pde, std::abs(multiband_pde_residual(a, k, w)) / scale);
      }
    }
  }
  l.require(pde <= 1e-10, "two-band PDE residual " + num(pde, 2));

  const double C = 1.0;
  const ParticleRoots pr = particle_roots(C);
  const ParticleState s0 = project_neutral(C, {1.0, 0.3, -0.2, 0.1});
  const double period = 2 * std::numbers::pi / pr.omega;
  const ParticleDemoResult pd = particle_energy_demo(C, s0, period / 200.0, 200 * 100);
  l.require(pd.max_relative_drift <= 1e-6, "particle drift " + num(pd.max_relative_drift, 2));

  double nq = 0.0;
  const NonlocalParams np = NonlocalParams::reference();
  for (double k : {0.5, 2.0, 5.0})
    for (double w : {0.7, 3.3, 9.1}) {
      const NlQuadratureCheck q = nlt_integral_dispersion_check(np, k, w);
      nq = std::max(nq, std::abs(q.quadrature - q.closed_form));
    }
  l.require(nq <= 1e-8, "nonlocal quadrature " + num(nq, 2));

  const auto roots = nlt_roots(np, 0.0, 40.0);
  double rz = roots.empty() ? 1.0 : 0.0;
  for (std::size_t n = 0; n < roots.size(); ++n)
    rz = std::max(rz, std::abs(roots[n].omega - 2.5 * std::numbers::pi * (n + 1)));
  l.require(roots.size() == 5 && rz <= 1e-8, std::to_string(roots.size()) + " k=0 roots, err " + num(rz, 2));
  report(10, "property suite", l);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                   criterion6, criterion7, criterion8, criterion9, criterion10};
  for (std::size_t i = 0; i < all.size(); ++i) {
    try {
      all[i]();
    } catch (const std::exception& e) {
      Line l;
      l.require(false, std::string("exception: ") + e.what());
      report(static_cast<int>(i + 1), "", l);
    }
  }
  std::printf("%d unexpected failure(s)\n", g_unexpected);
  return g_unexpected == 0 ? 0 : 1;
}
