#include "mbhom/commands.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mbhom/errors.hpp"
#include "mbhom/nonlocal.hpp"

namespace mbh {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
// Homogenized energy defects above this are flagged in the output.
constexpr double kHomDefectTol = 1e-6;

std::string fmt(double v) { return format_number(v); }
std::string fmt(int v) { return std::to_string(v); }

const GridSpec& need(const std::optional<GridSpec>& g, const char* name) {
  if (!g) throw ConfigError(std::string("$.") + name + ": required for this command");
  return *g;
}

double single_value(const std::optional<GridSpec>& g, const char* name) {
  const auto pts = need(g, name).points();
  if (pts.size() != 1) throw ConfigError(std::string("$.") + name + ": field output needs exactly one value");
  return pts[0];
}

json pair_json(const Eigen::Matrix2d& m) { return json::array({m(0, 0), m(1, 1)}); }

Eigen::Matrix2d diag(const std::array<double, 2>& v) {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  m(0, 0) = v[0];
  m(1, 1) = v[1];
  return m;
}

template <class T>
T require(const std::optional<T>& v, const char* key) {
  if (!v) throw ConfigError(std::string("$.approximation.") + key + ": required for explicit coefficients");
  return *v;
}

InterfaceStack base_stack(const RunConfig& cfg, double omega, double k1) {
  InterfaceStack st;
  st.omega = omega;
  st.k1 = k1;
  st.pairing = parse_pairing(cfg.pairing);
  st.outgoing = parse_outgoing(cfg.outgoing);
  st.lift_classical = cfg.lift_classical;
  return st;
}

std::string flag_for(double hom_defect, double exact_defect, double exact_tol) {
  std::string f;
  if (!(hom_defect <= kHomDefectTol)) f = "hom_defect";
  if (!(exact_defect <= exact_tol)) f += f.empty() ? "exact_defect" : ";exact_defect";
  return f.empty() ? "ok" : f;
}

double reflected_amplitude(const ScatteringSolution& s) {
  for (const auto& m : s.reflected)
    if (m.propagating) return std::abs(m.amplitude);
  return 0.0;
}

bool is_2d(const RunConfig& cfg) { return cfg.geometry == "2d"; }

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

RationalBranch1D published_branch_1d(int order_label) {
  const double N1 = 1.19047619;
  switch (order_index(order_label)) {
    case 1: return {{0.0, N1}, {1.0, 1.100814e-2}};
    case 2: return {{0.0, N1, 1.22451e-2}, {1.0, 0.0, 4.65093e-3}};
    case 3: return {{0.0, N1, 0.0, 1.350e-2}, {1.0, 1.9503e-2, 0.0, 2.08892e-3}};
    default: return {{0.0, N1, 0.0, 0.0, 1.3982e-3}, {1.0, 2.74576e-4, 0.0, 0.0, 2.74576e-4}};
  }
}

TensorBranch2D published_branch_2d() {
  TensorBranch2D b;
  b.N0 = diag({1.344742, 1.81045806});
  b.D1 = diag({0.013519456, 0.01303317});
  b.D0 = 1.0;
  return b;
}

MultibandModel2D published_two_band_2d() {
  MultibandModel2D m;
  m.acoustic = published_branch_2d();
  m.optic.omega_b = 6.399088;
  m.optic.P = diag({22.535058, 0.0});
  m.optic.Q = diag({0.83561577, 1.5551709});
  return m;
}

double reference_omega0(const RunConfig& cfg) {
  return midgap_frequency(cfg.normalization_cell ? cfg.normalization_cell->build() : cfg.cell.build());
}

HomogenizedMedium approximation_1d(const RunConfig& cfg, const UnitCell& cell) {
  const ApproxSpec& a = cfg.approximation;
  HomogenizedMedium m;
  if (a.source == "published") {
    m.model = published_branch_1d(a.order);
    m.provenance = Provenance::published_table;
  } else if (a.source == "explicit") {
    if (a.num.empty() || a.den.empty()) throw ConfigError("$.approximation: explicit source needs num and den");
    RationalBranch1D b{a.num, a.den};
    b.validate();
    m.model = b;
  } else {
    m.model = fit_branch_1d(cell, order_index(a.order), {a.points, a.mask}).branch;
  }
  return m;
}

HomogenizedMedium approximation_2d(const RunConfig& cfg, const UnitCell& cell) {
  const ApproxSpec& a = cfg.approximation;
  HomogenizedMedium m;
  if (a.source == "published") {
    m.model = published_branch_2d();
    m.provenance = Provenance::published_table;
  } else if (a.source == "explicit") {
    TensorBranch2D b;
    b.N0 = diag(require(a.N0, "N0"));
    b.D1 = diag(require(a.D1, "D1"));
    b.D0 = a.D0;
    b.validate();
    m.model = b;
  } else {
    FitOptions2D o;
    o.n1 = a.grid_n1;
    o.n2 = a.grid_n2;
    m.model = fit_branch_2d(cell, o).branch;
  }
  return m;
}

HomogenizedMedium two_band_1d(const RunConfig& cfg, const UnitCell& cell) {
  const ApproxSpec& a = cfg.approximation;
  HomogenizedMedium m;
  if (a.source == "explicit") {
    MultibandModel1D mb;
    mb.n = require(a.n, "n");
    mb.d = require(a.d, "d");
    mb.optic = {require(a.omega_b, "omega_b"), require(a.p, "p"), require(a.q, "q")};
    mb.density = mean_density(cell);
    m.model = mb;
  } else if (a.source == "published") {
    throw ConfigError("$.approximation.source: no published two-band 1-d coefficients; use fit or explicit");
  } else {
    m.model = fit_two_band_1d(cell, {a.points, a.pin_gap}).model;
  }
  return m;
}

HomogenizedMedium two_band_2d(const RunConfig& cfg, const UnitCell& cell) {
  const ApproxSpec& a = cfg.approximation;
  HomogenizedMedium m;
  m.literal_naturals = cfg.literal_naturals;
  if (a.source == "published") {
    if (a.polynomial) throw ConfigError("$.approximation.polynomial: no published polynomial set; use fit");
    m.model = published_two_band_2d();
    m.provenance = Provenance::published_table;
  } else if (a.source == "explicit") {
    MultibandModel2D mb;
    mb.acoustic.N0 = diag(require(a.N0, "N0"));
    mb.acoustic.D1 = a.D1 ? diag(*a.D1) : Eigen::Matrix2d::Zero();
    mb.acoustic.D0 = a.D0;
    mb.optic.omega_b = require(a.omega_b, "omega_b");
    mb.optic.P = diag(require(a.P, "P"));
    mb.optic.Q = a.Q ? diag(*a.Q) : Eigen::Matrix2d::Zero();
    m.model = mb;
  } else {
    TwoBandFitOptions2D o;
    o.grid.n1 = a.grid_n1;
    o.grid.n2 = a.grid_n2;
    o.polynomial = a.polynomial;
    m.model = fit_two_band_2d(cell, o).model;
  }
  return m;
}

HomogenizedMedium incidence_medium(const RunConfig& cfg, const UnitCell& cell) {
  if (cfg.hom.treatment == "artificial_laminate") {
    const UnitCell u = UnitCell::uniform(cfg.hom.modulus, cfg.hom.density, cell.period());
    HomogenizedMedium m;
    if (is_2d(cfg)) {
      TwoBandFitOptions2D o;
      o.grid.n1 = cfg.approximation.grid_n1;
      o.grid.n2 = cfg.approximation.grid_n2;
      o.polynomial = cfg.approximation.polynomial;
      m.model = fit_two_band_2d(u, o).model;
    } else {
      m.model = fit_two_band_1d(u, {cfg.approximation.points, cfg.approximation.pin_gap}).model;
    }
    m.literal_naturals = cfg.literal_naturals;
    return m;
  }
  HomogenizedMedium m = HomogenizedMedium::classical(cfg.hom.modulus, cfg.hom.density);
  m.provenance = Provenance::classical_limit;
  return m;
}

Table cmd_dispersion(const RunConfig& cfg, int threads) {
  if (is_2d(cfg)) throw ConfigError("$.geometry: dispersion tables are 1-d; use fit for 2-d coefficients");
  const UnitCell cell = cfg.cell.build();
  const double h = cell.period();
  const double w0 = reference_omega0(cfg);
  const bool two = cfg.model == "two_band";
  const HomogenizedMedium med = two ? two_band_1d(cfg, cell) : approximation_1d(cfg, cell);
  const std::vector<double> Kh =
      cfg.Kh ? cfg.Kh->points() : GridSpec{0.0, std::numbers::pi, 201, {}}.points();
  for (double v : Kh)
    if (v < 0.0 || v > std::numbers::pi + 1e-12) throw ConfigError("$.Kh: values must lie in [0, pi]");

  Table t;
  t.header = {"Kh", "omega_exact", "omega_rf", "omega_exact_over_omega0", "omega_rf_over_omega0"};
  if (two) t.header.insert(t.header.end(), {"omega_exact_band2", "omega_rf_optic"});
  t.rows = parallel_map<std::vector<std::string>>(Kh.size(), threads, [&](std::size_t i) {
    const double K = std::min(Kh[i], std::numbers::pi) / h;
    const double we = band_frequency_1d(cell, 1, K);
    double wr;
    if (const auto* mb = std::get_if<MultibandModel1D>(&med.model))
      wr = std::sqrt(mb->acoustic_omega_sq(K));
    else
      wr = std::get<RationalBranch1D>(med.model).omega(K);
    std::vector<std::string> row = {fmt(Kh[i]), fmt(we), fmt(wr), fmt(we / w0), fmt(wr / w0)};
    if (const auto* mb = std::get_if<MultibandModel1D>(&med.model)) {
      row.push_back(fmt(band_frequency_1d(cell, 2, K)));
      row.push_back(fmt(std::sqrt(std::max(0.0, mb->optic.omega_sq(K)))));
    }
    return row;
  });
  return t;
}

json cmd_fit(const RunConfig& cfg) {
  const UnitCell cell = cfg.cell.build();
  const ApproxSpec& a = cfg.approximation;
  json out = json::object();
  out["command"] = "fit";
  out["cell"] = to_json(cfg)["cell"];
  if (cfg.model == "two_band" && !is_2d(cfg)) {
    const TwoBandFit1D f = fit_two_band_1d(cell, {a.points, a.pin_gap});
    const MultibandModel1D& m = f.model;
    out["model"] = "two_band_1d";
    out["approximation"] = {{"source", "explicit"}, {"n", m.n}, {"d", m.d},
                            {"omega_b", m.optic.omega_b}, {"p", m.optic.p}, {"q", m.optic.q}};
    out["density"] = m.density;
    const MultibandCoeffs1D c = derive_multiband_coeffs(m);
    out["pde_coefficients"] = {{"A1", c.A1}, {"A2", c.A2}, {"A3", c.A3}, {"A4", c.A4},
                               {"A5", c.A5}, {"A6", c.A6}, {"A7", c.A7}};
    out["gap"] = {{"fitted", json::array({f.gap_lo, f.gap_hi})},
                  {"exact", json::array({f.exact_gap_lo, f.exact_gap_hi})}};
    out["rms_acoustic"] = f.rms_acoustic;
    out["rms_optic"] = f.rms_optic;
    return out;
  }
  if (cfg.model == "two_band") {
    TwoBandFitOptions2D o;
    o.grid.n1 = a.grid_n1;
    o.grid.n2 = a.grid_n2;
    o.polynomial = a.polynomial;
    const TwoBandFit2D f = fit_two_band_2d(cell, o);
    out["model"] = a.polynomial ? "two_band_2d_polynomial" : "two_band_2d";
    out["approximation"] = {{"source", "explicit"},
                            {"N0", pair_json(f.model.acoustic.N0)},
                            {"D1", pair_json(f.model.acoustic.D1)},
                            {"D0", f.model.acoustic.D0},
                            {"omega_b", f.model.optic.omega_b},
                            {"P", pair_json(f.model.optic.P)},
                            {"Q", pair_json(f.model.optic.Q)}};
    out["rms_acoustic"] = f.rms_acoustic;
    out["rms_optic"] = f.rms_optic;
    return out;
  }
  if (is_2d(cfg)) {
    FitOptions2D o;
    o.n1 = a.grid_n1;
    o.n2 = a.grid_n2;
    const FitResult2D f = fit_branch_2d(cell, o);
    out["model"] = "rational_2d";
    out["approximation"] = {{"source", "explicit"},
                            {"N0", pair_json(f.branch.N0)},
                            {"D1", pair_json(f.branch.D1)},
                            {"D0", f.branch.D0}};
    out["rms_omega"] = f.rms_omega;
    out["max_rel_error"] = f.max_rel_error;
    return out;
  }
  const FitResult1D f = fit_branch_1d(cell, order_index(a.order), {a.points, a.mask});
  out["model"] = "rational_1d";
  out["order"] = a.order;
  out["approximation"] = {{"source", "explicit"}, {"num", f.branch.num}, {"den", f.branch.den}};
  json named = json::object();
  for (std::size_t i = 1; i < f.branch.num.size(); ++i)
    if (i == 1 || f.branch.num[i] != 0.0) named["N" + std::to_string(i)] = f.branch.num[i];
  for (std::size_t i = 0; i < f.branch.den.size(); ++i)
    if (i == 0 || f.branch.den[i] != 0.0) named["D" + std::to_string(i)] = f.branch.den[i];
  out["coefficients"] = named;
  out["mask"] = {{"num_free", f.mask.num_free}, {"den_free", f.mask.den_free}};
  out["points"] = a.points;
  out["linear_residual"] = f.linear_residual;
  out["rms_omega"] = f.rms_omega;
  out["rel_rms_omega"] = f.rel_rms_omega;
  out["edge_exact"] = f.edge_exact;
  out["edge_fit"] = f.edge_fit;
  if (cfg.cell.preset == "CELL_A")
    out["distance_to_published"] = branch_curve_distance(f.branch, published_branch_1d(a.order), cell, a.points);
  return out;
}

Table cmd_scatter1d(const RunConfig& cfg, int threads) {
  if (is_2d(cfg)) throw ConfigError("$.geometry: scatter1d needs single_boundary or double_boundary");
  const UnitCell cell = cfg.cell.build();
  const double w0 = reference_omega0(cfg);
  const bool dbl = cfg.geometry == "double_boundary";
  const HomogenizedMedium med =
      cfg.model == "two_band" ? two_band_1d(cfg, cell) : approximation_1d(cfg, cell);
  const HomogenizedMedium inc = incidence_medium(cfg, cell);
  const auto grid = need(cfg.omega_over_omega0, "omega_over_omega0").points();

  Table t;
  t.header = {"omega_over_omega0", "TE_exact_ab", "TE_exact_ba", "TE_hom", "err_norm", "err_norm_ba",
              "omega", "RE_hom", "energy_defect", "energy_defect_exact", "flag"};
  t.rows = parallel_map<std::vector<std::string>>(grid.size(), threads, [&](std::size_t i) {
    const double w = grid[i] * w0;
    ScatteringProblem1D p;
    p.geometry = dbl ? Geometry1D::double_boundary : Geometry1D::single_boundary;
    p.cell = cell;
    p.slab_cells = cfg.slab_cells;
    p.hom = {cfg.hom.modulus, cfg.hom.density};
    p.omega = w;
    p.ordering = Ordering::a_first;
    const ScatteringSolution ab = scatter_1d(p);
    p.ordering = Ordering::b_first;
    const ScatteringSolution ba = scatter_1d(p);

    InterfaceStack st = base_stack(cfg, w, 0.0);
    st.regions = {{inc}, {med}};
    if (dbl) {
      st.regions[1].length = cfg.slab_cells * cell.period();
      st.regions.push_back({inc});
    }
    const HomScatteringSolution hs = solve_scattering_hom(st);
    const double exact_defect = std::max(ab.energy_defect(), ba.energy_defect());
    return std::vector<std::string>{fmt(grid[i]), fmt(ab.T_E), fmt(ba.T_E), fmt(hs.T_E),
                                    fmt(std::abs(hs.T_E - ab.T_E)), fmt(std::abs(hs.T_E - ba.T_E)),
                                    fmt(w), fmt(hs.R_E), fmt(hs.energy_defect()), fmt(exact_defect),
                                    flag_for(hs.energy_defect(), exact_defect, kHomDefectTol)};
  });
  return t;
}

Table cmd_scatter2d(const RunConfig& cfg, int threads) {
  const UnitCell cell = cfg.cell.build();
  const double h = cell.period();
  const double w0 = reference_omega0(cfg);
  const bool two = cfg.model == "two_band";
  RunConfig c2 = cfg;
  c2.geometry = "2d";
  const HomogenizedMedium med = two ? two_band_2d(c2, cell) : approximation_2d(c2, cell);
  const HomogenizedMedium inc = incidence_medium(c2, cell);
  const auto omegas = need(cfg.omega_over_omega0, "omega_over_omega0").points();
  if (cfg.k1h && cfg.theta_deg) throw ConfigError("$.k1h: give either k1h or theta_deg, not both");
  const std::vector<double> thetas = cfg.k1h ? std::vector<double>{0.0} : need(cfg.theta_deg, "theta_deg").points();

  struct Point { double r, theta; };
  std::vector<Point> pts;
  for (double r : omegas)
    for (double th : thetas) pts.push_back({r, th});

  Table t;
  t.header = {"omega_over_omega0", "theta_deg", "R_exact", "R_hom", "TE_exact", "TE_hom", "energy_defect",
              "omega", "k1h", "truncation", "RE_exact", "RE_hom", "energy_defect_exact", "flag"};
  t.rows = parallel_map<std::vector<std::string>>(pts.size(), threads, [&](std::size_t i) {
    const double w = pts[i].r * w0;
    ScatteringProblem2D p;
    p.cell = cell;
    p.hom = {cfg.hom.modulus, cfg.hom.density};
    p.omega = w;
    if (cfg.k1h)
      p.k1 = *cfg.k1h / h;
    else
      p.theta = pts[i].theta * kDeg;
    p.truncation = cfg.truncation.initial;
    p.defect_tol = cfg.truncation.defect_tol;
    p.max_truncation = cfg.truncation.max;
    p.panels_per_harmonic = cfg.truncation.panels_per_harmonic;
    const double k1 = p.incidence_k1();
    const double theta = cfg.k1h ? std::acos(k1 / p.hom.wavenumber(w)) / kDeg : pts[i].theta;
    const ScatteringSolution2D ex = scatter_2d(p);

    InterfaceStack st = base_stack(cfg, w, k1);
    st.regions = {{inc}, {med}};
    const HomScatteringSolution hs = solve_scattering_hom(st);
    return std::vector<std::string>{fmt(pts[i].r), fmt(theta), fmt(std::abs(ex.specular)),
                                    fmt(reflected_amplitude(hs)), fmt(ex.T_E), fmt(hs.T_E),
                                    fmt(hs.energy_defect()), fmt(w), fmt(k1 * h), fmt(ex.truncation),
                                    fmt(ex.R_E), fmt(hs.R_E), fmt(ex.energy_defect()),
                                    flag_for(hs.energy_defect(), ex.energy_defect(), cfg.truncation.defect_tol)};
  });
  return t;
}

Table cmd_field(const RunConfig& cfg, int threads) {
  const UnitCell cell = cfg.cell.build();
  const double h = cell.period();
  const double w = single_value(cfg.omega_over_omega0, "omega_over_omega0") * reference_omega0(cfg);
  const auto xs = need(cfg.x, "x").points();
  const bool two = cfg.model == "two_band";
  Table t;

  if (!is_2d(cfg)) {
    const bool dbl = cfg.geometry == "double_boundary";
    ScatteringProblem1D p;
    p.geometry = dbl ? Geometry1D::double_boundary : Geometry1D::single_boundary;
    p.cell = cell;
    p.slab_cells = cfg.slab_cells;
    p.hom = {cfg.hom.modulus, cfg.hom.density};
    p.omega = w;
    p.ordering = cfg.ordering == "b_first" ? Ordering::b_first : Ordering::a_first;
    const auto ue = field_1d(p, xs);
    InterfaceStack st = base_stack(cfg, w, 0.0);
    const HomogenizedMedium inc = incidence_medium(cfg, cell);
    st.regions = {{inc}, {two ? two_band_1d(cfg, cell) : approximation_1d(cfg, cell)}};
    if (dbl) {
      st.regions[1].length = cfg.slab_cells * h;
      st.regions.push_back({inc});
    }
    const HomScatteringSolution hs = solve_scattering_hom(st);
    const auto uh = displacement_field_hom(hs, xs);
    t.header = {"x", "re_u_exact", "im_u_exact", "abs_u_exact", "re_u_hom", "im_u_hom", "abs_u_hom"};
    for (std::size_t i = 0; i < xs.size(); ++i)
      t.rows.push_back({fmt(xs[i]), fmt(ue[i].real()), fmt(ue[i].imag()), fmt(std::abs(ue[i])),
                        fmt(uh[i].real()), fmt(uh[i].imag()), fmt(std::abs(uh[i]))});
    return t;
  }

  const auto ys = need(cfg.y, "y").points();
  ScatteringProblem2D p;
  p.cell = cell;
  p.hom = {cfg.hom.modulus, cfg.hom.density};
  p.omega = w;
  if (cfg.k1h)
    p.k1 = *cfg.k1h / h;
  else
    p.theta = single_value(cfg.theta_deg, "theta_deg") * kDeg;
  p.truncation = cfg.truncation.initial;
  p.defect_tol = cfg.truncation.defect_tol;
  p.max_truncation = cfg.truncation.max;
  p.panels_per_harmonic = cfg.truncation.panels_per_harmonic;
  const double k1 = p.incidence_k1();
  const ScatteringSolution2D ex = scatter_2d(p);
  InterfaceStack st = base_stack(cfg, w, k1);
  st.regions = {{incidence_medium(cfg, cell)}, {two ? two_band_2d(cfg, cell) : approximation_2d(cfg, cell)}};
  const HomScatteringSolution hs = solve_scattering_hom(st);
  const auto uy = displacement_field_hom(hs, ys);

  t.header = {"x", "y", "re_u_exact", "im_u_exact", "abs_u_exact", "re_u_hom", "im_u_hom", "abs_u_hom"};
  t.rows = parallel_map<std::vector<std::string>>(xs.size() * ys.size(), threads, [&](std::size_t n) {
    const std::size_t iy = n / xs.size(), ix = n % xs.size();
    const cplx ue = field_2d(p, ex, xs[ix], ys[iy]);
    const cplx uh = uy[iy] * std::exp(cplx(0.0, -k1 * xs[ix]));
    return std::vector<std::string>{fmt(xs[ix]), fmt(ys[iy]), fmt(ue.real()), fmt(ue.imag()), fmt(std::abs(ue)),
                                    fmt(uh.real()), fmt(uh.imag()), fmt(std::abs(uh))};
  });
  return t;
}

Table cmd_multiband(const RunConfig& cfg, int threads) {
  if (is_2d(cfg)) throw ConfigError("$.geometry: multiband is the 1-d two-band sweep; use scatter2d for 2-d");
  const UnitCell cell = cfg.cell.build();
  const double w0 = reference_omega0(cfg);
  const HomogenizedMedium med = two_band_1d(cfg, cell);
  const HomogenizedMedium inc = incidence_medium(cfg, cell);
  const auto& mb = std::get<MultibandModel1D>(med.model);
  const double gap_lo = std::sqrt(mb.n / mb.d);
  const double gap_hi = std::sqrt(mb.optic.omega_b * mb.optic.omega_b - mb.optic.p / mb.optic.q);
  const BandEdges b1 = band_edges_1d(cell, 1), b2 = band_edges_1d(cell, 2);
  const auto grid = need(cfg.omega_over_omega0, "omega_over_omega0").points();

  Table t;
  t.header = {"omega_over_omega0", "TE_exact", "TE_hom", "err_norm", "omega", "RE_hom",
              "energy_defect", "in_fitted_gap", "in_exact_gap", "flag"};
  t.rows = parallel_map<std::vector<std::string>>(grid.size(), threads, [&](std::size_t i) {
    const double w = grid[i] * w0;
    ScatteringProblem1D p;
    p.cell = cell;
    p.hom = {cfg.hom.modulus, cfg.hom.density};
    p.omega = w;
    p.ordering = cfg.ordering == "b_first" ? Ordering::b_first : Ordering::a_first;
    const ScatteringSolution ex = scatter_1d(p);
    InterfaceStack st = base_stack(cfg, w, 0.0);
    st.regions = {{inc}, {med}};
    const HomScatteringSolution hs = solve_scattering_hom(st);
    const bool fitted_gap = w > gap_lo && w < gap_hi;
    const bool exact_gap = w > b1.hi && w < b2.lo;
    return std::vector<std::string>{fmt(grid[i]), fmt(ex.T_E), fmt(hs.T_E), fmt(std::abs(hs.T_E - ex.T_E)),
                                    fmt(w), fmt(hs.R_E), fmt(hs.energy_defect()), fmt(fitted_gap ? 1 : 0),
                                    fmt(exact_gap ? 1 : 0),
                                    flag_for(hs.energy_defect(), ex.energy_defect(), kHomDefectTol)};
  });
  return t;
}

Table cmd_nonlocal(const RunConfig& cfg, int threads) {
  const NonlocalParams prm = cfg.nonlocal.params();
  const auto ks = need(cfg.k, "k").points();
  const auto roots = parallel_map<std::vector<NlBandPoint>>(ks.size(), threads, [&](std::size_t i) {
    return nlt_roots(prm, ks[i], cfg.nonlocal.omega_max, cfg.nonlocal.step);
  });
  Table t;
  t.header = {"k", "band", "omega", "multiplicity"};
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (std::size_t j = 0; j < roots[i].size(); ++j)
      t.rows.push_back({fmt(ks[i]), fmt(static_cast<int>(j + 1)), fmt(roots[i][j].omega),
                        fmt(roots[i][j].multiplicity)});
  return t;
}

std::string run_command(const std::string& verb, const RunConfig& cfg, int threads) {
  if (cfg.command && *cfg.command != verb)
    throw ConfigError("$.command: config is for '" + *cfg.command + "', not '" + verb + "'");
  if (verb == "fit") return dump_json(cmd_fit(cfg));
  if (verb == "dispersion") return cmd_dispersion(cfg, threads).to_csv();
  if (verb == "scatter1d") return cmd_scatter1d(cfg, threads).to_csv();
  if (verb == "scatter2d") return cmd_scatter2d(cfg, threads).to_csv();
  if (verb == "field") return cmd_field(cfg, threads).to_csv();
  if (verb == "multiband") return cmd_multiband(cfg, threads).to_csv();
  if (verb == "nonlocal") return cmd_nonlocal(cfg, threads).to_csv();
  throw ConfigError("unknown command '" + verb + "'");
}

}  // namespace mbh
