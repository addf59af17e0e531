#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mbhom/commands.hpp"
#include "mbhom/errors.hpp"
#include "mbhom/nonlocal.hpp"

namespace py = pybind11;
using namespace mbh;

namespace {

// A cell is a preset name or ((E, rho, t), (E, rho, t)).
UnitCell to_cell(const py::object& o) {
  if (py::isinstance<py::str>(o)) return preset_cell(o.cast<std::string>()).build();
  const auto layers = o.cast<std::pair<std::array<double, 3>, std::array<double, 3>>>();
  auto mk = [](const std::array<double, 3>& a) { return Layer{a[0], a[1], a[2]}; };
  return UnitCell(mk(layers.first), mk(layers.second));
}

RunConfig config_from(const std::string& text) { return parse_config(json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_mbhom, m) {
  m.doc() = "Multiband homogenization of periodic bilayer laminates";

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  (void)config_error;

  m.def("midgap_frequency", [](const py::object& cell) { return midgap_frequency(to_cell(cell)); }, py::arg("cell") = "CELL_A");
  m.def("harmonic_mean_modulus", [](const py::object& cell) { return harmonic_mean_modulus(to_cell(cell)); },
        py::arg("cell") = "CELL_A");
  m.def("band_edges", [](const py::object& cell, int band) {
    const BandEdges e = band_edges_1d(to_cell(cell), band);
    return std::make_pair(e.lo, e.hi);
  }, py::arg("cell"), py::arg("band"));
  m.def("bloch_wavenumber", [](const py::object& cell, double w) { return bloch_wavenumber_1d(to_cell(cell), w); },
        py::arg("cell"), py::arg("omega"));

  m.def("fit_branch_1d", [](int order, const py::object& cell, int points) {
    const FitResult1D f = fit_branch_1d(to_cell(cell), order_index(order), {points, std::nullopt});
    py::dict d;
    d["num"] = f.branch.num;
    d["den"] = f.branch.den;
    d["rms_omega"] = f.rms_omega;
    d["rel_rms_omega"] = f.rel_rms_omega;
    return d;
  }, py::arg("order"), py::arg("cell") = "CELL_A", py::arg("points") = 200);

  m.def("scatter_1d", [](const py::object& cell, double hom_modulus, double omega, bool double_boundary, int slab_cells) {
    ScatteringProblem1D p;
    p.cell = to_cell(cell);
    p.hom = {hom_modulus, 1.0};
    p.omega = omega;
    p.geometry = double_boundary ? Geometry1D::double_boundary : Geometry1D::single_boundary;
    p.slab_cells = slab_cells;
    const ScatteringSolution s = scatter_1d(p);
    return std::make_pair(s.R_E, s.T_E);
  }, py::arg("cell"), py::arg("hom_modulus"), py::arg("omega"), py::arg("double_boundary") = false,
     py::arg("slab_cells") = 10, "Fine-scale (R_E, T_E).");

  m.def("scatter_1d_hom", [](int order, const py::object& cell, double hom_modulus, double omega) {
    InterfaceStack st;
    st.regions = {{HomogenizedMedium::classical(hom_modulus, 1.0)}, {HomogenizedMedium{fit_branch_1d(to_cell(cell), order_index(order)).branch}}};
    st.omega = omega;
    const HomScatteringSolution s = solve_scattering_hom(st);
    return std::make_pair(s.R_E, s.T_E);
  }, py::arg("order"), py::arg("cell"), py::arg("hom_modulus"), py::arg("omega"),
     "Homogenized (R_E, T_E) for a classical medium against a fitted rational medium.");

  m.def("nonlocal_roots", [](double k, double omega_max) {
    std::vector<double> out;
    for (const NlBandPoint& p : nlt_roots(NonlocalParams::reference(), k, omega_max)) out.push_back(p.omega);
    return out;
  }, py::arg("k"), py::arg("omega_max"));

  m.def("_run", [](const std::string& verb, const std::string& config, int threads) {
    const RunConfig cfg = config_from(config);
    py::gil_scoped_release release;
    return run_command(verb, cfg, threads);
  }, py::arg("verb"), py::arg("config"), py::arg("threads") = 1);
  m.def("_normalize_config", [](const std::string& config) { return dump_json(to_json(config_from(config))); });
}
