#pragma once

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mbhom/homsolve.hpp"
#include "mbhom/laminate.hpp"
#include "mbhom/nonlocal.hpp"
#include "mbhom/ratfit.hpp"

namespace mbh {

using json = nlohmann::ordered_json;

// Either {"start", "stop", "count"} (inclusive linspace) or {"values": [...]}.
struct GridSpec {
  std::optional<double> start, stop;
  std::optional<int> count;
  std::vector<double> values;
  std::vector<double> points() const;
};

// "CELL_A", "CELL_B", {"uniform": {...}} or {"layer_a": {...}, "layer_b": {...}}.
struct CellSpec {
  std::string preset;
  std::optional<double> uniform_modulus, uniform_density, uniform_period;
  std::optional<Layer> layer_a, layer_b;
  UnitCell build() const;
};

inline CellSpec preset_cell(const std::string& name) {
  CellSpec c;
  c.preset = name;
  return c;
}

struct HomSpec {
  double modulus = 1.0;
  double density = 1.0;
  // classical | artificial_laminate (two-band verbs only)
  std::string treatment = "classical";
};

struct ApproxSpec {
  std::string source = "fit";  // fit | published | explicit
  int order = 22;              // 22, 44, 66, 88
  int points = 200;
  std::optional<CoefficientMask> mask;
  std::vector<double> num, den;                     // explicit 1-d branch
  std::optional<std::array<double, 2>> N0, D1, P, Q;  // explicit 2-d diagonals
  double D0 = 1.0;
  std::optional<double> omega_b;
  std::optional<double> n, d, p, q;                 // explicit two-band 1-d
  bool polynomial = false;
  bool pin_gap = true;
  int grid_n1 = 16, grid_n2 = 16;
};

struct TruncationSpec {
  int initial = 2;
  int max = 64;
  double defect_tol = 1e-3;
  int panels_per_harmonic = 4;
};

struct NonlocalSpec {
  std::string preset = "reference";  // reference | literal | custom
  std::optional<double> T0, time_weight, tau_extent, c1, c2;
  double omega_max = 20.0;
  double step = 0.0;
  NonlocalParams params() const;
};

struct RunConfig {
  std::optional<std::string> command;
  CellSpec cell = preset_cell("CELL_A");
  std::optional<CellSpec> normalization_cell;  // which cell's midgap normalizes omega
  HomSpec hom;
  std::string geometry = "single_boundary";   // single_boundary | double_boundary | 2d
  int slab_cells = 10;
  std::string ordering = "a_first";
  std::string model = "single_band";          // single_band | two_band (scatter2d, field)
  ApproxSpec approximation;
  std::optional<GridSpec> omega_over_omega0, theta_deg, Kh, k, x, y;
  std::optional<double> k1h;
  TruncationSpec truncation;
  std::string pairing = "natural_one_sided";
  std::string outgoing = "group_velocity";
  bool lift_classical = true;
  bool literal_naturals = false;
  NonlocalSpec nonlocal;
};

RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
json to_json(const RunConfig& c);

// Shortest decimal text that round-trips a double (17 significant digits).
std::string format_number(double v);
std::string dump_json(const json& j);

Pairing parse_pairing(const std::string& s);
OutgoingRule parse_outgoing(const std::string& s);

}  // namespace mbh
