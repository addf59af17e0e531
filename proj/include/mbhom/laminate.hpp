#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "mbhom/numeric.hpp"

namespace mbh {

struct Layer {
  double modulus = 1.0;
  double density = 1.0;
  double thickness = 1.0;
};

enum class Ordering { a_first, b_first };

// Bilayer laminate unit cell.
class UnitCell {
 public:
  UnitCell() : UnitCell(Layer{}, Layer{}) {}
  UnitCell(const Layer& a, const Layer& b);
  // Artificial laminate: two identical layers of half the period each.
  static UnitCell uniform(double modulus, double density, double period);

  const Layer& layer_a() const { return a_; }
  const Layer& layer_b() const { return b_; }
  const Layer& layer(int i) const { return i == 0 ? a_ : b_; }
  double period() const { return period_; }
  // Layer indices in the order a wave entering from the left meets them.
  static std::array<int, 2> sequence(Ordering o);

 private:
  Layer a_, b_;
  double period_;
};

UnitCell cell_a();
UnitCell cell_b();

double harmonic_mean_modulus(const UnitCell& cell);
double mean_density(const UnitCell& cell);

// cos(alpha h) and sin(alpha h)/alpha as entire functions of alpha^2.
struct CosSinc {
  double c;
  double s;
};
CosSinc cos_sinc(double alpha_sq, double h);

// Propagator of the state (u, E du/dx) across a layer of thickness `length`;
// k2sq is the squared wavenumber along the laminae (0 in 1-d).
Eigen::Matrix2d layer_propagator(const Layer& layer, double omega, double k2sq,
                                 double length);
Eigen::Matrix2d layer_propagator(const Layer& layer, double omega, double k2sq = 0.0);
Eigen::Matrix2d cell_propagator(const UnitCell& cell, double omega, double k2sq = 0.0,
                                Ordering ordering = Ordering::a_first);

double dispersion_rhs_1d(const UnitCell& cell, double omega);
double dispersion_rhs_2d(const UnitCell& cell, double omega, double k2sq);

// Principal Bloch wavenumber: Re(K h) in [0, pi], Im(K) <= 0.
cplx bloch_wavenumber_1d(const UnitCell& cell, double omega);

struct BandEdges {
  double lo;
  double hi;
};

// Edges of the given 1-based band. omega_max <= 0 picks a window that covers
// the band from the cell's travel time.
BandEdges band_edges_1d(const UnitCell& cell, int band_index, double omega_max = 0.0);
double midgap_frequency(const UnitCell& cell);

// Frequency on a 1-d band for a Bloch wavenumber K in [0, pi/h].
double band_frequency_1d(const UnitCell& cell, int band_index, double K);

struct K2RootOptions {
  double t_step = 0.0;        // scan step in sqrt(k2max^2 - k2^2); 0 means pi/(400 h)
  double window_cap = 4.0e3;  // maximum scanned range, in units of 1/h
  double touch_tol = 1e-10;
};

// Squared normal wavenumbers of the first `count` Bloch modes at (omega, k1),
// sorted by descending value (propagating first, then evanescent by growing
// decay rate). Tangential roots appear twice.
std::vector<double> k2sq_roots(const UnitCell& cell, double omega, double k1, int count,
                               const K2RootOptions& opts = {});
// The same roots as wavenumbers: +sqrt for propagating, -i sqrt(|.|) otherwise.
std::vector<cplx> k2_roots(const UnitCell& cell, double omega, double k1, int count,
                           const K2RootOptions& opts = {});
cplx k2_from_sq(double k2sq);

// Bloch mode U(x1) exp(-i k2 x2) of the laminate with lamination along x1.
struct BlochMode2D {
  UnitCell cell;
  double omega = 0.0;
  double k1 = 0.0;
  cplx k2;
  double k2sq = 0.0;
  // (u, mu du/dx1) at the start of layer a and of layer b (layer a at x1 = 0).
  std::array<Eigen::Vector2cd, 2> start;
  std::string normalization = "max_abs_unity";

  cplx value(double x1) const;
  cplx traction(double x1) const;  // mu du/dx1
  // Continuity residual at the internal interface and Bloch residual at x1 = h.
  double interface_residual() const;
  double bloch_residual() const;
};

// branch selects the second eigenvector when the cell matrix is a multiple
// of the identity (tangential roots).
BlochMode2D bloch_mode_shape(const UnitCell& cell, double omega, double k1, cplx k2,
                             int branch = 0);

}  // namespace mbh
