#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "mbhom/laminate.hpp"

namespace mbh {

struct Homogeneous {
  double modulus = 1.0;
  double density = 1.0;
  double wavenumber(double omega) const;
};

enum class Geometry1D { single_boundary, double_boundary };

struct ScatteringProblem1D {
  Geometry1D geometry = Geometry1D::single_boundary;
  UnitCell cell;
  Ordering ordering = Ordering::a_first;
  int slab_cells = 10;
  Homogeneous hom;
  double omega = 1.0;
};

struct ModeAmplitude {
  cplx wavenumber;
  cplx amplitude;
  bool propagating = false;
};

struct ScatteringSolution {
  std::vector<ModeAmplitude> reflected;
  std::vector<ModeAmplitude> transmitted;
  double R_E = 0.0;
  double T_E = 0.0;
  double condition = 1.0;
  double energy_defect() const { return std::abs(R_E + T_E - 1.0); }
};

Eigen::Matrix2cd transfer_matrix(const Layer& layer, double omega);
Eigen::Matrix2cd transfer_matrix(const UnitCell& cell, double omega,
                                 Ordering ordering = Ordering::a_first);

// Time-averaged flux (omega/2) Im(u conj(sigma)) of a state (u, sigma).
double state_flux(const Eigen::Vector2cd& state, double omega);

ScatteringSolution scatter_1d(const ScatteringProblem1D& problem);

// Displacement of the solved 1-d problem; the metamaterial starts at x = 0.
std::vector<cplx> field_1d(const ScatteringProblem1D& problem, const std::vector<double>& x);

struct ScatteringProblem2D {
  UnitCell cell;
  Homogeneous hom;
  double omega = 1.0;
  // Exactly one of theta (angle to the interface, radians) or k1.
  std::optional<double> theta;
  std::optional<double> k1;
  int truncation = 2;        // reflected harmonics m = -M..M
  bool grow = true;          // double M until the energy defect is below tol
  double defect_tol = 1e-3;
  int max_truncation = 64;
  int panels_per_harmonic = 4;
  double incidence_k1() const;
};

struct ConvergenceStep {
  int truncation;
  double R_E;
  double T_E;
  double defect;
  double condition;
};

struct ScatteringSolution2D : ScatteringSolution {
  double k1 = 0.0;
  int truncation = 0;
  cplx specular;   // amplitude of the m = 0 reflected harmonic
  int propagating_modes = 0;
  std::vector<BlochMode2D> modes;
  std::vector<cplx> mode_amplitudes;
  std::vector<double> harmonic_xi;
  std::vector<cplx> harmonic_kappa;
  std::vector<cplx> harmonic_amplitudes;
  std::vector<ConvergenceStep> history;
};

// Single solve at a fixed truncation.
ScatteringSolution2D scatter_2d_fixed(const ScatteringProblem2D& problem, int truncation);
// Solve with the truncation growth loop.
ScatteringSolution2D scatter_2d(const ScatteringProblem2D& problem);

// Field of a solved 2-d problem at (x1, x2); metamaterial occupies x2 > 0.
cplx field_2d(const ScatteringProblem2D& problem, const ScatteringSolution2D& sol, double x1,
              double x2);

}  // namespace mbh
