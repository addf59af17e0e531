#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

#include "mbhom/laminate.hpp"

namespace mbh {

// omega^2(k) = sum_i num[i] k^(2i) / sum_i den[i] k^(2i); num[0] is always 0.
struct RationalBranch1D {
  std::vector<double> num;
  std::vector<double> den;

  static RationalBranch1D classical(double modulus, double density);
  // Highest retained exponent index n (RF22 -> 1, RF66 -> 3).
  int order() const;
  double numerator(double k) const;
  double denominator(double k) const;
  double omega_sq(double k) const;
  double omega(double k) const;
  double domega_dk(double k) const;
  void validate() const;
};

struct CoefficientMask {
  std::vector<int> num_free;  // indices i >= 2 of free N_i
  std::vector<int> den_free;  // indices i >= 1 of free D_i
};

// 22 -> 1, 44 -> 2, 66 -> 3, 88 -> 4.
int order_index(int label);
CoefficientMask default_mask(int order);

struct FitOptions1D {
  int points = 200;
  std::optional<CoefficientMask> mask;
};

struct FitResult1D {
  RationalBranch1D branch;
  CoefficientMask mask;
  double linear_residual = 0.0;  // || omega^2 den - num || on the grid
  double rms_omega = 0.0;
  double rel_rms_omega = 0.0;
  double edge_exact = 0.0;       // omega at K h = pi
  double edge_fit = 0.0;
  std::vector<double> K;
  std::vector<double> omega_exact;
};

// Band-1 samples on K h = pi j / points, j = 1..points.
void band1_samples(const UnitCell& cell, int points, std::vector<double>& K,
                   std::vector<double>& omega);

FitResult1D fit_branch_1d(const UnitCell& cell, int order, const FitOptions1D& opts = {});

// Relative RMS distance between the omega curves of two branches on the band-1 grid.
double branch_curve_distance(const RationalBranch1D& a, const RationalBranch1D& b,
                             const UnitCell& cell, int points = 200);

// Active-set nonnegative least squares: min ||A x - b|| subject to x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// omega^2(K) = K.N0.K / (D0 + K.D1.K).
struct TensorBranch2D {
  Eigen::Matrix2d N0 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d D1 = Eigen::Matrix2d::Zero();
  double D0 = 1.0;
  double omega_sq(double K1, double K2) const;
  void validate() const;
};

struct BandSample2D {
  double K1, K2;
  double omega1, omega2;  // exact band-1 and band-2 frequencies
};

struct FitOptions2D {
  int n1 = 16;
  int n2 = 16;
  double K1max = 0.0;  // 0 means pi/h
  double K2max = 0.0;  // 0 means 2 pi/h
};

// Frequencies of the first `bands` 2-d bands at (K1, K2).
std::vector<double> band_frequencies_2d(const UnitCell& cell, double K1, double K2, int bands);
std::vector<BandSample2D> band_samples_2d(const UnitCell& cell, const FitOptions2D& opts);

struct FitResult2D {
  TensorBranch2D branch;
  double rms_omega = 0.0;
  double max_rel_error = 0.0;
};

FitResult2D fit_branch_2d(const UnitCell& cell, const FitOptions2D& opts = {});
FitResult2D fit_branch_2d(const UnitCell& cell, const std::vector<BandSample2D>& samples);

// omega^2(k) = omega_b^2 - p k^2 / (1 + q k^2).
struct OpticBranch1D {
  double omega_b = 0.0;
  double p = 0.0;
  double q = 0.0;
  double omega_sq(double k) const;
};

// Acoustic branch normalized by the mean density: omega^2 = n k^2 / (1 + d k^2).
struct MultibandModel1D {
  double n = 0.0;
  double d = 0.0;
  OpticBranch1D optic;
  double density = 1.0;
  double acoustic_omega_sq(double k) const;
};

struct MultibandCoeffs1D {
  double A1, A2, A3, A4, A5, A6, A7;
};

MultibandCoeffs1D derive_multiband_coeffs(const MultibandModel1D& model);
// (omega^2 - acoustic^2)(omega^2 - optic^2) times (1 + d k^2)(1 + q k^2).
double product_dispersion(const MultibandModel1D& model, double k, double omega);
// Plane-wave residual of the fourth-order-in-time equation built from the A's.
double multiband_pde_residual(const MultibandCoeffs1D& a, double k, double omega);

struct TwoBandFitOptions1D {
  int points = 200;
  bool pin_gap = true;  // place both asymptotes on the exact gap edges
};

struct TwoBandFit1D {
  MultibandModel1D model;
  double rms_acoustic = 0.0;
  double rms_optic = 0.0;
  double gap_lo = 0.0;  // fitted gap: acoustic and optic asymptotes
  double gap_hi = 0.0;
  double exact_gap_lo = 0.0;
  double exact_gap_hi = 0.0;
};

TwoBandFit1D fit_two_band_1d(const UnitCell& cell, const TwoBandFitOptions1D& opts = {});

struct OpticBranch2D {
  double omega_b = 0.0;
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  double omega_sq(double K1, double K2) const;
};

struct MultibandModel2D {
  TensorBranch2D acoustic;
  OpticBranch2D optic;
};

// Four-index tensors stored as t[((m*2+n)*2+p)*2+q].
using Tensor4 = std::array<double, 16>;
inline int t4(int m, int n, int p, int q) { return ((m * 2 + n) * 2 + p) * 2 + q; }

struct MultibandCoeffs2D {
  Eigen::Matrix2d A1, A4, A6;
  double A5;
  Tensor4 A2, A3, A7;
};

MultibandCoeffs2D derive_multiband_coeffs(const MultibandModel2D& model);

struct TwoBandFitOptions2D {
  FitOptions2D grid;
  bool polynomial = false;  // D1 = Q = 0 with unconstrained linear least squares
};

struct TwoBandFit2D {
  MultibandModel2D model;
  double rms_acoustic = 0.0;
  double rms_optic = 0.0;
};

TwoBandFit2D fit_two_band_2d(const UnitCell& cell, const TwoBandFitOptions2D& opts = {});

}  // namespace mbh
