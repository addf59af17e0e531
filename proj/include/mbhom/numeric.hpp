#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace mbh {

using cplx = std::complex<double>;

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Composite 20-point Gauss-Legendre rule on [a, b] with `panels` equal panels.
QuadratureRule gauss_legendre_panels(double a, double b, int panels);

// Root of f on [a, b] given a sign change (fa * fb <= 0).
double bracket_root(const std::function<double(double)>& f, double a, double b);

// Location of the extremum of f inside [a, b].
double refine_extremum(const std::function<double(double)>& f, double a, double b,
                       bool maximum);

struct ScannedRoot {
  double x;
  int multiplicity;
};

// All roots of f on [a, b] found by sampling with the given step. Sign changes
// are bisected; sampled extrema that approach zero are refined, which catches
// pairs of roots closer than one step and tangential (double) roots with
// |f| <= touch_tol.
std::vector<ScannedRoot> scan_roots(const std::function<double(double)>& f, double a,
                                    double b, double step, double touch_tol);

// Evaluate task(i) for i in [0, n) on up to `threads` workers; results keep
// index order, so output does not depend on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads,
                            const std::function<T(std::size_t)>& task);

}  // namespace mbh

#include "mbhom/parallel.tpp"
