#include "mbhom/numeric.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace mbh {

QuadratureRule gauss_legendre_panels(double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("gauss_legendre_panels: panels < 1");
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& abs = rule::abscissa();
  const auto& wts = rule::weights();
  std::vector<double> xr, wr;
  for (std::size_t i = 0; i < abs.size(); ++i) {
    if (abs[i] == 0.0) {
      xr.push_back(0.0);
      wr.push_back(wts[i]);
    } else {
      xr.push_back(-abs[i]);
      wr.push_back(wts[i]);
      xr.push_back(abs[i]);
      wr.push_back(wts[i]);
    }
  }
  QuadratureRule q;
  q.x.reserve(xr.size() * panels);
  q.w.reserve(xr.size() * panels);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + width * p;
    const double mid = lo + 0.5 * width;
    for (std::size_t i = 0; i < xr.size(); ++i) {
      q.x.push_back(mid + 0.5 * width * xr[i]);
      q.w.push_back(0.5 * width * wr[i]);
    }
  }
  return q;
}

double bracket_root(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw std::invalid_argument("bracket_root: no sign change");
  std::uintmax_t iters = 200;
  auto tol = [](double lo, double hi) {
    return std::abs(hi - lo) <=
           4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  };
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  const double x = 0.5 * (r.first + r.second);
  // Return whichever end point has the smaller residual.
  double best = x;
  double fbest = std::abs(f(x));
  for (double c : {r.first, r.second}) {
    double fc = std::abs(f(c));
    if (fc < fbest) {
      fbest = fc;
      best = c;
    }
  }
  return best;
}

double refine_extremum(const std::function<double(double)>& f, double a, double b,
                       bool maximum) {
  auto g = [&](double x) { return maximum ? -f(x) : f(x); };
  auto r = boost::math::tools::brent_find_minima(g, a, b, std::numeric_limits<double>::digits / 2);
  return r.first;
}

std::vector<ScannedRoot> scan_roots(const std::function<double(double)>& f, double a,
                                    double b, double step, double touch_tol) {
  std::vector<ScannedRoot> roots;
  if (!(b > a) || !(step > 0.0)) return roots;
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / step));
  std::vector<double> xs(n + 1), fs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    xs[i] = (i == n) ? b : a + step * static_cast<double>(i);
    fs[i] = f(xs[i]);
  }
  for (std::size_t i = 0; i <= n; ++i) {
    if (fs[i] == 0.0) {
      roots.push_back({xs[i], 1});
      continue;
    }
    if (i < n && fs[i + 1] != 0.0 && fs[i] * fs[i + 1] < 0.0) {
      roots.push_back({bracket_root(f, xs[i], xs[i + 1]), 1});
      continue;
    }
    if (i == 0 || i == n) continue;
    const double fl = fs[i - 1], fc = fs[i], fr = fs[i + 1];
    if (fl * fc <= 0.0 || fc * fr <= 0.0) continue;
    const bool toward_zero = (fc > 0.0 && fc < fl && fc <= fr) || (fc < 0.0 && fc > fl && fc >= fr);
    if (!toward_zero) continue;
    const double xe = refine_extremum(f, xs[i - 1], xs[i + 1], fc < 0.0);
    const double fe = f(xe);
    if (fe * fc < 0.0) {
      roots.push_back({bracket_root(f, xs[i - 1], xe), 1});
      roots.push_back({bracket_root(f, xe, xs[i + 1]), 1});
    } else if (std::abs(fe) <= touch_tol) {
      roots.push_back({xe, 2});
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const ScannedRoot& l, const ScannedRoot& r) { return l.x < r.x; });
  return roots;
}

}  // namespace mbh
