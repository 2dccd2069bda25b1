#pragma once

// Independent reference computations for the tests: composite Simpson rules
// and closed forms, written without the library's grid or FFT code.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

inline cplx simpson(const std::function<cplx(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  double h = (b - a) / n;
  cplx s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

inline cplx simpson2(const std::function<cplx(double, double)>& f, double a, double b, int n = 600) {
  return simpson([&](double x) { return simpson([&](double y) { return f(x, y); }, a, b, n); }, a, b, n);
}

inline double psi0(double x) { return std::pow(pi, -0.25) * std::exp(-0.5 * x * x); }

/// T_{psi0} u(x, xi) for a 1-d function by direct quadrature of the definition.
inline cplx transform(const std::function<cplx(double)>& u, double x, double xi, double half = 12.0,
                      int n = 6000) {
  return simpson([&](double y) { return u(y) * psi0(y - x) * std::polar(1.0, -(y - x) * xi); }, x - half, x + half,
                 n) /
         std::sqrt(2.0 * pi);
}

}  // namespace oracle
