#include <gtest/gtest.h>

#include <phasescope/grid.hpp>

#include "oracles.hpp"

using namespace phasescope;

namespace {

GridFunction sample_fn(const GridSpec& s, const std::function<cplx(double)>& f) {
  GridFunction g(s);
  for (std::size_t i = 0; i < s.size(); ++i) g[i] = f(s.point(i)[0]);
  return g;
}

const GridSpec kGrid = GridSpec::cube(1, 12.0, 256);

}  // namespace

TEST(GridSpec, StepAndNodes) {
  const Axis& a = kGrid.axis(0);
  EXPECT_EQ(a.step() * 256, 24.0);
  EXPECT_EQ(a.node(128), 0.0);
  EXPECT_DOUBLE_EQ(a.node(0), -12.0);
  EXPECT_NEAR(a.dual().half_width, 256 * oracle::pi / 24.0, 1e-12);
  EXPECT_TRUE(kGrid.dual().dual() == kGrid);
  GridSpec odd = GridSpec::cube(2, 3.7, 64);
  EXPECT_TRUE(odd.dual().dual() == odd);
}

TEST(GridSpec, RejectsBadShapes) {
  EXPECT_THROW(GridSpec::cube(1, 12.0, 100), ValidationError);
  EXPECT_THROW(GridSpec::cube(1, 12.0, 8), ValidationError);
  EXPECT_THROW(GridSpec::cube(1, -1.0, 64), ValidationError);
  EXPECT_THROW(GridSpec::cube(5, 1.0, 16), DimensionError);
  EXPECT_THROW(GridSpec(std::vector<Axis>{}), DimensionError);
}

TEST(Quadrature, GaussianNormalization) {
  auto p = sample_fn(kGrid, [](double x) { return oracle::psi0(x); });
  EXPECT_NEAR(quadrature_inner(p, p).real(), 1.0, 1e-10);
  GridFunction zero(kGrid);
  EXPECT_EQ(quadrature_inner(p, zero), cplx{});
}

TEST(Quadrature, OddTimesEvenVanishes) {
  auto p = sample_fn(kGrid, [](double x) { return oracle::psi0(x); });
  auto h1 = sample_fn(kGrid, [](double x) { return std::sqrt(2.0) * x * oracle::psi0(x); });
  cplx ref = oracle::simpson([](double x) { return std::sqrt(2.0) * x * oracle::psi0(x) * oracle::psi0(x); }, -12, 12);
  EXPECT_NEAR(std::abs(ref), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(quadrature_inner(h1, p)), 0.0, 1e-10);
  EXPECT_NEAR(quadrature_inner(h1, h1).real(), 1.0, 1e-10);
}

TEST(Quadrature, SpecMismatch) {
  GridFunction a(kGrid), b(GridSpec::cube(1, 10.0, 256));
  EXPECT_THROW(quadrature_inner(a, b), DimensionError);
}

TEST(Fourier, GaussianFixedPoint) {
  auto p = sample_fn(kGrid, [](double x) { return oracle::psi0(x); });
  GridFunction f = fourier(p);
  EXPECT_TRUE(f.spec == kGrid.dual());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double xi = f.spec.point(i)[0];
    // independent oracle: direct quadrature of the Fourier integral
    if (i % 17 == 0) {
      cplx ref = oracle::simpson([&](double x) { return oracle::psi0(x) * std::polar(1.0, -x * xi); }, -12, 12, 8000) /
                 std::sqrt(2 * oracle::pi);
      EXPECT_NEAR(std::abs(f[i] - ref), 0.0, 1e-10);
    }
    EXPECT_NEAR(std::abs(f[i] - oracle::psi0(xi)), 0.0, 1e-10);
  }
}

TEST(Fourier, TwiceIsReflection) {
  auto f = sample_fn(kGrid, [](double x) { return oracle::psi0(x - 1.5) * std::polar(1.0, 2.0 * x); });
  GridFunction ff = fourier(fourier(f));
  const std::size_t n = f.size();
  for (std::size_t k = 1; k < n; ++k) EXPECT_NEAR(std::abs(ff[k] - f[n - k]), 0.0, 1e-12);
}

TEST(Fourier, ShiftBecomesModulation) {
  const double x0 = 2.0;
  auto f = sample_fn(kGrid, [](double x) { return oracle::psi0(x); });
  auto fs = sample_fn(kGrid, [&](double x) { return oracle::psi0(x - x0); });
  GridFunction a = fourier(fs), b = fourier(f);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double xi = a.spec.point(i)[0];
    EXPECT_NEAR(std::abs(a[i] - std::polar(1.0, -x0 * xi) * b[i]), 0.0, 1e-10);
  }
}

TEST(Fourier, UnitaryAndRoundTrip) {
  auto f = sample_fn(kGrid, [](double x) { return oracle::psi0(x + 1.0) * std::polar(1.0, x * x / 3.0); });
  auto g = sample_fn(kGrid, [](double x) { return x * oracle::psi0(x - 0.5); });
  GridFunction F = fourier(f), G = fourier(g);
  EXPECT_NEAR(l2_norm(F), l2_norm(f), 1e-12 * l2_norm(f));
  EXPECT_NEAR(std::abs(quadrature_inner(f, g) - quadrature_inner(F, G)), 0.0, 1e-10 * l2_norm(f) * l2_norm(g));
  GridFunction back = inverse_fourier(F);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
  EXPECT_LE(err, 1e-12 * max_abs(f.values));
}

TEST(Fourier, PartialOnTensor) {
  GridSpec s2 = GridSpec::cube(2, 12.0, 64);
  GridFunction f(s2);
  for (std::size_t i = 0; i < s2.size(); ++i) {
    auto x = s2.point(i);
    f[i] = oracle::psi0(x[0]) * oracle::psi0(x[1]);
  }
  std::vector<std::size_t> ax{1};
  GridFunction p = partial_fourier(f, ax);
  EXPECT_TRUE(p.spec.axis(0) == s2.axis(0));
  EXPECT_TRUE(p.spec.axis(1) == s2.axis(1).dual());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto z = p.spec.point(i);
    EXPECT_NEAR(std::abs(p[i] - oracle::psi0(z[0]) * oracle::psi0(z[1])), 0.0, 1e-10);
  }
  std::vector<std::size_t> all{0, 1};
  GridFunction full = partial_fourier(f, all), ref = fourier(f);
  EXPECT_EQ(full.values, ref.values);
  std::vector<std::size_t> bad{2};
  EXPECT_THROW(partial_fourier(f, bad), DimensionError);
}

TEST(Fourier, Deterministic) {
  auto f = sample_fn(kGrid, [](double x) { return oracle::psi0(x) * std::polar(1.0, 3.0 * x); });
  EXPECT_EQ(fourier(f).values, fourier(f).values);
  set_threads(4);
  GridFunction a = fourier(f);
  set_threads(1);
  GridFunction b = fourier(f);
  set_threads(0);
  EXPECT_EQ(a.values, b.values);
}
