#include <gtest/gtest.h>

#include <phasescope/decay.hpp>
#include <phasescope/identities.hpp>

#include "oracles.hpp"

using namespace phasescope;

namespace {

const GridSpec kGrid = GridSpec::cube(1, 12.0, 256);
const Window kPsi = standard_gaussian();

/// u = sqrt(2) x psi0
Signal h1() {
  return analytic("h1", 1, [](std::span<const double> x) { return cplx(std::sqrt(2.0) * x[0] * oracle::psi0(x[0])); });
}

double rel_l2(const GridFunction& a, const GridFunction& b) {
  double n = 0, d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    n += std::norm(a[i] - b[i]);
    d += std::norm(b[i]);
  }
  return std::sqrt(n / d);
}

/// Example field (2 pi)^{-(d-n)/2} pi^{-d/4} e^{i<x2,xi2>} e^{-(|x2|^2+|xi1|^2)/2} for d = 1.
cplx example_field(std::size_t n, double x, double xi) {
  if (n == 0) return std::pow(2 * oracle::pi, -0.5) * std::pow(oracle::pi, -0.25) * std::polar(1.0, x * xi) * std::exp(-0.5 * x * x);
  return std::pow(oracle::pi, -0.25) * std::exp(-0.5 * xi * xi);
}

double interior_rel_error(const PhaseSpaceField& F, const std::function<cplx(double, double)>& ref) {
  std::vector<cplx> r(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto z = F.point(i);
    r[i] = ref(z[0], z[1]);
  }
  return max_relative_error(F.values, r, interior_probes(F, 0.6));
}

}  // namespace

TEST(Transform, DeltaClosedForm) {
  PhaseSpaceField F = transform(delta0(1), kPsi, kGrid);
  EXPECT_LE(interior_rel_error(F, [](double x, double xi) { return example_field(0, x, xi); }), 1e-8);
  EXPECT_TRUE(F.xi_spec == kGrid.dual());
}

TEST(Transform, ConstantMatchesExample) {
  PhaseSpaceField F = transform(constant(1), kPsi, kGrid);
  EXPECT_LE(interior_rel_error(F, [](double x, double xi) { return example_field(1, x, xi); }), 1e-8);
}

TEST(Transform, ZeroSignal) {
  PhaseSpaceField F = transform(zero_signal(1), kPsi, kGrid);
  EXPECT_EQ(max_abs(F.values), 0.0);
}

TEST(Transform, PacketAgainstQuadratureOracle) {
  Signal u = packet1(1.0, 2.0, 0.8, 0.4);
  PhaseSpaceField F = transform(u, kPsi, kGrid);
  auto uf = [](double y) { return eval(packet1(1.0, 2.0, 0.8, 0.4), {y}); };
  for (std::size_t ix : {100u, 128u, 140u, 160u})
    for (std::size_t j : {120u, 128u, 136u, 150u}) {
      auto z = F.point(ix * F.nxi() + j);
      EXPECT_NEAR(std::abs(F.at(ix, j) - oracle::transform(uf, z[0], z[1])), 0, 1e-10);
    }
}

TEST(Transform, PointEvaluatorMatchesGrid) {
  Signal u = packet1(-1.0, 1.0);
  PhaseSpaceField F = transform(u, kPsi, kGrid);
  PointEvaluator ev(u, kPsi, {12.0, 24.0 / 256});
  for (std::size_t i : {1000u, 33000u, 40000u}) {
    auto z = F.point(i);
    EXPECT_NEAR(std::abs(ev(std::span<const double>(&z[0], 1), std::span<const double>(&z[1], 1)) - F.values[i]), 0,
                1e-12);
  }
}

TEST(Transform, LinearAndConjugateLinear) {
  Signal a = packet1(1, 2), b = packet1(-2, -1, 1.3);
  cplx ca(1.5, -0.5), cb(-0.25, 2.0);
  PhaseSpaceField Fa = transform(a, kPsi, kGrid), Fb = transform(b, kPsi, kGrid);
  PhaseSpaceField Fl = transform(linear_combination({{ca, a}, {cb, b}}), kPsi, kGrid);
  double scale = max_abs(Fl.values);
  for (std::size_t i = 0; i < Fl.size(); ++i) EXPECT_NEAR(std::abs(Fl.values[i] - ca * Fa.values[i] - cb * Fb.values[i]), 0, 1e-14 * scale);
  PhaseSpaceField Fs = transform(a, window_scale(kPsi, ca), kGrid);
  for (std::size_t i = 0; i < Fs.size(); ++i) EXPECT_NEAR(std::abs(Fs.values[i] - std::conj(ca) * Fa.values[i]), 0, 1e-14 * scale);
}

TEST(Transform, Isometry) {
  for (Signal u : {psi0(), packet1(1, 2), packet1(-2, 0, 1.5, 0.5), h1()}) {
    PhaseSpaceField F = transform(u, kPsi, kGrid);
    double nu = l2_norm(sample(u, kGrid));
    EXPECT_NEAR(l2_norm(F), nu, 1e-8 * nu);
  }
}

TEST(Transform, ZeroWindowRejected) {
  EXPECT_THROW(transform(psi0(), window_scale(kPsi, 0.0), kGrid), ValidationError);
  EXPECT_THROW(transform(psi0(), standard_gaussian(2), kGrid), DimensionError);
}

TEST(Transform, TensorWithPointMass) {
  GridSpec g2 = GridSpec::cube(2, 8.0, 32);
  PhaseSpaceField F = transform(tensor(constant(1), delta0(1)), standard_gaussian(2), g2);
  double err = 0, mx = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto z = F.point(i);  // x1, x2, xi1, xi2
    cplx ref = std::pow(2 * oracle::pi, -0.5) * std::pow(oracle::pi, -0.5) * std::polar(1.0, z[1] * z[3]) *
               std::exp(-0.5 * (z[1] * z[1] + z[2] * z[2]));
    if (std::abs(z[2]) < 0.6 * F.xi_spec.axis(0).half_width) err = std::max(err, std::abs(F.values[i] - ref));
    mx = std::max(mx, std::abs(ref));
  }
  EXPECT_LE(err, 1e-8 * mx);
}

TEST(Adjoint, ReproducesWindow) {
  PhaseSpaceField F = transform(psi0(), kPsi, kGrid);
  GridFunction back = adjoint(F, kPsi);
  EXPECT_LE(rel_l2(back, sample(psi0(), kGrid)), 1e-8);
  PhaseSpaceField Z(kGrid, kGrid.dual());
  EXPECT_EQ(max_abs(adjoint(Z, kPsi).values), 0.0);
}

TEST(Adjoint, AdjointIdentity) {
  PhaseSpaceField F = transform(h1(), kPsi, kGrid);
  GridFunction f = sample(psi0(), kGrid);
  cplx lhs = quadrature_inner(adjoint(F, kPsi), f);
  cplx rhs = field_inner(F, transform(psi0(), kPsi, kGrid));
  EXPECT_NEAR(std::abs(lhs - rhs), 0, 1e-8 * l2_norm(F) * l2_norm(f));
}

TEST(Invert, RoundTripSameWindow) {
  Signal u = packet1(1, 2, 1, 0);
  GridFunction back = invert(transform(u, kPsi, kGrid), kPsi, kPsi);
  EXPECT_LE(rel_l2(back, sample(u, kGrid)), 1e-7);
}

TEST(Invert, DifferentWindows) {
  Window h = window_moment(kPsi, {2});
  cplx ref = oracle::simpson([](double x) { return x * x * oracle::psi0(x) * oracle::psi0(x); }, -12, 12);
  EXPECT_NEAR(std::abs(grid_window_pairing(h, kPsi, kGrid) - ref), 0, 1e-10);
  Signal u = packet1(-1, 1.5, 1.2, 0.3);
  GridFunction back = invert(transform(u, kPsi, kGrid), kPsi, h);
  EXPECT_LE(rel_l2(back, sample(u, kGrid)), 1e-6);
}

TEST(Invert, OrthogonalWindowsRejected) {
  Window odd = window_scale(window_moment(kPsi, {1}), -std::sqrt(2.0));
  cplx ref = oracle::simpson([](double x) { return std::sqrt(2.0) * x * oracle::psi0(x) * oracle::psi0(x); }, -12, 12);
  EXPECT_NEAR(std::abs(ref), 0, 1e-14);
  PhaseSpaceField F = transform(psi0(), kPsi, kGrid);
  EXPECT_THROW(invert(F, kPsi, odd), ValidationError);
}

TEST(PhaseTwist, Trivial) {
  PhaseSpaceField F = transform(packet1(1, 2), kPsi, kGrid);
  PhaseSpaceField same = phase_twist_Y(F, coordinate_subspace(1, 1));
  EXPECT_EQ(same.values, F.values);
  PhaseSpaceField t = phase_twist_Y(F, coordinate_subspace(1, 0));
  for (std::size_t i = 0; i < F.size(); i += 97) {
    auto z = F.point(i);
    EXPECT_NEAR(std::abs(t.values[i] - std::polar(1.0, -z[0] * z[1]) * F.values[i]), 0, 1e-15);
    EXPECT_NEAR(std::abs(t.values[i]), std::abs(F.values[i]), 1e-15);
  }
  PhaseSpaceField back = phase_twist_Y(t, coordinate_subspace(1, 0), +1);
  for (std::size_t i = 0; i < F.size(); ++i) EXPECT_NEAR(std::abs(back.values[i] - F.values[i]), 0, 1e-15);
}

TEST(PhaseTwist, DiagonalIsDeltaCase) {
  GridSpec g2 = GridSpec::cube(2, 6.0, 16);
  PhaseSpaceField F = transform(tensor(psi0(), packet1(1, 1)), standard_gaussian(2), g2);
  PhaseSpaceField a = phase_twist_diag(F), b = phase_twist_Y(F, diagonal_subspace(1));
  for (std::size_t i = 0; i < F.size(); ++i) {
    EXPECT_NEAR(std::abs(a.values[i] - b.values[i]), 0, 1e-12);
    EXPECT_NEAR(std::abs(a.values[i]), std::abs(F.values[i]), 1e-15);
    auto z = F.point(i);
    if (z[0] == z[1]) {
      EXPECT_EQ(a.values[i], F.values[i]);
    }
  }
  EXPECT_THROW(phase_twist_diag(transform(psi0(), kPsi, kGrid)), DimensionError);
}

TEST(DiffIdentity, ZeroOrderIsExact) { EXPECT_EQ(diff_identity_check(psi0(), kPsi, {0}, {0}), 0.0); }

TEST(DiffIdentity, LowOrders) {
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) {
      double e = diff_identity_check(psi0(), kPsi, {a}, {b});
      EXPECT_LE(e, 1e-3) << "alpha=" << a << " beta=" << b;
      double e2 = diff_identity_check(packet1(1, 2), kPsi, {a}, {b});
      EXPECT_LE(e2, 1e-3) << "packet alpha=" << a << " beta=" << b;
    }
}

TEST(WindowChange, Envelope) {
  Window w2 = window_moment(kPsi, {2});
  auto r1 = window_change_envelope(psi0(), kPsi, kPsi, kPsi, {0}, {0}, kGrid);
  EXPECT_TRUE(r1.pass()) << r1.violations << " worst " << r1.worst_ratio;
  auto r2 = window_change_envelope(delta0(1), kPsi, kPsi, kPsi, {0}, {0}, kGrid);
  EXPECT_TRUE(r2.pass()) << r2.violations << " worst " << r2.worst_ratio;
  auto r3 = window_change_envelope(packet1(0, 3), kPsi, kPsi, kPsi, {1}, {1}, kGrid);
  EXPECT_TRUE(r3.pass()) << r3.violations << " worst " << r3.worst_ratio;
  auto r4 = window_change_envelope(packet1(1, -2), w2, kPsi, w2, {1}, {0}, kGrid);
  EXPECT_TRUE(r4.pass()) << r4.violations << " worst " << r4.worst_ratio;
  EXPECT_THROW(window_change_envelope(psi0(), kPsi, kPsi, window_moment(kPsi, {1}), {0}, {0}, kGrid), ValidationError);
}

TEST(DecayFit, Examples) {
  DecayOptions o;
  o.r_min = 4;
  o.r_max = 9;
  auto g = decay_fit(transform(psi0(), kPsi, kGrid), Region::shell(), o);
  EXPECT_LE(g.exponent, -6.0);
  auto c = decay_fit(transform(constant(1), kPsi, kGrid), Region::cone(Vec::Unit(2, 0)));
  EXPECT_NEAR(c.exponent, 0.0, 0.2);
  auto dlt = decay_fit(transform(delta0(1), kPsi, kGrid), Region::cone(Vec::Unit(2, 1)));
  EXPECT_NEAR(dlt.exponent, 0.0, 0.2);
  EXPECT_GE(dlt.radii.size(), 7u);
  EXPECT_THROW(decay_fit(transform(psi0(), kPsi, kGrid), Region::shell(), [] {
    DecayOptions o;
    o.r_max = 11;
    return o;
  }()), ValidationError);
}

TEST(DecayFit, PolynomialBound) {
  for (Signal u : {psi0(), constant(1), delta0(1), chirp1(1.0), packet1(2, -1)}) {
    auto r = decay_fit(transform(u, kPsi, kGrid), Region::shell());
    EXPECT_FALSE(std::isnan(r.exponent));
    EXPECT_LT(r.exponent, 1.0);
  }
}

TEST(Transform, ThreadCountInvariant) {
  set_threads(1);
  PhaseSpaceField a = transform(packet1(1, 2), kPsi, kGrid);
  set_threads(4);
  PhaseSpaceField b = transform(packet1(1, 2), kPsi, kGrid);
  GridFunction ia = adjoint(a, kPsi);
  set_threads(1);
  GridFunction ib = adjoint(a, kPsi);
  set_threads(0);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(ia.values, ib.values);
}
