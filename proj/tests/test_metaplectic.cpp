#include <gtest/gtest.h>

#include <random>

#include <phasescope/metaplectic.hpp>

#include "oracles.hpp"

using namespace phasescope;

namespace {

Mat m1(double a) { return Mat::Constant(1, 1, a); }
Vec v1(double a) { return Vec::Constant(1, a); }

/// (2 pi)^{-1/2} int e^{-i y xi} u(y) dy by Simpson.
cplx fourier_oracle(const std::function<cplx(double)>& u, double xi) {
  return oracle::simpson([&](double y) { return u(y) * std::polar(1.0, -y * xi); }, -20, 20, 8000) /
         std::sqrt(2 * oracle::pi);
}

double max_eval_diff(const Signal& a, const Signal& b, std::initializer_list<double> xs) {
  double m = 0;
  for (double x : xs) m = std::max(m, std::abs(eval(a, {x}) - eval(b, {x})));
  return m;
}

}  // namespace

TEST(ApplyPoint, TableRows) {
  auto z = apply_point(fourier_rot(), {1.0, 0.0});
  EXPECT_DOUBLE_EQ(z[0], 0.0);
  EXPECT_DOUBLE_EQ(z[1], -1.0);
  z = apply_point(shear(m1(1.0)), {1.0, 0.0});
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_DOUBLE_EQ(z[1], 1.0);
  z = apply_point(shift(v1(2.0), v1(-3.0)), {0.0, 0.0});
  EXPECT_DOUBLE_EQ(z[0], 2.0);
  EXPECT_DOUBLE_EQ(z[1], -3.0);
  z = apply_point(coord_change(m1(2.0)), {1.0, 1.0});
  EXPECT_DOUBLE_EQ(z[0], 0.5);
  EXPECT_DOUBLE_EQ(z[1], 2.0);
  EXPECT_THROW(apply_point(fourier_rot(2), {1.0, 0.0}), DimensionError);
}

TEST(ApplyPoint, PreservesSymplecticForm) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Mat A(2, 2), B(2, 2);
  A << 1.0, 0.5, -0.3, 2.0;
  B << 0.4, -1.0, -1.0, 0.2;
  std::vector<MetaplecticElement> ops{coord_change(A), fourier_rot(2), shear(B),
                                      compose({shear(B), coord_change(A), fourier_rot(2)})};
  for (auto& op : ops)
    for (int trial = 0; trial < 20; ++trial) {
      PhasePoint a(4), b(4);
      for (auto& v : a) v = nd(rng);
      for (auto& v : b) v = nd(rng);
      EXPECT_NEAR(symplectic_form(apply_point(op, a), apply_point(op, b)), symplectic_form(a, b), 1e-12);
    }
}

TEST(ApplySignal, ShiftOfStandardPacket) {
  Signal u = apply_signal(shift(v1(1.5), v1(-2.0)), psi0());
  auto* p = std::get_if<sig::GaussianPacket>(&variant_of(u));
  ASSERT_NE(p, nullptr);
  EXPECT_DOUBLE_EQ(p->x0[0], 1.5);
  EXPECT_DOUBLE_EQ(p->xi0[0], -2.0);
  EXPECT_NEAR(std::abs(p->amplitude), 1.0, 1e-15);
}

TEST(ApplySignal, ClosedFormsMatchWrappers) {
  Signal p = packet1(0.7, 1.2, 0.8, 0.6);
  Signal c = chirp(m1(0.5), cplx(1, 1), v1(0.3));
  for (const Signal& u : {p, c}) {
    EXPECT_LE(max_eval_diff(apply_signal(shift(v1(-1.1), v1(0.9)), u), shift_mod(v1(-1.1), v1(0.9), u), {-2, 0.1, 1.7}),
              1e-14);
    EXPECT_LE(max_eval_diff(apply_signal(shear(m1(-0.4)), u), chirp_mul(m1(-0.4), u), {-2, 0.1, 1.7}), 1e-14);
    EXPECT_LE(max_eval_diff(apply_signal(coord_change(m1(-1.7)), u), pullback(m1(-1.7), std::sqrt(1.7), u),
                            {-2, 0.1, 1.7}),
              1e-14);
  }
  Signal k = apply_signal(shear(m1(2.0)), constant(1));
  EXPECT_NE(std::get_if<sig::Chirp>(&variant_of(k)), nullptr);
  EXPECT_LE(max_eval_diff(k, chirp1(2.0), {-1, 0.5, 3}), 0.0);
}

TEST(ApplySignal, FourierOfPsi0IsPsi0) {
  Signal f = apply_signal(fourier_rot(), psi0());
  for (double xi : {-2.0, 0.0, 0.6, 1.9}) {
    cplx ref = fourier_oracle([](double y) { return cplx(oracle::psi0(y)); }, xi);
    EXPECT_NEAR(std::abs(ref - oracle::psi0(xi)), 0, 1e-12);
    EXPECT_NEAR(std::abs(eval(f, {xi}) - ref), 0, 1e-12);
  }
}

TEST(ApplySignal, FourierClosedFormsAgainstQuadrature) {
  for (const Signal& u : {packet1(1.0, -2.0, 0.7, 0.0), packet1(-0.5, 1.0, 1.2, 0.8), packet1(0.3, 0.2, 0.9, -1.5)}) {
    Signal f = apply_signal(fourier_rot(), u);
    for (double xi : {-2.5, -0.4, 0.0, 1.3}) {
      cplx ref = fourier_oracle([&](double y) { return eval(u, {y}); }, xi);
      EXPECT_NEAR(std::abs(eval(f, {xi}) - ref), 0, 1e-11);
    }
  }
  Signal s = shift_mod(v1(0.4), v1(-1.0), sampled(sample(psi0(), balanced_grid(1, 256))));
  Signal fs = apply_signal(fourier_rot(), s);
  for (double xi : {-1.0, 0.0, 0.8}) {
    cplx ref = fourier_oracle([&](double y) { return std::polar(1.0, -(y - 0.4)) * oracle::psi0(y - 0.4); }, xi);
    EXPECT_NEAR(std::abs(eval(fs, {xi}) - ref), 0, 1e-10);
  }
}

TEST(ApplySignal, FourierOfPointMassAndConstant) {
  Signal f = apply_signal(fourier_rot(), point_mass(v1(2.0), 3.0));
  for (double xi : {-1.0, 0.5})
    EXPECT_NEAR(std::abs(eval(f, {xi}) - 3.0 / std::sqrt(2 * oracle::pi) * std::polar(1.0, -2.0 * xi)), 0, 1e-15);
  Signal c = apply_signal(fourier_rot(), constant(1));
  auto* pm = std::get_if<sig::PointMass>(&variant_of(c));
  ASSERT_NE(pm, nullptr);
  EXPECT_NEAR(std::abs(pm->weight - std::sqrt(2 * oracle::pi)), 0, 1e-14);
}

TEST(ApplySignal, Unitary) {
  GridSpec s = GridSpec::cube(1, 16.0, 512);
  Signal u = packet1(1.0, 1.5, 0.9, 0.3);
  double n0 = l2_norm(sample(u, s));
  std::vector<MetaplecticElement> ops{shift(v1(2), v1(-1)), shear(m1(0.7)), coord_change(m1(1.6)), fourier_rot(),
                                      compose({shear(m1(0.5)), fourier_rot(), shift(v1(-1), v1(0.5))})};
  for (auto& op : ops) EXPECT_NEAR(l2_norm(sample(apply_signal(op, u), s)), n0, 1e-8 * n0);
}

TEST(ApplySignal, Errors) {
  EXPECT_THROW(coord_change(m1(0.0)), ValidationError);
  Mat asym(2, 2);
  asym << 0, 1, 2, 0;
  EXPECT_THROW(shear(asym), ValidationError);
  EXPECT_THROW(apply_signal(fourier_rot(2), psi0()), DimensionError);
  std::vector<MetaplecticElement> many(17, fourier_rot());
  EXPECT_THROW(compose(many), ValidationError);
}

TEST(Covariance, GeneratorRows) {
  Window g = standard_gaussian();
  EXPECT_LE(covariance_check(shift(v1(1.0), v1(-0.5)), psi0(), g), 1e-8);
  EXPECT_LE(covariance_check(fourier_rot(), packet1(2, 0), g), 1e-6);
  EXPECT_LE(covariance_check(shear(m1(1.0)), psi0(), g), 1e-6);
  EXPECT_LE(covariance_check(coord_change(m1(1.5)), packet1(-1, 1, 0.8), g), 1e-6);
  EXPECT_LE(covariance_check(coord_change(m1(-0.7)), psi0(), g), 1e-6);
}

TEST(Covariance, PointMassAndConstant) {
  Window g = standard_gaussian();
  EXPECT_LE(covariance_check(shift(v1(1.0), v1(2.0)), delta0(1), g), 1e-8);
  EXPECT_LE(covariance_check(fourier_rot(), delta0(1), g), 1e-8);
  EXPECT_LE(covariance_check(shear(m1(0.5)), constant(1), g), 1e-6);
}

TEST(Covariance, Compositions) {
  Window g = standard_gaussian();
  EXPECT_LE(covariance_check(compose({shear(m1(0.5)), fourier_rot()}), psi0(), g), 1e-5);
  EXPECT_LE(covariance_check(compose({shift(v1(1), v1(1)), coord_change(m1(1.3))}), packet1(0, 1), g), 1e-5);
  EXPECT_LE(covariance_check(compose({fourier_rot(), shear(m1(-0.8))}), packet1(0.5, -0.5, 1.2), g), 1e-5);
}

TEST(Covariance, TwoDimensional) {
  Mat A(2, 2);
  A << 1.0, 0.4, 0.0, 1.2;
  EXPECT_LE(covariance_check(coord_change(A), psi0(2), standard_gaussian(2)), 1e-6);
  Mat B(2, 2);
  B << 0.3, 0.2, 0.2, -0.4;
  EXPECT_LE(covariance_check(shear(B), psi0(2), standard_gaussian(2)), 1e-6);
}

TEST(PartialFourier, Cases) {
  EXPECT_LE(partial_fourier_covariance_check(psi0(2), 2, {}, GridSpec::cube(2, 8.0, 32)), 1e-12);
  const GridSpec small = GridSpec::cube(2, 8.0, 32);
  EXPECT_LE(partial_fourier_covariance_check(tensor(psi0(), psi0()), 0, {}, small), 1e-6);
  EXPECT_LE(partial_fourier_covariance_check(tensor(psi0(), packet1(0, 3)), 1), 1e-6);
  EXPECT_LE(partial_fourier_covariance_check(packet1(1, -1), 0), 1e-6);
  EXPECT_THROW(partial_fourier_covariance_check(psi0(2), 3), ValidationError);
}
