#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <phasescope/weyl.hpp>

#include "oracles.hpp"

using namespace phasescope;

namespace {

Signal symbol_fn(std::string name, std::function<cplx(double, double)> f) {
  return analytic(std::move(name), 2, [f](std::span<const double> z) { return f(z[0], z[1]); });
}

double max_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Eigen::MatrixXcd dense(const KernelGrid& K) {
  const auto n = static_cast<Eigen::Index>(K.rows());
  Eigen::MatrixXcd M(n, n);
  const double h = K.block().cell_volume();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = K.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * h;
  return M;
}

const GridSpec kBase = default_grid(1);

}  // namespace

TEST(KernelFromSymbol, IdentityIsDeltaRidge) {
  KernelGrid K = kernel_from_symbol(weyl_symbol("one", constant(2), kBase));
  const double h = kBase.axis(0).step();
  double off = 0;
  for (std::size_t i = 0; i < K.rows(); ++i) {
    cplx row = 0;
    for (std::size_t j = 0; j < K.rows(); ++j) {
      row += K.at(i, j) * h;
      if (i != j) off = std::max(off, std::abs(K.at(i, j)));
    }
    EXPECT_NEAR(std::abs(row - 1.0), 0, 1e-8);
  }
  EXPECT_LE(off, 1e-12);
}

TEST(KernelFromSymbol, GaussianAgainstQuadrature) {
  GridSpec base = kernel_base_grid();
  KernelGrid K = kernel_from_symbol(weyl_symbol("gaussian", gaussian_symbol(), base));
  double sym = 0;
  for (std::size_t i = 0; i < K.rows(); ++i)
    for (std::size_t j = 0; j < K.rows(); ++j) sym = std::max(sym, std::abs(K.at(i, j) - K.at(j, i)));
  EXPECT_LE(sym, 1e-10);
  // the small grid truncates xi at 2 pi; the oracle comparison uses the wide one
  KernelGrid W = kernel_from_symbol(weyl_symbol("gaussian", gaussian_symbol(), kBase));
  for (auto [i, j] : std::vector<std::pair<std::size_t, std::size_t>>{{128, 128}, {124, 131}, {110, 140}, {133, 120}}) {
    double x = kBase.axis(0).node(i), y = kBase.axis(0).node(j), mid = 0.5 * (x + y);
    cplx ref = oracle::simpson([&](double xi) { return std::polar(1.0, (x - y) * xi) * std::exp(-0.5 * (mid * mid + xi * xi)); },
                               -30, 30) / (2 * oracle::pi);
    EXPECT_NEAR(std::abs(W.at(i, j) - ref), 0, 1e-10) << i << "," << j;
  }
}

TEST(KernelFromSymbol, Linearity) {
  GridSpec base = kernel_base_grid();
  SymbolGrid a = weyl_symbol("a", gaussian_symbol(1, 0), base), b = weyl_symbol("b", japanese_power(2, 1.0), base);
  SymbolGrid c = weyl_symbol("c", linear_combination({{1.0, gaussian_symbol(1, 0)}, {cplx(2, -1), japanese_power(2, 1.0)}}), base);
  KernelGrid Ka = kernel_from_symbol(a), Kb = kernel_from_symbol(b), Kc = kernel_from_symbol(c);
  double err = 0, top = 0;
  for (std::size_t i = 0; i < Kc.values.size(); ++i) {
    err = std::max(err, std::abs(Kc.values[i] - Ka.values[i] - cplx(2, -1) * Kb.values[i]));
    top = std::max(top, std::abs(Kc.values[i]));
  }
  EXPECT_LE(err, 1e-13 * top);
}

TEST(KernelFromSymbol, RealSymbolsGiveHermitianKernels) {
  for (const Signal& s : {oscillator_symbol(), japanese_power(2, 1.0), gaussian_symbol(1, 1)}) {
    KernelGrid K = kernel_from_symbol(weyl_symbol("a", s, kernel_base_grid()));
    double err = 0, top = 0;
    for (std::size_t i = 0; i < K.rows(); ++i)
      for (std::size_t j = 0; j < K.rows(); ++j) {
        err = std::max(err, std::abs(K.at(i, j) - std::conj(K.at(j, i))));
        top = std::max(top, std::abs(K.at(i, j)));
      }
    EXPECT_LE(err, 1e-10 * top);
  }
}

TEST(KernelFromSymbol, Errors) {
  SymbolGrid bad = make_symbol("g", gaussian_symbol(), 0.0, 1.0, GridSpec::cube(2, 8.0, 64));
  EXPECT_THROW(kernel_from_symbol(bad), ValidationError);
  EXPECT_THROW(weyl_symbol("g", psi0(), kBase), DimensionError);
  EXPECT_THROW(KernelGrid(GridSpec({Axis{8, 32}, Axis{4, 32}}), std::vector<cplx>(1024)), ValidationError);
}

TEST(ApplyWeyl, SanityOperators) {
  GridFunction f = sample(psi0(), kBase);
  EXPECT_LE(max_diff(apply_weyl(weyl_symbol("one", constant(2), kBase), f), f), 1e-8);
  GridFunction xf(kBase), ixf(kBase);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double x = kBase.point(i)[0];
    xf[i] = x * f[i];
    ixf[i] = cplx(0, x) * f[i];
  }
  EXPECT_LE(max_diff(apply_weyl(weyl_symbol("x", symbol_fn("x", [](double x, double) { return x; }), kBase), f), xf),
            1e-7);
  GridFunction df = apply_weyl(weyl_symbol("xi", symbol_fn("xi", [](double, double xi) { return xi; }), kBase), f);
  EXPECT_LE(max_diff(df, ixf), 1e-6);
  // spectral oracle: -i d/dx via the grid Fourier transform
  GridFunction F = fourier(f);
  for (std::size_t k = 0; k < F.size(); ++k) F[k] *= F.spec.point(k)[0];
  EXPECT_LE(max_diff(df, inverse_fourier(F)), 1e-6);
}

TEST(ApplyWeyl, HarmonicOscillatorGroundState) {
  SymbolGrid a = weyl_symbol("oscillator", oscillator_symbol(), kBase);
  GridFunction f = sample(psi0(), kBase);
  EXPECT_LE(max_diff(apply_weyl(a, f), f), 1e-6);
  Eigen::MatrixXcd M = dense(kernel_from_symbol(a));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()));
  EXPECT_NEAR(es.eigenvalues()(0), 1.0, 1e-5);
  EXPECT_NEAR(es.eigenvalues()(1), 3.0, 1e-5);
  Eigen::VectorXcd v = es.eigenvectors().col(0);
  double overlap = 0;
  const double h = kBase.axis(0).step();
  for (Eigen::Index i = 0; i < v.size(); ++i) overlap += std::abs(v(i)) * std::abs(f[static_cast<std::size_t>(i)]);
  EXPECT_NEAR(overlap * std::sqrt(h), 1.0, 1e-8);
}

TEST(ApplyWeyl, TwoPathConsistency) {
  GridSpec base = kernel_base_grid();
  GridFunction f = sample(packet1(0.5, -1.0, 0.8, 0.3), base);
  for (const Signal& s : {gaussian_symbol(1, 0), japanese_power(2, 1.0), unit_chirp(2)}) {
    SymbolGrid a = weyl_symbol("a", s, base);
    GridFunction p = apply_weyl(a, f), q = apply_kernel(kernel_from_symbol(a), f);
    double top = 0;
    for (auto& v : q.values) top = std::max(top, std::abs(v));
    EXPECT_LE(max_diff(p, q), 1e-10 * top);
  }
  EXPECT_THROW(apply_weyl(weyl_symbol("a", constant(2), base), sample(psi0(), kBase)), DimensionError);
}

TEST(KernelTransformIdentity, GaussianCorpus) {
  const Window g = standard_gaussian(2);
  for (auto& [name, s] : gaussian_symbol_corpus())
    EXPECT_LE(kernel_transform_identity_check(weyl_symbol(name, s, kernel_base_grid()), g), 1e-5) << name;
  EXPECT_EQ(kernel_transform_identity_check(weyl_symbol("zero", zero_signal(2), kernel_base_grid()), g), 0.0);
}

TEST(KernelTransformIdentity, NonGaussianWindow) {
  EXPECT_LE(kernel_transform_identity_check(weyl_symbol("g", gaussian_symbol(1, 0), kernel_base_grid()),
                                            gaussian_window({0.8, 0.8}, 1.0)),
            1e-5);
}

TEST(KernelTransformIdentity, Errors) {
  SymbolGrid a = weyl_symbol("g", gaussian_symbol(), kernel_base_grid());
  EXPECT_THROW(kernel_transform_identity_check(a, standard_gaussian()), DimensionError);
}

TEST(ConjugatedKernel, IdentitySymbol) {
  GridSpec base = kernel_base_grid();
  Window g = standard_gaussian();
  KernelGrid Kc = conjugated_kernel(weyl_symbol("one", constant(2), base), g, g);
  PhaseSpaceField F = transform(sampled(sample(packet1(0.5, 1.0), base)), g, base);
  GridFunction out = apply_kernel(Kc, field_as_function(F));
  double err = 0, top = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    err = std::max(err, std::abs(out[i] - F.values[i]));
    top = std::max(top, std::abs(F.values[i]));
  }
  EXPECT_LE(err, 1e-6 * top);
}

TEST(ConjugatedKernel, MatchesTransformOfOperator) {
  GridSpec base = kernel_base_grid();
  Window g = standard_gaussian(), h = gaussian_window({0.8}, 1.0);
  h = window_scale(h, 1.0 / window_norm(h));  // T_h^* T_h = identity
  GridFunction u = sample(packet1(-0.5, 0.5, 1.1), base);
  for (auto& [name, s] : gaussian_symbol_corpus()) {
    SymbolGrid a = weyl_symbol(name, s, base);
    GridFunction out = apply_kernel(conjugated_kernel(a, g, h), field_as_function(transform(sampled(u), h, base)));
    PhaseSpaceField G = transform(sampled(apply_weyl(a, u)), g, base);
    double err = 0, top = 0;
    for (std::size_t i = 0; i < G.size(); ++i) {
      err = std::max(err, std::abs(out[i] - G.values[i]));
      top = std::max(top, std::abs(G.values[i]));
    }
    EXPECT_LE(err, 1e-5 * top) << name;
  }
  KernelGrid Z = conjugated_kernel(weyl_symbol("zero", zero_signal(2), base), g, g);
  for (auto& v : Z.values) ASSERT_EQ(v, cplx(0));
}

TEST(KernelConormal, Examples) {
  GridSpec base = kernel_base_grid();
  Window g = standard_gaussian(2);
  EXPECT_TRUE(kernel_conormal_check(kernel_from_symbol(weyl_symbol("g", gaussian_symbol(), base)), g, 0, 1, 0, 0, 2).verdict);
  KernelGrid rank1(kernel_spec(base), sample(psi0(2), kernel_spec(base)).values);
  EXPECT_TRUE(kernel_conormal_check(rank1, g, 0, 1, 0, 0, 2).verdict);
  KernelGrid jap = kernel_from_symbol(weyl_symbol("japanese", japanese_power(2, 1.0), base));
  EXPECT_FALSE(kernel_conormal_check(jap, g, -2, 1, 0, 0, 2).verdict);
  EXPECT_TRUE(kernel_conormal_check(jap, g, 1, 1, 1, 0, 2).verdict);
  EXPECT_THROW(kernel_conormal_check(jap, g, 1, 1, 2, 1, 2), ValidationError);
  EXPECT_THROW(kernel_conormal_check(jap, standard_gaussian(), 1, 1, 0, 0, 2), DimensionError);
}

TEST(KernelConormal, SymbolAndKernelVerdictsAgree) {
  GridSpec base = kernel_base_grid();
  Window g = standard_gaussian(2);
  for (auto& c : kernel_symbol_corpus()) {
    SymbolGrid a = weyl_symbol(c.name, c.symbol, base, c.m, c.rho);
    bool sym = transform_side_check(a, g, c.m, c.rho, 1, 2, GridSpec::cube(2, 8.0, 32)).verdict;
    bool ker = kernel_conormal_scan(kernel_from_symbol(a), g, c.m, c.rho, 1, 2).verdict;
    EXPECT_EQ(sym, c.member) << c.name;
    EXPECT_EQ(ker, sym) << c.name;
  }
}
