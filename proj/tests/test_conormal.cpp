#include <gtest/gtest.h>

#include <phasescope/conormal.hpp>
#include <phasescope/weyl.hpp>

#include "oracles.hpp"

using namespace phasescope;

namespace {

const Window kPsi1 = standard_gaussian(1);
const Window kPsi2 = standard_gaussian(2);

Signal line_mass() { return tensor(constant(1), delta0(1)); }

Mat rotation(double t) {
  Mat B(2, 2);
  B << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return B;
}

struct Case {
  std::string name;
  Signal u;
  SubspaceSpec Y;
  double m;
  bool member;
};

std::vector<Case> conormal_corpus() {
  return {
      {"delta", delta0(1), coordinate_subspace(1, 0), 0.0, true},
      {"one", constant(1), coordinate_subspace(1, 1), 0.0, true},
      {"psi0@R", psi0(), coordinate_subspace(1, 1), 0.0, true},
      {"psi0@0", psi0(), coordinate_subspace(1, 0), 0.0, true},
      {"chirp", chirp1(1.0), coordinate_subspace(1, 1), 0.0, false},
      {"delta@R", delta0(1), coordinate_subspace(1, 1), 0.0, false},
      {"line", line_mass(), coordinate_subspace(2, 1), 0.0, true},
      {"line@m=-1", line_mass(), coordinate_subspace(2, 1), -1.0, false},
      {"psi0xpsi0@diag", tensor(psi0(), psi0()), diagonal_subspace(1), 0.0, true},
  };
}

Window window_for(std::size_t d, int which) {
  Window g = standard_gaussian(d);
  if (which == 1) return window_moment(g, d == 1 ? std::vector<int>{1} : std::vector<int>{1, 0});
  if (which == 2) {
    Window b = bump_window(default_window_grid(1));
    return d == 1 ? b : window_tensor(b, b);
  }
  return g;
}

}  // namespace

TEST(Subspace, Examples) {
  SubspaceSpec y = coordinate_subspace(2, 1);
  Mat n(4, 2);
  n << 1, 0, 0, 0, 0, 0, 0, 1;
  EXPECT_LE((y.conormal_basis() - n).cwiseAbs().maxCoeff(), 1e-15);

  SubspaceSpec z = coordinate_subspace(2, 0);
  Mat nz = Mat::Zero(4, 2);
  nz.bottomRows(2) = Mat::Identity(2, 2);
  EXPECT_LE((z.conormal_basis() - nz).cwiseAbs().maxCoeff(), 1e-15);

  // N(Delta) = Delta x Delta^perp
  SubspaceSpec dl = diagonal_subspace(1);
  Mat nd = dl.conormal_basis();
  double s = 1 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(nd(0, 0)), s, 1e-15);
  EXPECT_NEAR(nd(0, 0), nd(1, 0), 1e-15);
  EXPECT_NEAR(nd(2, 1), -nd(3, 1), 1e-15);
  EXPECT_NEAR(dl.dist_conormal(to_vec(std::vector<double>{1, -1}), to_vec(std::vector<double>{0, 0})), std::sqrt(2.0),
              1e-14);
}

TEST(Subspace, Invariants) {
  Mat v(3, 2);
  v << 1, 2, 0, 1, 3, -1;
  for (const SubspaceSpec& y : {make_subspace(v), diagonal_subspace(2), coordinate_subspace(3, 0)}) {
    Mat U = flat_frame(y);
    auto d = static_cast<Eigen::Index>(y.d);
    EXPECT_LE((U.transpose() * U - Mat::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12);
    Mat P = y.proj();
    EXPECT_LE((P * P - P).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((y.conormal_basis().transpose() * y.transversal_basis()).cwiseAbs().maxCoeff(), 1e-12);
    Mat both(2 * d, 2 * d);
    both << y.conormal_basis(), y.transversal_basis();
    EXPECT_EQ(Eigen::FullPivLU<Mat>(both).rank(), 2 * d);
  }
  Mat dep(2, 2);
  dep << 1, 2, 2, 4;
  EXPECT_THROW(make_subspace(dep), ValidationError);
}

TEST(Membership, LineMassAgainstClosedForm) {
  // |T^Y u| = (2 pi)^{-1/2} pi^{-1/2} e^{-(x2^2 + xi1^2)/2} for u = 1 (x) delta_0
  PhaseSpaceField F = phase_twist_Y(transform(line_mass(), kPsi2, conormal_grid(2)), coordinate_subspace(2, 1));
  double err = 0;
  for (auto i : interior_probes(F, 0.6)) {
    auto z = F.point(i);
    double ref = std::exp(-0.5 * (z[1] * z[1] + z[2] * z[2])) / (std::sqrt(2 * oracle::pi) * std::sqrt(oracle::pi));
    err = std::max(err, std::abs(F.values[i] - ref));
  }
  EXPECT_LE(err, 1e-6);
}

TEST(Membership, Corpus) {
  for (auto& c : conormal_corpus()) {
    ConormalReport r = membership_test(c.u, c.Y, c.m, 1.0, standard_gaussian(c.Y.d), 2, 4);
    EXPECT_EQ(r.verdict, c.member) << c.name;
    EXPECT_EQ(r.entries.size(), multi_indices(c.Y.d, 2).size());
  }
}

TEST(Membership, OrderMonotone) {
  for (auto& c : conormal_corpus()) {
    if (!c.member) continue;
    for (double dm : {0.5, 1.0})
      EXPECT_TRUE(membership_test(c.u, c.Y, c.m + dm, 1.0, standard_gaussian(c.Y.d), 2, 4).verdict) << c.name;
  }
  EXPECT_TRUE(membership_test(line_mass(), coordinate_subspace(2, 1), -1.0, 1.0, kPsi2, 0, 0).verdict == false);
}

TEST(Membership, WindowIndependence) {
  for (auto& c : conormal_corpus())
    for (int w : {0, 1, 2})
      EXPECT_EQ(membership_test(c.u, c.Y, c.m, 1.0, window_for(c.Y.d, w), 2, 4).verdict, c.member) << c.name << " " << w;
}

TEST(Membership, TransversalIndependence) {
  for (auto& c : conormal_corpus()) {
    ConormalOptions o;
    o.transversal = random_transversal(c.Y);
    EXPECT_EQ(membership_test(c.u, c.Y, c.m, 1.0, standard_gaussian(c.Y.d), 2, 4, o).verdict, c.member) << c.name;
  }
  SubspaceSpec y = coordinate_subspace(2, 1);
  ConormalOptions bad;
  bad.transversal = y.conormal_basis();
  EXPECT_THROW(membership_test(line_mass(), y, 0.0, 1.0, kPsi2, 1, 2, bad), ValidationError);
}

TEST(Membership, Validation) {
  SubspaceSpec y = coordinate_subspace(1, 1);
  EXPECT_THROW(membership_test(psi0(), y, 0.0, 1.0, kPsi1, 3, 2), ValidationError);
  EXPECT_THROW(membership_test(psi0(), y, 0.0, 1.0, kPsi1, 1, 6), ValidationError);
  EXPECT_THROW(membership_test(psi0(), coordinate_subspace(2, 1), 0.0, 1.0, kPsi1, 1, 2), DimensionError);
  EXPECT_THROW(membership_test(psi0(), y, 0.0, 1.5, kPsi1, 1, 2), ValidationError);
}

TEST(Membership, KernelBridge) {
  // K_a against the diagonal agrees with the diagonal kernel check at the
  // declared order; the membership side runs on a wider grid
  const SubspaceSpec diag = diagonal_subspace(1);
  ConormalOptions o;
  o.grid = GridSpec::cube(2, 12.0, 64);
  for (auto& [name, sym] : gaussian_symbol_corpus()) {
    KernelGrid K = kernel_from_symbol(weyl_symbol(name, sym, kernel_base_grid()));
    bool conormal = membership_test(sampled(K.as_function()), diag, 0.0, 1.0, kPsi2, 1, 2, o).verdict;
    bool kernel = kernel_conormal_scan(K, kPsi2, 0.0, 1.0, 1, 2).verdict;
    EXPECT_TRUE(kernel) << name;
    EXPECT_EQ(conormal, kernel) << name;
  }
}

TEST(Construct, ConstantSymbolGivesPointMass) {
  ConormalSignal c = construct(make_symbol("one", constant(1), 0.0), Mat(1, 0), Mat::Identity(1, 1));
  EXPECT_EQ(c.Y.n, 0u);
  PhaseSpaceField a = transform(c.u, kPsi1), b = transform(scaled(std::sqrt(2 * kPi), delta0(1)), kPsi1);
  double err = 0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a.values[i] - b.values[i]));
  EXPECT_LE(err, 1e-6);
  EXPECT_TRUE(membership_test(c.u, c.Y, 0.0, 1.0, kPsi1, 2, 4).verdict);
}

TEST(Construct, ProfileConstantInTheta) {
  // a(x1, theta) = psi0(x1) gives u = sqrt(2 pi) psi0 (x) delta_0; a lies in
  // Gamma^0 only for rho = 0 since its x1 derivatives do not decay in theta
  SymbolGrid a = make_symbol("profile", tensor(psi0(), constant(1)), 0.0);
  ConormalSignal c = construct(a, Mat::Identity(2, 1), Mat(Mat::Identity(2, 2).rightCols(1)));
  Signal ref = tensor(psi0(), point_mass(Vec::Zero(1), std::sqrt(2 * kPi)));
  PhaseSpaceField A = transform(c.u, kPsi2, conormal_grid(2)), B = transform(ref, kPsi2, conormal_grid(2));
  double err = 0;
  for (std::size_t i = 0; i < A.size(); ++i) err = std::max(err, std::abs(A.values[i] - B.values[i]));
  EXPECT_LE(err, 1e-12);
  EXPECT_TRUE(membership_test(c.u, c.Y, 0.0, 0.0, kPsi2, 2, 4).verdict);
  EXPECT_FALSE(membership_test(c.u, c.Y, 0.0, 1.0, kPsi2, 2, 4).verdict);
  ConormalSignal line = construct(make_symbol("one", constant(2), 0.0), Mat::Identity(2, 1),
                                  Mat(Mat::Identity(2, 2).rightCols(1)));
  EXPECT_TRUE(membership_test(line.u, line.Y, 0.0, 1.0, kPsi2, 2, 4).verdict);
}

TEST(Construct, SchwartzSymbolPassesForRotatedSubspaces) {
  SymbolGrid a = make_symbol("gaussian", tensor(psi0(), psi0()), 0.0);
  for (double t : {0.0, 0.4, 1.1}) {
    Mat U = rotation(t);
    ConormalSignal c = construct(a, U.leftCols(1), U.rightCols(1));
    // Y = Ker M2^t is the line spanned by the first column
    EXPECT_NEAR(std::abs(c.Y.basis.col(0).dot(U.col(0))), 1.0, 1e-12);
    EXPECT_TRUE(membership_test(c.u, c.Y, 0.0, 1.0, kPsi2, 2, 4).verdict) << t;
    EXPECT_TRUE(membership_test(c.u, coordinate_subspace(2, 0), 0.0, 1.0, kPsi2, 1, 2).verdict) << t;
  }
}

TEST(Construct, Errors) {
  SymbolGrid a = make_symbol("gaussian", tensor(psi0(), psi0()), 0.0);
  Mat M1(2, 1), M2(2, 1);
  M1 << 1, 1;
  M2 << 2, 2;
  EXPECT_THROW(construct(a, M1, M2), ValidationError);
  EXPECT_THROW(construct(a, Mat::Identity(2, 2), Mat::Identity(2, 1)), DimensionError);
}

TEST(Transport, FourierPreservesVerdicts) {
  for (auto& c : conormal_corpus()) {
    ConormalSignal f = fourier_map(c.u, c.Y);
    EXPECT_EQ(f.Y.n, c.Y.d - c.Y.n);
    EXPECT_EQ(membership_test(f.u, f.Y, c.m, 1.0, standard_gaussian(c.Y.d), 2, 4).verdict, c.member) << c.name;
  }
}

TEST(Transport, FourierExamples) {
  ConormalSignal f = fourier_map(delta0(1), coordinate_subspace(1, 0));
  EXPECT_EQ(f.Y.n, 1u);
  EXPECT_NEAR(std::abs(eval(f.u, {0.3}) - 1 / std::sqrt(2 * kPi)), 0, 1e-15);
  // F F u = u(-.)
  Signal u = packet1(1.0, 0.5);
  ConormalSignal ff = fourier_map(fourier_map(u, coordinate_subspace(1, 1)).u, coordinate_subspace(1, 0));
  EXPECT_EQ(ff.Y.n, 1u);
  for (double x : {-1.0, 0.2, 1.4}) EXPECT_NEAR(std::abs(eval(ff.u, {x}) - eval(u, {-x})), 0, 1e-12);
  EXPECT_TRUE(membership_test(ff.u, ff.Y, 0.0, 1.0, kPsi1, 2, 4).verdict);
}

TEST(Transport, CoordinateMaps) {
  SubspaceSpec y = coordinate_subspace(2, 1);
  for (double t : {0.3, 0.5, 1.2}) {
    ConormalSignal c = coord_map(line_mass(), rotation(t), y);
    // B^{-1} Y is the line through B^t e1
    EXPECT_NEAR(std::abs(c.Y.basis.col(0).dot(rotation(t).transpose().col(0))), 1.0, 1e-12);
    EXPECT_TRUE(membership_test(c.u, c.Y, 0.0, 1.0, kPsi2, 2, 4).verdict) << t;
    EXPECT_FALSE(membership_test(c.u, c.Y, -1.0, 1.0, kPsi2, 2, 4).verdict) << t;
  }
  ConormalSignal same = coord_map(line_mass(), Mat::Identity(2, 2), y);
  EXPECT_EQ(same.u.node().v.index(), line_mass().node().v.index());
  Mat D(2, 2);
  D << 2, 0, 0, 0.5;
  ConormalSignal s = coord_map(tensor(psi0(), psi0()), D, y);
  EXPECT_TRUE(membership_test(s.u, s.Y, 0.0, 1.0, kPsi2, 2, 4).verdict);
  EXPECT_THROW(coord_map(psi0(), Mat::Zero(1, 1), coordinate_subspace(1, 1)), ValidationError);
}
