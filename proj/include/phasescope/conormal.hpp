#pragma once

// Gamma-conormal distributions with respect to a linear subspace Y: the
// oscillatory-integral construction, the membership test in flat coordinates,
// and transport by the Fourier transform and linear coordinate changes.

#include <random>

#include "metaplectic.hpp"
#include "subspace.hpp"
#include "symclass.hpp"

namespace phasescope {

struct ConormalSignal {
  Signal u;
  SubspaceSpec Y;
};

using ConormalReport = SeminormReport;

struct ConormalOptions {
  std::optional<GridSpec> grid;    // phase-space base grid; conormal_grid(d) when empty
  std::optional<Mat> transversal;  // 2d x d basis of V; N(Y^perp) when empty
  VerdictRule rule{};
};

/// Membership-test grids: L = 12, N = 256 in d = 1 and L = 8, N = 32 in d = 2.
inline GridSpec conormal_grid(std::size_t d) {
  if (d == 1) return GridSpec::cube(1, 12.0, 256);
  if (d == 2) return GridSpec::cube(2, 8.0, 32);
  throw DimensionError("conormal: only d <= 2 is supported");
}

/// U = [basis perp], orthogonal with U^t Y = R^n x {0}.
inline Mat flat_frame(const SubspaceSpec& Y) {
  Mat U(static_cast<Eigen::Index>(Y.d), static_cast<Eigen::Index>(Y.d));
  U << Y.basis, Y.perp;
  return U;
}

/// A transversal to N(Y) drawn from a fixed seed: N(Y^perp) tilted by a
/// random d x d block towards N(Y).
inline Mat random_transversal(const SubspaceSpec& Y, std::uint64_t seed = 20240611) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  const auto d = static_cast<Eigen::Index>(Y.d);
  Mat R(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) R(i, j) = dist(gen);
  return Y.transversal_basis() + Y.conormal_basis() * R;
}

namespace detail {

inline Mat snap(Mat A, double tol = 1e-12) {
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (std::abs(A(i, j)) < tol) A(i, j) = 0.0;
  return A;
}

inline bool is_signed_permutation(const Mat& U) {
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    int hits = 0;
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
      double a = std::abs(U(i, j));
      if (a > 1e-12 && std::abs(a - 1.0) > 1e-12) return false;
      hits += a > 0.5;
    }
    if (hits != 1) return false;
  }
  return true;
}

/// u o U. Pullbacks compose before point masses are pushed through, so a
/// rotated point-mass tensor comes back block diagonal.
inline Signal rotate_signal(const Signal& u, const Mat& U) {
  if (auto* p = std::get_if<sig::Pullback>(&variant_of(u))) return pullback(snap(p->A * U), p->scale, p->inner);
  if (auto* l = std::get_if<sig::LinearCombination>(&variant_of(u))) {
    std::vector<std::pair<cplx, Signal>> terms;
    for (auto& [c, v] : l->terms) terms.emplace_back(c, rotate_signal(v, U));
    return linear_combination(std::move(terms));
  }
  return coord_signal(snap(U), u);
}

/// g o A, kept as a Gaussian when A only permutes equal widths.
inline Window rotated_window(const Window& g, const Mat& A) {
  if (auto* gb = std::get_if<win::Gaussian>(&g.base()); gb && g.ops().empty()) {
    bool iso = std::all_of(gb->sigma.begin(), gb->sigma.end(), [&](double s) { return s == gb->sigma[0]; });
    if (iso && (A.transpose() * A - Mat::Identity(A.rows(), A.cols())).cwiseAbs().maxCoeff() < 1e-12) return g;
  }
  return window_pullback(g, A);
}

/// T_g(U^* u) on grid x grid.dual(). Signed permutations are applied to the
/// field indices of T_{g o U^t} u; other rotations act on the signal.
inline PhaseSpaceField flat_field(const Signal& u, const Mat& U, const Window& g, const GridSpec& grid) {
  const std::size_t d = grid.dim();
  if (U.isIdentity(0.0)) return transform(u, g, grid);
  if (!is_signed_permutation(U)) return transform(rotate_signal(u, U), g, grid);
  for (std::size_t j = 1; j < d; ++j)
    if (!(grid.axis(j) == grid.axis(0))) throw ValidationError("conormal: coordinate permutations need a cube grid");
  PhaseSpaceField F = transform(u, rotated_window(g, U.transpose()), grid);
  PhaseSpaceField out(F.x_spec, F.xi_spec, F.provenance + ";flat");
  const long n = static_cast<long>(grid.axis(0).samples), half = n / 2;
  std::vector<std::size_t> perm(d);
  std::vector<double> sign(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (std::abs(U(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > 0.5) {
        perm[i] = j;
        sign[i] = U(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
  // index of (U v) for a node offset vector v; -1 when it leaves the grid
  auto map = [&](const GridSpec& s, std::size_t flat) -> long {
    std::vector<std::size_t> idx(d), out_idx(d);
    s.unravel(flat, idx);
    for (std::size_t i = 0; i < d; ++i) {
      long o = static_cast<long>(idx[perm[i]]) - half;
      if (sign[i] < 0) o = -o;
      if (o < -half || o >= half) return -1;
      out_idx[i] = static_cast<std::size_t>(o + half);
    }
    return static_cast<long>(s.ravel(out_idx));
  };
  parallel_for(out.nx(), [&](std::size_t ix) {
    long sx = map(out.x_spec, ix);
    for (std::size_t j = 0; j < out.nxi(); ++j) {
      long sj = map(out.xi_spec, j);
      out.at(ix, j) = (sx < 0 || sj < 0) ? cplx{} : F.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(sj));
    }
  });
  return out;
}

}  // namespace detail

/// Derivatives of T^Y_g u along the N(Y) basis in flat coordinates,
/// <dist(., V)>^{rho k - m} <dist(., N(Y))>^N, shells in |Pi_{N(Y)} (x, xi)|.
inline ConormalReport membership_test(const Signal& u, const SubspaceSpec& Y, double m, double rho, const Window& g,
                                      int k_max, int N, const ConormalOptions& opt = {}) {
  check_rho(rho);
  if (k_max < 0 || k_max > 2) throw ValidationError("membership_test: k_max must be in [0, 2]");
  if (N < 0 || N > 5) throw ValidationError("membership_test: N must be in [0, 5]");
  const std::size_t d = Y.d, n = Y.n;
  if (dim(u) != d || g.dim() != d) throw DimensionError("membership_test: signal, window and subspace dimensions differ");
  const GridSpec grid = opt.grid ? *opt.grid : conormal_grid(d);
  const Mat U = flat_frame(Y);
  const auto dd = static_cast<Eigen::Index>(d);

  // V in flat coordinates, orthonormalized
  Mat V = opt.transversal ? *opt.transversal : Y.transversal_basis();
  if (V.rows() != 2 * dd || V.cols() != dd) throw DimensionError("membership_test: transversal must be 2d x d");
  Mat both(2 * dd, 2 * dd);
  both << Y.conormal_basis(), V;
  if (Eigen::FullPivLU<Mat>(both).setThreshold(1e-10).rank() != 2 * dd)
    throw ValidationError("membership_test: V is not transversal to N(Y)");
  Mat R = Mat::Zero(2 * dd, 2 * dd);
  R.topLeftCorner(dd, dd) = U.transpose();
  R.bottomRightCorner(dd, dd) = U.transpose();
  Eigen::HouseholderQR<Mat> qr(R * V);
  const Mat Q = qr.householderQ() * Mat::Identity(2 * dd, dd);

  const PhaseSpaceField F = phase_twist_Y(detail::flat_field(u, U, g, grid), coordinate_subspace(d, n));
  const GridSpec ps = F.phase_spec();
  auto probes = interior_probes(F, kFieldProbeFrac);
  double fmax = 0;
  for (auto i : probes) fmax = std::max(fmax, std::abs(F.values[i]));
  const double r_max = kFieldProbeFrac * std::min(detail::min_half_width(F.x_spec), detail::min_half_width(F.xi_spec));

  ConormalReport rep{"conormal", "signal", m, rho, k_max, N, {}, 0, 0, 0, 0, true};
  for (auto& gamma : multi_indices(d, k_max)) {
    // gamma over (x_1, xi_2): x axes [0, n), xi axes [d + n, 2d)
    std::vector<int> order(2 * d, 0);
    for (std::size_t j = 0; j < n; ++j) order[j] = gamma[j];
    for (std::size_t j = n; j < d; ++j) order[d + j] = gamma[j];
    auto D = fd_multi(F.values, ps, order);
    const double e = m - rho * order_of(gamma);
    std::vector<GrowthSample> smp(probes.size());
    for (std::size_t k = 0; k < probes.size(); ++k) {
      auto z = F.point(probes[k]);
      Vec zv = to_vec(z);
      double on = 0, off = 0;
      for (std::size_t j = 0; j < d; ++j) {
        double a = j < n ? z[j] : z[d + j], b = j < n ? z[d + j] : z[j];
        on += a * a;
        off += b * b;
      }
      double dv = (zv - Q * (Q.transpose() * zv)).norm();
      double mag = std::abs(D[probes[k]]);
      smp[k] = {std::sqrt(on), mag * std::pow(japanese(dv), -e) * std::pow(japanese(std::sqrt(off)), N), mag};
    }
    rep.entries.push_back(judge(gamma, growth_fit(smp, opt.rule.r_min, r_max, opt.rule.shells, opt.rule.floor_rel * fmax), opt.rule));
  }
  finish(rep, opt.rule);
  return rep;
}

// ---------------------------------------------------------------------------
// Construction

namespace detail {

/// F_2^{-1} a over the last d - n variables, in closed form when a is
/// constant in theta.
inline Signal inverse_fourier_last(const SymbolGrid& a, std::size_t n) {
  const std::size_t d = a.dim(), k = d - n;
  if (k == 0) return a.source ? *a.source : sampled(GridFunction(a.spec, a.values));
  const double c = std::pow(2.0 * kPi, 0.5 * static_cast<double>(k));
  const Vec origin = Vec::Zero(static_cast<Eigen::Index>(k));
  if (a.source) {
    const auto& v = variant_of(*a.source);
    if (auto* cs = std::get_if<sig::Constant>(&v)) {
      Signal pm = point_mass(origin, cs->value * c);
      return n == 0 ? pm : tensor(constant(n), pm);
    }
    if (auto* t = std::get_if<sig::TensorProduct>(&v); t && n > 0 && dim(t->first) == n)
      if (auto* cs = std::get_if<sig::Constant>(&variant_of(t->second)))
        return tensor(t->first, point_mass(origin, cs->value * c));
  }
  std::vector<std::size_t> axes;
  for (std::size_t j = n; j < d; ++j) axes.push_back(j);
  return sampled(partial_fourier(GridFunction(a.spec, a.values), axes, true));
}

}  // namespace detail

/// u(x) = (2 pi)^{-(d-n)/2} \int e^{i<M_2^t x, theta>} a(M_1^t x, theta) dtheta,
/// conormal to Y = Ker M_2^t.
inline ConormalSignal construct(const SymbolGrid& a, const Mat& M1, const Mat& M2) {
  const auto d = static_cast<Eigen::Index>(a.dim());
  if (M1.rows() != d || M2.rows() != d || M1.cols() + M2.cols() != d)
    throw DimensionError("construct: M1 and M2 must be d x n and d x (d - n)");
  Mat U(d, d);
  U << M1, M2;
  check_invertible(U, "construct: [M1 M2]");
  const auto n = static_cast<std::size_t>(M1.cols());
  Signal w = detail::inverse_fourier_last(a, n);
  Signal u = U.isIdentity(0.0) ? w : pullback(Mat(U.transpose()), 1.0, w);
  // Y = Ker M_2^t is spanned by the columns of U^{-t} that pair to zero with M_2
  Mat Uit = U.transpose().inverse();
  return {u, make_subspace(Uit.leftCols(static_cast<Eigen::Index>(n)))};
}

// ---------------------------------------------------------------------------
// Transport

/// (F u, Y^perp)
inline ConormalSignal fourier_map(const Signal& u, const SubspaceSpec& Y) {
  if (dim(u) != Y.d) throw DimensionError("fourier_map: signal and subspace dimensions differ");
  return {detail::fourier_signal(u), Y.orthogonal_complement()};
}

/// (u o B, B^{-1} Y)
inline ConormalSignal coord_map(const Signal& u, const Mat& B, const SubspaceSpec& Y) {
  if (dim(u) != Y.d || static_cast<std::size_t>(B.rows()) != Y.d) throw DimensionError("coord_map: dimension mismatch");
  check_invertible(B, "coord_map");
  if (B.isIdentity(0.0)) return {u, Y};
  Mat Binv = B.inverse();
  SubspaceSpec Z = Y.n == 0 ? Y : make_subspace(Mat(Binv * Y.basis));
  return {pullback(B, 1.0, u), Z};
}

}  // namespace phasescope
