#pragma once

// Weyl quantization: kernels from symbols, operator application, the
// transform of a kernel in terms of the transform of its symbol, the kernel
// of T_g A T_h^*, and the diagonal-conormal kernel characterization.

#include <string>
#include <vector>

#include "symclass.hpp"

namespace phasescope {

/// K(x, y) on a 2d-dimensional grid whose x block and y block are identical.
struct KernelGrid {
  GridSpec spec;
  std::vector<cplx> values;
  std::string provenance;

  KernelGrid() = default;
  KernelGrid(GridSpec s, std::vector<cplx> v, std::string prov = {})
      : spec(std::move(s)), values(std::move(v)), provenance(std::move(prov)) {
    validate();
  }

  std::size_t block_dim() const { return spec.dim() / 2; }
  GridSpec block() const {
    return GridSpec(std::vector<Axis>(spec.axes().begin(), spec.axes().begin() + static_cast<long>(block_dim())));
  }
  std::size_t rows() const { return block().size(); }
  cplx& at(std::size_t i, std::size_t j) { return values[i * rows() + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return values[i * rows() + j]; }
  GridFunction as_function() const { return GridFunction(spec, values); }

  void validate() const {
    if (spec.dim() == 0 || spec.dim() % 2 != 0) throw DimensionError("kernel grid: dimension must be even");
    const std::size_t d = block_dim();
    for (std::size_t j = 0; j < d; ++j)
      if (!(spec.axis(j) == spec.axis(j + d))) throw ValidationError("kernel grid: block specs must be identical");
    if (values.size() != spec.size()) throw ValidationError("kernel grid: value count does not match the grid");
    for (auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("kernel grid: non-finite value");
  }
};

/// Kernel grid over base x base.
inline GridSpec kernel_spec(const GridSpec& base) {
  std::vector<Axis> a = base.axes();
  for (auto& ax : base.axes()) a.push_back(ax);
  return GridSpec(std::move(a));
}

// ---------------------------------------------------------------------------
// Symbol grids compatible with the midpoint map

/// Midpoint-compatible symbol grid for signals on base: x axes (L, 2N) carry
/// the half-step midpoints, xi axes are dual to the offset axes (2L, 2N).
inline GridSpec weyl_symbol_grid(const GridSpec& base) {
  std::vector<Axis> a;
  for (auto& ax : base.axes()) a.push_back({ax.half_width, 2 * ax.samples});
  for (auto& ax : base.axes()) a.push_back(Axis{2.0 * ax.half_width, 2 * ax.samples}.dual());
  return GridSpec(std::move(a));
}

/// Signal grid recovered from a midpoint-compatible symbol grid.
inline GridSpec weyl_base_grid(const GridSpec& symbol_spec) {
  const std::size_t n = symbol_spec.dim();
  if (n == 0 || n % 2 != 0) throw DimensionError("weyl: symbol grid dimension must be even");
  std::vector<Axis> b;
  for (std::size_t j = 0; j < n / 2; ++j) {
    const Axis& ax = symbol_spec.axis(j);
    if (ax.samples % 2 != 0 || ax.samples < 32) throw ValidationError("weyl: symbol grid is not midpoint-compatible");
    b.push_back({ax.half_width, ax.samples / 2});
  }
  GridSpec base(std::move(b));
  if (!(weyl_symbol_grid(base) == symbol_spec)) throw ValidationError("weyl: symbol grid is not midpoint-compatible");
  return base;
}

/// Samples a symbol on the midpoint-compatible grid of base.
inline SymbolGrid weyl_symbol(std::string name, const Signal& a, const GridSpec& base, double m = 0.0,
                              double rho = 1.0) {
  if (dim(a) != 2 * base.dim()) throw DimensionError("weyl_symbol: symbol must live on R^{2d}");
  return make_symbol(std::move(name), a, m, rho, weyl_symbol_grid(base));
}

namespace detail {

/// (2 pi)^{-d/2} F_2^{-1} a on (midpoint, offset) axes; offset index n + N
/// carries x - y = n h, midpoint index s carries (x + y)/2 = (h/2)(s - N).
inline GridFunction midpoint_offset_table(const SymbolGrid& a) {
  GridSpec base = weyl_base_grid(a.spec);
  const std::size_t d = base.dim();
  std::vector<std::size_t> xi_axes(d);
  for (std::size_t j = 0; j < d; ++j) xi_axes[j] = d + j;
  GridFunction t = partial_fourier(GridFunction(a.spec, a.values), xi_axes, true);
  const double c = detail::inv_sqrt_2pi_pow(d);
  for (auto& v : t.values) v *= c;
  return t;
}

/// Flat index into the midpoint/offset table for base nodes k (x) and l (y).
inline std::size_t table_index(const GridSpec& table, std::span<const std::size_t> k, std::span<const std::size_t> l,
                               std::span<std::size_t> scratch) {
  const std::size_t d = k.size();
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t n = table.axis(j).samples / 2;
    scratch[j] = k[j] + l[j];
    scratch[d + j] = k[j] + n - l[j];
  }
  return table.ravel(scratch);
}

}  // namespace detail

/// K_a(x, y) = int e^{i<x - y, xi>} a((x + y)/2, xi) dxi / (2 pi)^d on base x base.
inline KernelGrid kernel_from_symbol(const SymbolGrid& a) {
  GridSpec base = weyl_base_grid(a.spec);
  GridFunction t = detail::midpoint_offset_table(a);
  const std::size_t d = base.dim(), n = base.size();
  std::vector<cplx> K(n * n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> k(d), l(d), s(2 * d);
    base.unravel(i, k);
    for (std::size_t j = 0; j < n; ++j) {
      base.unravel(j, l);
      K[i * n + j] = t[detail::table_index(t.spec, k, l, s)];
    }
  });
  return KernelGrid(kernel_spec(base), std::move(K), "weyl(" + a.name + ")");
}

/// (K f)(x) = sum_y K(x, y) f(y) h^d
inline GridFunction apply_kernel(const KernelGrid& K, const GridFunction& f) {
  GridSpec b = K.block();
  if (!(f.spec == b)) throw DimensionError("apply_kernel: function grid does not match the kernel block");
  const std::size_t n = b.size();
  const double hv = b.cell_volume();
  GridFunction out(b);
  parallel_for(n, [&](std::size_t i) {
    ComplexCompensatedSum s;
    for (std::size_t j = 0; j < n; ++j) s.add(K.values[i * n + j] * f[j]);
    out[i] = s.value() * hv;
  });
  return out;
}

/// a^w(x, D) f, reading kernel rows from the midpoint/offset table without
/// forming the kernel.
inline GridFunction apply_weyl(const SymbolGrid& a, const GridFunction& f) {
  GridSpec base = weyl_base_grid(a.spec);
  if (!(f.spec == base)) throw DimensionError("apply_weyl: function grid does not match the symbol grid");
  GridFunction t = detail::midpoint_offset_table(a);
  const std::size_t d = base.dim(), n = base.size();
  const double hv = base.cell_volume();
  GridFunction out(base);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> k(d), l(d), s(2 * d);
    base.unravel(i, k);
    ComplexCompensatedSum acc;
    for (std::size_t j = 0; j < n; ++j) {
      base.unravel(j, l);
      acc.add(t[detail::table_index(t.spec, k, l, s)] * f[j]);
    }
    out[i] = acc.value() * hv;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Transform of a kernel

struct KernelIdentityOptions {
  double interior = 0.6;
  std::size_t probes_per_axis = 5;
  QuadratureOptions quadrature{9.0, 0.1};
  double lhs_floor = 1e-8;
};

/// Max relative error of
/// T_g K_a(z, zeta) = (2 pi)^{-d/2} T_h a((z1 + z2)/2, (zeta1 - zeta2)/2, zeta1 + zeta2, z2 - z1)
///                    e^{(i/2)<zeta1 - zeta2, z1 - z2>},  h = F_2(g o kappa).
/// The left side is the grid transform of the kernel; the right side is
/// evaluated pointwise at the remapped points.
inline double kernel_transform_identity_check(const SymbolGrid& a, const Window& g, KernelIdentityOptions opt = {}) {
  GridSpec base = weyl_base_grid(a.spec);
  const std::size_t d = base.dim();
  if (d != 1) throw DimensionError("kernel_transform_identity_check: only d = 1 is supported");
  if (g.dim() != 2 * d) throw DimensionError("kernel_transform_identity_check: window must live on R^{2d}");
  if (base.axis(0).samples > 64) throw ValidationError("kernel_transform_identity_check: at most 64 nodes per axis");
  KernelGrid K = kernel_from_symbol(a);
  PhaseSpaceField lhs = transform(sampled(K.as_function()), g, K.spec, "kernel");
  auto probes = detail::probe_lattice(lhs, opt.interior, opt.probes_per_axis);
  Signal sym = a.source ? *a.source : sampled(GridFunction(a.spec, a.values));
  PointEvaluator ev(sym, window_kappa(g), opt.quadrature);
  const double c = detail::inv_sqrt_2pi_pow(d);
  std::vector<cplx> l(probes.size()), r(probes.size());
  parallel_for(probes.size(), [&](std::size_t k) {
    auto p = lhs.point(probes[k]);  // z1, z2, zeta1, zeta2
    const double z1 = p[0], z2 = p[1], s1 = p[2], s2 = p[3];
    std::array<double, 2> x{0.5 * (z1 + z2), 0.5 * (s1 - s2)}, xi{s1 + s2, z2 - z1};
    l[k] = lhs.values[probes[k]];
    r[k] = c * ev(x, xi) * std::polar(1.0, 0.5 * (s1 - s2) * (z1 - z2));
  });
  double top = 0;
  for (auto& v : l) top = std::max(top, std::abs(v));
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < l.size(); ++k)
    if (std::abs(l[k]) > opt.lhs_floor * top) keep.push_back(k);
  if (keep.empty()) {
    double m = 0;
    for (auto& v : r) m = std::max(m, std::abs(v));
    return m;
  }
  return max_relative_error(l, r, keep);
}

/// Kernel of T_g a^w T_h^* on (z1, zeta1) x (z2, zeta2):
/// K(z1, zeta1, z2, -zeta2) = T_{g (x) conj h} K_a(z1, z2, zeta1, zeta2).
inline KernelGrid conjugated_kernel(const SymbolGrid& a, const Window& g, const Window& h) {
  KernelGrid K = kernel_from_symbol(a);
  const std::size_t d = K.block_dim();
  if (g.dim() != d || h.dim() != d) throw DimensionError("conjugated_kernel: window dimension mismatch");
  PhaseSpaceField T = transform(sampled(K.as_function()), window_tensor(g, window_conj(h)), K.spec, "kernel");
  GridSpec base = K.block();
  const GridSpec dual = base.dual();
  std::vector<Axis> ph = base.axes();
  for (auto& ax : dual.axes()) ph.push_back(ax);
  GridSpec block(ph);
  const std::size_t nb = block.size();
  std::vector<cplx> out(nb * nb);
  const GridSpec ts = T.phase_spec();
  parallel_for(nb, [&](std::size_t i) {
    std::vector<std::size_t> w1(2 * d), w2(2 * d), t(4 * d);
    block.unravel(i, w1);
    for (std::size_t j = 0; j < nb; ++j) {
      block.unravel(j, w2);
      for (std::size_t q = 0; q < d; ++q) {
        const std::size_t n = base.axis(q).samples;
        t[q] = w1[q];
        t[d + q] = w2[q];
        t[2 * d + q] = w1[d + q];
        t[3 * d + q] = (n - w2[d + q]) % n;  // -zeta2 on the periodic frequency grid
      }
      out[i * nb + j] = T.values[ts.ravel(t)];
    }
  });
  return KernelGrid(kernel_spec(block), std::move(out), "conjugated(" + a.name + ")");
}

inline GridFunction field_as_function(const PhaseSpaceField& F) { return GridFunction(F.phase_spec(), F.values); }

// ---------------------------------------------------------------------------
// Diagonal-conormal kernel characterization

namespace detail {

/// Centered difference along an index direction; nodes without both
/// neighbours are set to zero.
inline std::vector<cplx> fd_direction(const std::vector<cplx>& v, const GridSpec& s, std::span<const int> dir,
                                      double step) {
  std::vector<cplx> out(v.size());
  const std::size_t n = s.dim();
  parallel_for(v.size(), [&](std::size_t i) {
    std::vector<std::size_t> idx(n), p(n), q(n);
    s.unravel(i, idx);
    for (std::size_t j = 0; j < n; ++j) {
      long a = static_cast<long>(idx[j]) + dir[j], b = static_cast<long>(idx[j]) - dir[j];
      if (a < 0 || b < 0 || a >= static_cast<long>(s.axis(j).samples) || b >= static_cast<long>(s.axis(j).samples)) {
        out[i] = 0;
        return;
      }
      p[j] = static_cast<std::size_t>(a);
      q[j] = static_cast<std::size_t>(b);
    }
    out[i] = (v[s.ravel(p)] - v[s.ravel(q)]) / (2.0 * step);
  });
  return out;
}

}  // namespace detail

namespace detail {

inline void check_kernel_args(const KernelGrid& K, const Window& g, double rho, int N) {
  check_rho(rho);
  if (K.block_dim() != 1) throw DimensionError("kernel_conormal_check: only d = 1 is supported");
  if (N < 0 || N > 6) throw ValidationError("kernel_conormal_check: N must be in [0, 6]");
  if (g.dim() != 2) throw DimensionError("kernel_conormal_check: window must live on R^2");
}

/// T^Delta_g K
inline PhaseSpaceField diag_field(const KernelGrid& K, const Window& g) {
  return phase_twist_diag(transform(sampled(K.as_function()), g, K.spec, "kernel"));
}

inline SeminormEntry kernel_entry(const PhaseSpaceField& F, double m, double rho, int alpha, int beta, int N,
                                  const VerdictRule& rule) {
  if (alpha < 0 || beta < 0 || alpha + beta > 2)
    throw ValidationError("kernel_conormal_check: derivative depth |alpha + beta| must be at most 2");
  const GridSpec ps = F.phase_spec();
  const double hz = F.x_spec.axis(0).step(), hs = F.xi_spec.axis(0).step();
  const std::array<int, 4> dz{1, 1, 0, 0}, ds{0, 0, 1, -1};
  std::vector<cplx> D = F.values;
  for (int a = 0; a < alpha; ++a) D = fd_direction(D, ps, dz, hz);
  for (int b = 0; b < beta; ++b) D = fd_direction(D, ps, ds, hs);
  const double e = m - rho * (alpha + beta);
  auto probes = interior_probes(F, kFieldProbeFrac);
  std::vector<GrowthSample> smp(probes.size());
  double fmax = 0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    auto p = F.point(probes[k]);
    std::array<double, 2> u{p[0] + p[1], p[2] - p[3]}, v{p[0] - p[1], p[2] + p[3]};
    double mag = std::abs(D[probes[k]]);
    smp[k] = {norm_of(u), mag * std::pow(japanese(u), -e) * std::pow(japanese(v), N), mag};
    fmax = std::max(fmax, std::abs(F.values[probes[k]]));
  }
  // u = (z1 + z2, zeta1 - zeta2) reaches twice the probe half width
  double r_max = 2.0 * kFieldProbeFrac * std::min(F.x_spec.axis(0).half_width, F.xi_spec.axis(0).half_width);
  return judge({alpha, beta}, growth_fit(smp, rule.r_min, r_max, rule.shells, rule.floor_rel * fmax), rule);
}

}  // namespace detail

/// sup |(d_z1 + d_z2)^alpha (d_zeta1 - d_zeta2)^beta T^Delta_g K|
///     <(z1 + z2, zeta1 - zeta2)>^{rho(alpha + beta) - m} <(z1 - z2, zeta1 + zeta2)>^N
/// with the shell growth rule in |(z1 + z2, zeta1 - zeta2)|.
inline SeminormReport kernel_conormal_check(const KernelGrid& K, const Window& g, double m, double rho, int alpha,
                                            int beta, int N, VerdictRule rule = {}) {
  detail::check_kernel_args(K, g, rho, N);
  if (alpha < 0 || beta < 0 || alpha + beta > 2)
    throw ValidationError("kernel_conormal_check: derivative depth |alpha + beta| must be at most 2");
  SeminormReport rep{"kernel", K.provenance, m, rho, alpha + beta, N, {}, 0, 0, 0, 0, true};
  rep.entries.push_back(detail::kernel_entry(detail::diag_field(K, g), m, rho, alpha, beta, N, rule));
  finish(rep, rule);
  return rep;
}

/// All (alpha, beta) with alpha + beta <= max_order on one twisted field.
inline SeminormReport kernel_conormal_scan(const KernelGrid& K, const Window& g, double m, double rho, int max_order,
                                           int N, VerdictRule rule = {}) {
  detail::check_kernel_args(K, g, rho, N);
  if (max_order < 0 || max_order > 2) throw ValidationError("kernel_conormal_scan: order must be in [0, 2]");
  PhaseSpaceField F = detail::diag_field(K, g);
  SeminormReport rep{"kernel", K.provenance, m, rho, max_order, N, {}, 0, 0, 0, 0, true};
  for (auto& ab : multi_indices(2, max_order)) rep.entries.push_back(detail::kernel_entry(F, m, rho, ab[0], ab[1], N, rule));
  finish(rep, rule);
  return rep;
}

// ---------------------------------------------------------------------------
// Kernel test corpus (d = 1, symbols on R^2)

/// e^{-(x^2 + xi^2)/2} times an optional monomial x^p xi^q.
inline Signal gaussian_symbol(int p = 0, int q = 0, double x0 = 0.0, double xi0 = 0.0) {
  return analytic("gaussian_symbol", 2, [=](std::span<const double> z) {
    double x = z[0] - x0, xi = z[1] - xi0;
    return cplx(std::pow(z[0], p) * std::pow(z[1], q) * std::exp(-0.5 * (x * x + xi * xi)));
  });
}

inline Signal oscillator_symbol() {
  return analytic("oscillator", 2, [](std::span<const double> z) { return cplx(z[0] * z[0] + z[1] * z[1]); });
}

/// Gaussian symbols for the kernel transform identity.
inline std::vector<std::pair<std::string, Signal>> gaussian_symbol_corpus() {
  return {{"gaussian", gaussian_symbol()},
          {"gaussian*x", gaussian_symbol(1, 0)},
          {"gaussian*xi", gaussian_symbol(0, 1)},
          {"gaussian@(1,-0.5)", gaussian_symbol(0, 0, 1.0, -0.5)}};
}

/// Symbols on R^2 with declared (m, rho) and expected membership.
inline std::vector<CorpusSymbol> kernel_symbol_corpus() {
  return {
      {"gaussian", gaussian_symbol(), 0.0, 1.0, true, std::nullopt},
      {"gaussian*x", gaussian_symbol(1, 0), 0.0, 1.0, true, std::nullopt},
      {"one", constant(2), 0.0, 1.0, true, std::nullopt},
      {"japanese", japanese_power(2, 1.0), 1.0, 1.0, true, std::nullopt},
      {"oscillator", oscillator_symbol(), 2.0, 1.0, true, std::nullopt},
      {"japanese@m=-2", japanese_power(2, 1.0), -2.0, 1.0, false, std::nullopt},
      {"chirp", unit_chirp(2), 0.0, 0.0, false, std::nullopt},
  };
}

/// Kernel-test signal grid: L = 8, N = 32.
inline GridSpec kernel_base_grid() { return GridSpec::cube(1, 8.0, 32); }

}  // namespace phasescope
