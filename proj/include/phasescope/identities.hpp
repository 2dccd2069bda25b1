#pragma once

// Finite differences on phase-space fields, the differential identities
// d_x^a T_g u = T_g(d^a u), D_xi^b T_g u = T_{g_b} u and the window-change
// envelope.

#include <vector>

#include "fbi.hpp"

namespace phasescope {

/// Centered second-order difference of the given order (1 or 2) along one
/// axis of the 2d-dimensional layout (x axes first). The two edge nodes are
/// set to zero.
inline std::vector<cplx> fd_axis(const std::vector<cplx>& v, const GridSpec& s, std::size_t axis, int order) {
  const std::size_t n = s.axis(axis).samples, stride = s.stride(axis);
  const double h = s.axis(axis).step();
  std::vector<cplx> out(v.size());
  parallel_for(v.size(), [&](std::size_t i) {
    std::size_t k = (i / stride) % n;
    if (k == 0 || k + 1 == n) return;
    cplx a = v[i - stride], b = v[i + stride];
    out[i] = order == 1 ? (b - a) / (2.0 * h) : (b - 2.0 * v[i] + a) / (h * h);
  });
  return out;
}

/// Repeated first-order centered differences, order[j] times along axis j.
inline std::vector<cplx> fd_multi(std::vector<cplx> v, const GridSpec& s, const std::vector<int>& order) {
  for (std::size_t j = 0; j < order.size(); ++j) {
    int k = order[j];
    while (k >= 2) {
      v = fd_axis(v, s, j, 2);
      k -= 2;
    }
    if (k == 1) v = fd_axis(v, s, j, 1);
  }
  return v;
}

/// d_x^alpha d_xi^beta F by finite differences.
inline PhaseSpaceField fd_derivative(const PhaseSpaceField& F, const std::vector<int>& alpha,
                                     const std::vector<int>& beta) {
  if (alpha.size() != F.dim() || beta.size() != F.dim()) throw DimensionError("fd_derivative: multi-index length");
  std::vector<int> order(alpha);
  order.insert(order.end(), beta.begin(), beta.end());
  PhaseSpaceField out = F;
  out.values = fd_multi(F.values, F.phase_spec(), order);
  return out;
}

/// d^alpha f via the Fourier multiplier (i xi)^alpha.
inline GridFunction spectral_derivative(const GridFunction& f, const std::vector<int>& alpha) {
  GridFunction F = fourier(f);
  const std::size_t d = f.spec.dim();
  std::vector<double> xi(d);
  for (std::size_t i = 0; i < F.size(); ++i) {
    F.spec.point(i, xi);
    cplx m = 1.0;
    for (std::size_t j = 0; j < d; ++j) m *= std::pow(cplx(0.0, xi[j]), alpha[j]);
    F[i] *= m;
  }
  GridFunction out = inverse_fourier(F);
  out.spec = f.spec;
  return out;
}

/// Flat indices with |x_j| <= frac L_j and |xi_j| <= frac L'_j.
inline std::vector<std::size_t> interior_probes(const PhaseSpaceField& F, double frac, std::size_t stride = 1) {
  std::vector<std::size_t> out;
  const GridSpec ps = F.phase_spec();
  std::vector<double> z(ps.dim());
  for (std::size_t i = 0; i < F.size(); i += stride) {
    ps.point(i, z);
    bool in = true;
    for (std::size_t j = 0; j < ps.dim() && in; ++j) in = std::abs(z[j]) <= frac * ps.axis(j).half_width;
    if (in) out.push_back(i);
  }
  return out;
}

namespace detail {

/// Interior probes thinned to roughly n per phase-space axis.
inline std::vector<std::size_t> probe_lattice(const PhaseSpaceField& F, double interior, std::size_t n) {
  const GridSpec ps = F.phase_spec();
  std::vector<std::size_t> idx(ps.dim()), out;
  for (auto i : interior_probes(F, interior)) {
    ps.unravel(i, idx);
    bool keep = true;
    for (std::size_t j = 0; j < ps.dim() && keep; ++j) {
      std::size_t N = ps.axis(j).samples;
      auto lo = static_cast<std::size_t>(std::ceil(N / 2.0 - interior * N / 2.0));
      std::size_t stride = std::max<std::size_t>(1, (N - 2 * lo) / std::max<std::size_t>(1, n - 1));
      keep = (idx[j] + N / 2) % stride == 0;
    }
    if (keep) out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// max |A - B| / max |B| over the probes.
inline double max_relative_error(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                 const std::vector<std::size_t>& probes) {
  double num = 0, den = 0;
  for (auto i : probes) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0 ? num / den : num;
}

/// Centered second-order stencil weights for a derivative of order 0 to 4.
inline std::vector<std::pair<int, double>> fd_stencil(int order, double h) {
  const double h2 = h * h;
  switch (order) {
    case 0: return {{0, 1.0}};
    case 1: return {{-1, -0.5 / h}, {1, 0.5 / h}};
    case 2: return {{-1, 1.0 / h2}, {0, -2.0 / h2}, {1, 1.0 / h2}};
    case 3: return {{-2, -0.5 / (h2 * h)}, {-1, 1.0 / (h2 * h)}, {1, -1.0 / (h2 * h)}, {2, 0.5 / (h2 * h)}};
    case 4: return {{-2, 1.0 / (h2 * h2)}, {-1, -4.0 / (h2 * h2)}, {0, 6.0 / (h2 * h2)}, {1, -4.0 / (h2 * h2)}, {2, 1.0 / (h2 * h2)}};
    default: throw ValidationError("finite differences support orders up to 4 per axis");
  }
}

/// Tensor-product centered differences of fn at z: d^order[j] along axis j.
template <class Fn>
cplx fd_point(Fn&& fn, std::span<const double> z, const std::vector<int>& order, double h) {
  const std::size_t D = z.size();
  std::vector<std::vector<std::pair<int, double>>> st(D);
  std::size_t total = 1;
  for (std::size_t j = 0; j < D; ++j) {
    st[j] = fd_stencil(order[j], h);
    total *= st[j].size();
  }
  std::vector<double> p(D);
  cplx acc{};
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t r = k;
    double w = 1.0;
    for (std::size_t j = D; j-- > 0;) {
      auto& [off, wt] = st[j][r % st[j].size()];
      r /= st[j].size();
      p[j] = z[j] + off * h;
      w *= wt;
    }
    acc += w * fn(std::span<const double>(p));
  }
  return acc;
}

struct IdentityOptions {
  GridSpec grid = GridSpec::cube(1, 12.0, 256);
  double fd_step = 0.02;
  double interior = 0.6;
  std::size_t probes_per_axis = 21;
};

/// Compares d_x^alpha D_xi^beta T_g u, by centered differences of the
/// pointwise transform, with the grid transform T_{g_beta}(d^alpha u), where
/// d^alpha u is spectral. Returns max |LHS - RHS| / max |RHS| on interior probes.
inline double diff_identity_check(const Signal& u, const Window& g, const std::vector<int>& alpha,
                                  const std::vector<int>& beta, IdentityOptions opt = {}) {
  const std::size_t d = dim(u);
  if (opt.grid.dim() != d) opt.grid = default_grid(d);
  if (alpha.size() != d || beta.size() != d) throw DimensionError("diff_identity_check: multi-index length");
  bool any_alpha = false;
  int nb = 0;
  for (int a : alpha) any_alpha = any_alpha || a != 0;
  for (int b : beta) nb += b;
  Signal du = any_alpha ? sampled(spectral_derivative(sample(u, opt.grid), alpha)) : u;
  PhaseSpaceField rhs = transform(du, window_moment(g, beta), opt.grid);
  if (!any_alpha && nb == 0) {
    PhaseSpaceField lhs = transform(u, g, opt.grid);
    return max_relative_error(lhs.values, rhs.values, interior_probes(rhs, opt.interior));
  }
  std::vector<std::size_t> probes;
  {
    const GridSpec ps = rhs.phase_spec();
    std::vector<std::size_t> idx(ps.dim());
    for (auto i : interior_probes(rhs, opt.interior)) {
      ps.unravel(i, idx);
      bool keep = true;
      for (std::size_t j = 0; j < ps.dim(); ++j) {
        std::size_t n = ps.axis(j).samples;
        auto lo = static_cast<std::size_t>(std::ceil(n / 2.0 - opt.interior * n / 2.0));
        std::size_t span = n - 2 * lo;
        std::size_t stride = std::max<std::size_t>(1, span / (opt.probes_per_axis - 1));
        keep = keep && (idx[j] - lo) % stride == 0;
      }
      if (keep) probes.push_back(i);
    }
  }
  PointEvaluator ev(u, g);
  std::vector<int> order(alpha);
  order.insert(order.end(), beta.begin(), beta.end());
  const cplx dscale = std::pow(cplx(0.0, -1.0), nb);  // D = -i d
  std::vector<cplx> lhs(probes.size()), ref(probes.size());
  parallel_for(probes.size(), [&](std::size_t k) {
    auto z = rhs.point(probes[k]);
    lhs[k] = dscale * fd_point(
                          [&](std::span<const double> p) { return ev(p.subspan(0, d), p.subspan(d)); }, z, order,
                          opt.fd_step);
    ref[k] = rhs.values[probes[k]];
  });
  std::vector<std::size_t> all(probes.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return max_relative_error(lhs, ref, all);
}

namespace detail {

/// Plain multi-dimensional DFT over a row-major box of the given extents.
inline void fft_box(std::vector<cplx>& a, const std::vector<std::size_t>& dims, int sign) {
  std::size_t total = a.size();
  for (std::size_t ax = 0; ax < dims.size(); ++ax) {
    std::size_t n = dims[ax], stride = 1;
    for (std::size_t k = ax + 1; k < dims.size(); ++k) stride *= dims[k];
    auto plan = plan_for(n);
    std::size_t lines = total / n;
    parallel_for(lines, [&](std::size_t line) {
      std::size_t o = line / stride, s = line % stride;
      std::size_t base = o * n * stride + s;
      std::vector<cplx> buf(n);
      for (std::size_t k = 0; k < n; ++k) buf[k] = a[base + k * stride];
      plan->run(buf.data(), sign);
      for (std::size_t k = 0; k < n; ++k) a[base + k * stride] = buf[k];
    });
  }
}

}  // namespace detail

/// Linear convolution on the phase grid, (A * B)(z) = sum_w A(w) B(z - w) dV,
/// via zero-padded FFT.
inline std::vector<double> convolve_moduli(const std::vector<double>& A, const std::vector<double>& B,
                                           const GridSpec& ps) {
  const std::size_t D = ps.dim();
  std::vector<std::size_t> dims(D);
  std::size_t total = 1;
  for (std::size_t j = 0; j < D; ++j) {
    dims[j] = 2 * ps.axis(j).samples;
    total *= dims[j];
  }
  std::vector<cplx> pa(total), pb(total);
  std::vector<std::size_t> idx(D);
  auto padded = [&](const std::vector<std::size_t>& id) {
    std::size_t f = 0;
    for (std::size_t j = 0; j < D; ++j) f = f * dims[j] + id[j];
    return f;
  };
  for (std::size_t i = 0; i < ps.size(); ++i) {
    ps.unravel(i, idx);
    std::size_t p = padded(idx);
    pa[p] = A[i];
    pb[p] = B[i];
  }
  detail::fft_box(pa, dims, -1);
  detail::fft_box(pb, dims, -1);
  for (std::size_t i = 0; i < total; ++i) pa[i] *= pb[i];
  detail::fft_box(pa, dims, +1);
  std::vector<double> out(ps.size());
  const double scale = ps.cell_volume() / static_cast<double>(total);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    ps.unravel(i, idx);
    std::vector<std::size_t> q(D);
    for (std::size_t j = 0; j < D; ++j) q[j] = idx[j] + ps.axis(j).samples / 2;
    out[i] = pa[padded(q)].real() * scale;
  }
  return out;
}

struct EnvelopeResult {
  std::size_t probes = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max LHS / RHS over probes
  bool pass() const { return violations == 0; }
};

/// Checks |d_x^a d_xi^b T_f u| <= (2 pi)^{-d/2} |(h,g)|^{-1} |d_x^a T_g u| * |T_{f_b} h|
/// pointwise on the interior, with 5% slack.
inline EnvelopeResult window_change_envelope(const Signal& u, const Window& f, const Window& g, const Window& h,
                                             const std::vector<int>& alpha, const std::vector<int>& beta,
                                             const GridSpec& grid, double slack = 5e-2, double interior = 0.6) {
  const std::size_t d = dim(u);
  cplx hg = grid_window_pairing(h, g, grid);
  if (std::abs(hg) <= 1e-8) throw ValidationError("window_change_envelope: |(h,g)| <= 1e-8");
  std::vector<int> zero(d, 0);
  PhaseSpaceField lhs = fd_derivative(transform(u, f, grid), alpha, beta);
  PhaseSpaceField ag = fd_derivative(transform(u, g, grid), alpha, zero);
  Window hw = h;
  Signal hs = analytic("window:" + h.id(), d, [hw](std::span<const double> t) { return hw(t); });
  PhaseSpaceField bf = transform(hs, window_moment(f, beta), grid);
  std::vector<double> A(ag.size()), B(bf.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    A[i] = std::abs(ag.values[i]);
    B[i] = std::abs(bf.values[i]);
  }
  std::vector<double> conv = convolve_moduli(A, B, lhs.phase_spec());
  const double c = std::pow(2.0 * kPi, -0.5 * static_cast<double>(d)) / std::abs(hg);
  // edge rows of the difference stencils are excluded through the interior probes
  EnvelopeResult res;
  double lmax = 0;
  auto probes = interior_probes(lhs, interior);
  for (auto i : probes) lmax = std::max(lmax, std::abs(lhs.values[i]));
  for (auto i : probes) {
    double l = std::abs(lhs.values[i]), r = c * conv[i];
    ++res.probes;
    if (r > 0) res.worst_ratio = std::max(res.worst_ratio, l / r);
    if (l > r * (1.0 + slack) + 1e-12 * lmax) ++res.violations;
  }
  return res;
}

}  // namespace phasescope
