#pragma once

// The transform T_g u(x, xi) = (2 pi)^{-d/2} (u, T_x M_xi g), its adjoint,
// inversion and the phase twists.

#include <string>
#include <vector>

#include "subspace.hpp"
#include "window.hpp"

namespace phasescope {

/// Values over an x-grid times a xi-grid, x-major: index = ix * |xi| + jxi.
struct PhaseSpaceField {
  GridSpec x_spec, xi_spec;
  std::vector<cplx> values;
  std::string provenance;

  PhaseSpaceField() = default;
  PhaseSpaceField(GridSpec xs, GridSpec ks, std::string prov = {})
      : x_spec(std::move(xs)), xi_spec(std::move(ks)), values(x_spec.size() * xi_spec.size()),
        provenance(std::move(prov)) {
    if (x_spec.dim() != xi_spec.dim()) throw DimensionError("phase-space field: x/xi dimension mismatch");
  }

  std::size_t dim() const { return x_spec.dim(); }
  std::size_t nx() const { return x_spec.size(); }
  std::size_t nxi() const { return xi_spec.size(); }
  std::size_t size() const { return values.size(); }
  cplx& at(std::size_t ix, std::size_t jxi) { return values[ix * nxi() + jxi]; }
  const cplx& at(std::size_t ix, std::size_t jxi) const { return values[ix * nxi() + jxi]; }

  /// The 2d-dimensional grid (x axes, then xi axes) matching the value layout.
  GridSpec phase_spec() const {
    std::vector<Axis> a = x_spec.axes();
    for (auto& ax : xi_spec.axes()) a.push_back(ax);
    return GridSpec(std::move(a));
  }
  /// (x, xi) of a flat index.
  std::vector<double> point(std::size_t flat) const {
    std::vector<double> z(2 * dim());
    x_spec.point(flat / nxi(), std::span<double>(z.data(), dim()));
    xi_spec.point(flat % nxi(), std::span<double>(z.data() + dim(), dim()));
    return z;
  }
  double cell_volume() const { return x_spec.cell_volume() * xi_spec.cell_volume(); }
  bool all_finite() const {
    for (auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
};

inline double l2_norm(const PhaseSpaceField& F) {
  CompensatedSum s;
  for (auto& v : F.values) s.add(std::norm(v));
  return std::sqrt(s.value() * F.cell_volume());
}

inline cplx field_inner(const PhaseSpaceField& A, const PhaseSpaceField& B) {
  if (!(A.x_spec == B.x_spec) || !(A.xi_spec == B.xi_spec)) throw DimensionError("field_inner: grid mismatch");
  ComplexCompensatedSum s;
  for (std::size_t i = 0; i < A.size(); ++i) s.add(A.values[i] * std::conj(B.values[i]));
  return s.value() * A.cell_volume();
}

/// Default signal grid: L = 12, N = 256 in d = 1.
inline GridSpec default_grid(std::size_t d) {
  if (d == 1) return GridSpec::cube(1, 12.0, 256);
  if (d == 2) return GridSpec::cube(2, 12.0, 64);
  return balanced_grid(d, 32);
}

// ---------------------------------------------------------------------------
// Pointwise evaluation

struct QuadratureOptions {
  double half_width = 9.0;  // t-range [-half_width, half_width) for the window
  double step = 0.04;
};

namespace detail {

inline double inv_sqrt_2pi_pow(std::size_t d) { return std::pow(2.0 * kPi, -0.5 * static_cast<double>(d)); }

/// T_g delta_{x0}(x, xi) = (2 pi)^{-d/2} w e^{i<x - x0, xi>} conj(g(x0 - x))
inline cplx point_mass_value(const sig::PointMass& pm, const Window& g, std::span<const double> x,
                             std::span<const double> xi) {
  const std::size_t d = x.size();
  std::vector<double> t(d);
  double ph = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double y = x[j] - pm.x0[static_cast<Eigen::Index>(j)];
    ph += y * xi[j];
    t[j] = -y;
  }
  return inv_sqrt_2pi_pow(d) * pm.weight * std::polar(1.0, ph) * std::conj(g(t));
}

}  // namespace detail

/// Evaluates T_g u at arbitrary phase-space points. Point masses use the
/// closed form; tensor products with a separable window factor; everything
/// else is a rectangle-rule quadrature over the window support.
class PointEvaluator {
 public:
  PointEvaluator(const Signal& u, const Window& g, QuadratureOptions q = {})
      : PointEvaluator(normalize_point_masses(u), g, q, 0) {}

  std::size_t dim() const { return d_; }

  cplx operator()(std::span<const double> x, std::span<const double> xi) const {
    switch (mode_) {
      case Mode::PointMass: return coeff_ * detail::point_mass_value(pm_, g_, x, xi);
      case Mode::Sum: {
        cplx s{};
        for (std::size_t i = 0; i < children_.size(); ++i) s += weights_[i] * children_[i](x, xi);
        return s;
      }
      case Mode::Product: {
        std::size_t k = children_[0].dim();
        return children_[0](x.subspan(0, k), xi.subspan(0, k)) * children_[1](x.subspan(k), xi.subspan(k));
      }
      case Mode::Quadrature: return quadrature(x, xi);
    }
    return {};
  }
  cplx operator()(std::initializer_list<double> x, std::initializer_list<double> xi) const {
    std::vector<double> a(x), b(xi);
    return (*this)(std::span<const double>(a), std::span<const double>(b));
  }

 private:
  enum class Mode { PointMass, Sum, Product, Quadrature };

  PointEvaluator(const Signal& u, const Window& g, QuadratureOptions q, int) : d_(phasescope::dim(u)), g_(g), q_(q) {
    if (g.dim() != d_) throw DimensionError("transform: window/signal dimension mismatch");
    const auto& v = variant_of(u);
    if (auto* t = std::get_if<sig::TensorProduct>(&v)) {
      if (auto parts = split_window(g, phasescope::dim(t->first))) {
        mode_ = Mode::Product;
        children_.push_back(PointEvaluator(t->first, parts->first, q, 0));
        children_.push_back(PointEvaluator(t->second, parts->second, q, 0));
        return;
      }
      if (has_point_mass(u))
        throw UnsupportedSampling("tensor factor with a point mass needs a separable window");
    }
    if (has_point_mass(u)) {
      if (auto* pm = std::get_if<sig::PointMass>(&v)) {
        mode_ = Mode::PointMass;
        pm_ = *pm;
        return;
      }
      if (auto* l = std::get_if<sig::LinearCombination>(&v)) {
        mode_ = Mode::Sum;
        for (auto& [c, s] : l->terms) {
          weights_.push_back(c);
          children_.push_back(PointEvaluator(s, g, q, 0));
        }
        return;
      }
      throw UnsupportedSampling("point mass in an unsupported position");
    }
    mode_ = Mode::Quadrature;
    u_ = u;
    const auto m = static_cast<std::size_t>(2 * std::lround(q.half_width / q.step));
    m_ = m;
    std::size_t total = 1;
    for (std::size_t j = 0; j < d_; ++j) total *= m;
    t_.resize(total * d_);
    gt_.resize(total);
    std::vector<double> t(d_);
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t r = i;
      for (std::size_t j = d_; j-- > 0;) {
        t[j] = q.step * (static_cast<double>(r % m) - static_cast<double>(m / 2));
        r /= m;
      }
      std::copy(t.begin(), t.end(), t_.begin() + static_cast<long>(i * d_));
      gt_[i] = std::conj(g(t));
    }
  }

  cplx quadrature(std::span<const double> x, std::span<const double> xi) const {
    std::vector<double> y(d_);
    cplx s{};
    for (std::size_t i = 0; i < gt_.size(); ++i) {
      if (gt_[i] == cplx{}) continue;
      const double* t = &t_[i * d_];
      double ph = 0.0;
      for (std::size_t j = 0; j < d_; ++j) {
        y[j] = x[j] + t[j];
        ph -= t[j] * xi[j];
      }
      s += eval(u_, y) * gt_[i] * std::polar(1.0, ph);
    }
    return s * std::pow(q_.step, static_cast<double>(d_)) * detail::inv_sqrt_2pi_pow(d_);
  }

  std::size_t d_ = 0;
  Window g_;
  QuadratureOptions q_;
  Mode mode_ = Mode::Quadrature;
  sig::PointMass pm_;
  cplx coeff_{1.0, 0.0};
  std::vector<cplx> weights_;
  std::vector<PointEvaluator> children_;
  Signal u_;
  std::size_t m_ = 0;
  std::vector<double> t_;
  std::vector<cplx> gt_;
};

/// Single-point convenience wrapper.
inline cplx transform_at(const Signal& u, const Window& g, std::span<const double> x, std::span<const double> xi,
                         QuadratureOptions q = {}) {
  return PointEvaluator(u, g, q)(x, xi);
}

// ---------------------------------------------------------------------------
// Grid transform

namespace detail {

inline GridSpec doubled(const GridSpec& s) {
  std::vector<Axis> a;
  for (auto& ax : s.axes()) a.push_back({2.0 * ax.half_width, 2 * ax.samples});
  return GridSpec(std::move(a));
}

/// Windowed FFT per x node for signals without point masses.
inline PhaseSpaceField transform_smooth(const Signal& u, const Window& g, const GridSpec& spec) {
  PhaseSpaceField F(spec, spec.dual());
  const std::size_t d = spec.dim();
  GridSpec ext = doubled(spec);
  GridFunction ue(ext);
  if (auto* s = std::get_if<sig::Sampled>(&variant_of(u)); s && s->f.spec == spec) {
    std::vector<std::size_t> idx(d);
    std::vector<long> off(d);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      spec.unravel(i, idx);
      for (std::size_t j = 0; j < d; ++j)
        off[j] = static_cast<long>(idx[j]) - static_cast<long>(spec.axis(j).samples / 2);
      ue[static_cast<std::size_t>(ext.flat_from_offsets(off))] = s->f[i];
    }
  } else {
    ue = sample(u, ext);
  }
  GridFunction gt = window_sample(g, spec);
  for (auto& v : gt.values) v = std::conj(v);
  const std::size_t n = spec.size();
  parallel_for(n, [&](std::size_t ix) {
    std::vector<std::size_t> xi_idx(d), t_idx(d);
    std::vector<long> off(d);
    spec.unravel(ix, xi_idx);
    std::vector<cplx> buf(n);
    for (std::size_t it = 0; it < n; ++it) {
      if (gt[it] == cplx{}) continue;
      spec.unravel(it, t_idx);
      for (std::size_t j = 0; j < d; ++j) {
        long half = static_cast<long>(spec.axis(j).samples / 2);
        off[j] = (static_cast<long>(xi_idx[j]) - half) + (static_cast<long>(t_idx[j]) - half);
      }
      long f = ext.flat_from_offsets(off);
      if (f >= 0) buf[it] = ue[static_cast<std::size_t>(f)] * gt[it];
    }
    for (std::size_t ax = 0; ax < d; ++ax) fourier_along_axis(buf, spec, ax, false);
    std::copy(buf.begin(), buf.end(), F.values.begin() + static_cast<long>(ix * n));
  });
  return F;
}

inline void add_scaled(PhaseSpaceField& acc, cplx c, const PhaseSpaceField& F) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc.values[i] += c * F.values[i];
}

inline PhaseSpaceField transform_normalized(const Signal& u, const Window& g, const GridSpec& spec) {
  if (!has_point_mass(u)) return transform_smooth(u, g, spec);
  const auto& v = variant_of(u);
  if (auto* pm = std::get_if<sig::PointMass>(&v)) {
    PhaseSpaceField F(spec, spec.dual());
    const std::size_t d = spec.dim();
    parallel_for(F.nx(), [&](std::size_t ix) {
      std::vector<double> x(d), xi(d);
      spec.point(ix, x);
      for (std::size_t j = 0; j < F.nxi(); ++j) {
        F.xi_spec.point(j, xi);
        F.at(ix, j) = point_mass_value(*pm, g, x, xi);
      }
    });
    return F;
  }
  if (auto* l = std::get_if<sig::LinearCombination>(&v)) {
    PhaseSpaceField F(spec, spec.dual());
    for (auto& [c, s] : l->terms) add_scaled(F, c, transform_normalized(s, g, spec));
    return F;
  }
  if (auto* t = std::get_if<sig::TensorProduct>(&v)) {
    const std::size_t k = dim(t->first);
    auto parts = split_window(g, k);
    if (!parts) throw UnsupportedSampling("tensor factor with a point mass needs a separable window");
    std::vector<Axis> a1(spec.axes().begin(), spec.axes().begin() + static_cast<long>(k));
    std::vector<Axis> a2(spec.axes().begin() + static_cast<long>(k), spec.axes().end());
    PhaseSpaceField F1 = transform_normalized(t->first, parts->first, GridSpec(a1));
    PhaseSpaceField F2 = transform_normalized(t->second, parts->second, GridSpec(a2));
    PhaseSpaceField F(spec, spec.dual());
    parallel_for(F.nx(), [&](std::size_t ix) {
      std::size_t ix1 = ix / F2.nx(), ix2 = ix % F2.nx();
      for (std::size_t j = 0; j < F.nxi(); ++j) {
        std::size_t j1 = j / F2.nxi(), j2 = j % F2.nxi();
        F.at(ix, j) = F1.at(ix1, j1) * F2.at(ix2, j2);
      }
    });
    return F;
  }
  throw UnsupportedSampling("point mass in an unsupported position");
}

}  // namespace detail

/// T_g u on spec x spec.dual().
inline PhaseSpaceField transform(const Signal& u, const Window& g, const GridSpec& spec,
                                 const std::string& signal_label = "signal") {
  if (dim(u) != spec.dim() || g.dim() != spec.dim())
    throw DimensionError("transform: signal, window and grid dimensions must agree");
  if (window_norm(g) <= 1e-8) throw ValidationError("transform: window must be nonzero");
  PhaseSpaceField F = detail::transform_normalized(normalize_point_masses(u), g, spec);
  F.provenance = "window=" + g.id() + ";signal=" + signal_label;
  if (!F.all_finite()) throw NumericalError("transform produced non-finite values");
  return F;
}

inline PhaseSpaceField transform(const Signal& u, const Window& g) { return transform(u, g, default_grid(dim(u))); }

// ---------------------------------------------------------------------------
// Adjoint and inversion

/// Discrete adjoint of the grid transform:
/// (2 pi)^{-d/2} sum_x sum_xi F(x, xi) e^{i<y - x, xi>} g(y - x) h_x h_xi.
inline GridFunction adjoint(const PhaseSpaceField& F, const Window& g) {
  const GridSpec& spec = F.x_spec;
  const std::size_t d = spec.dim(), n = spec.size();
  if (F.nxi() != n) throw DimensionError("adjoint: xi grid must match the x grid size");
  if (!F.all_finite()) throw NumericalError("adjoint: field has non-finite values");
  GridFunction gt = window_sample(g, spec);
  const double hx = spec.cell_volume();
  std::vector<cplx> contrib(F.nx() * n);
  parallel_for(F.nx(), [&](std::size_t ix) {
    std::vector<cplx> col(F.values.begin() + static_cast<long>(ix * n), F.values.begin() + static_cast<long>((ix + 1) * n));
    for (std::size_t ax = 0; ax < d; ++ax) fourier_along_axis(col, F.xi_spec, ax, true);
    for (std::size_t it = 0; it < n; ++it) contrib[ix * n + it] = col[it] * gt[it] * hx;
  });
  GridFunction out(spec);
  parallel_for(n, [&](std::size_t iy) {
    std::vector<std::size_t> yi(d), xi(d);
    std::vector<long> off(d);
    spec.unravel(iy, yi);
    ComplexCompensatedSum s;
    for (std::size_t ix = 0; ix < F.nx(); ++ix) {
      spec.unravel(ix, xi);
      for (std::size_t j = 0; j < d; ++j) off[j] = static_cast<long>(yi[j]) - static_cast<long>(xi[j]);
      long t = spec.flat_from_offsets(off);
      if (t >= 0) s.add(contrib[ix * n + static_cast<std::size_t>(t)]);
    }
    out[iy] = s.value();
  });
  return out;
}

/// (h, g) computed on the field's own grid, matching the discrete adjoint.
inline cplx grid_window_pairing(const Window& h, const Window& g, const GridSpec& spec) {
  return quadrature_inner(window_sample(h, spec), window_sample(g, spec));
}

/// (h, g)^{-1} T_h^* F
inline GridFunction invert(const PhaseSpaceField& F, const Window& g, const Window& h) {
  cplx c = grid_window_pairing(h, g, F.x_spec);
  if (std::abs(c) <= 1e-8)
    throw ValidationError("invert: windows are (nearly) orthogonal, |(h,g)| <= 1e-8");
  GridFunction u = adjoint(F, h);
  for (auto& v : u.values) v /= c;
  return u;
}

// ---------------------------------------------------------------------------
// Phase twists

/// T^Y: multiply by e^{-i<pi_{Y^perp} x, xi>} (sign = -1) or its inverse (sign = +1).
inline PhaseSpaceField phase_twist_Y(const PhaseSpaceField& F, const SubspaceSpec& Y, int sign = -1) {
  if (Y.d != F.dim()) throw DimensionError("phase_twist_Y: subspace dimension mismatch");
  PhaseSpaceField out = F;
  const Mat P = Y.proj_perp();
  const std::size_t d = F.dim();
  parallel_for(F.nx(), [&](std::size_t ix) {
    std::vector<double> x(d), xi(d);
    F.x_spec.point(ix, x);
    Vec px = P * to_vec(x);
    for (std::size_t j = 0; j < F.nxi(); ++j) {
      F.xi_spec.point(j, xi);
      double ph = 0.0;
      for (std::size_t k = 0; k < d; ++k) ph += px[static_cast<Eigen::Index>(k)] * xi[k];
      out.at(ix, j) *= std::polar(1.0, sign * ph);
    }
  });
  out.provenance += ";twist=Y";
  return out;
}

/// T^Delta: multiply by e^{-(i/2)<zeta_1 - zeta_2, z_1 - z_2>}.
inline PhaseSpaceField phase_twist_diag(const PhaseSpaceField& F, int sign = -1) {
  if (F.dim() % 2 != 0) throw DimensionError("phase_twist_diag: base dimension must be even");
  const std::size_t d = F.dim(), h = d / 2;
  for (std::size_t j = 0; j < h; ++j)
    if (!(F.x_spec.axis(j) == F.x_spec.axis(j + h)))
      throw ValidationError("phase_twist_diag: z_1 and z_2 axes must match");
  PhaseSpaceField out = F;
  parallel_for(F.nx(), [&](std::size_t ix) {
    std::vector<double> z(d), zeta(d);
    F.x_spec.point(ix, z);
    for (std::size_t j = 0; j < F.nxi(); ++j) {
      F.xi_spec.point(j, zeta);
      double ph = 0.0;
      for (std::size_t k = 0; k < h; ++k) ph += (zeta[k] - zeta[k + h]) * (z[k] - z[k + h]);
      out.at(ix, j) *= std::polar(1.0, 0.5 * sign * ph);
    }
  });
  out.provenance += ";twist=diag";
  return out;
}

}  // namespace phasescope
