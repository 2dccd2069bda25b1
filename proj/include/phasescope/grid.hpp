#pragma once

// Uniform symmetric grids on R^d, rectangle-rule quadrature and the unitary
// Fourier transform (2 pi)^{-d/2} \int f(x) e^{-i<x,xi>} dx sampled on the
// dual grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"

namespace phasescope {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

class ComplexCompensatedSum {
 public:
  void add(cplx v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_, im_;
};

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

/// One axis: nodes x_k = h (k - N/2), k = 0..N-1, covering [-L, L).
struct Axis {
  double half_width = 12.0;
  std::size_t samples = 256;

  double step() const { return 2.0 * half_width / static_cast<double>(samples); }
  double node(std::size_t k) const {
    return step() * (static_cast<double>(k) - static_cast<double>(samples / 2));
  }
  /// Axis carrying the Fourier-dual frequencies xi_k = pi k / L.
  Axis dual() const {
    return {kPi * static_cast<double>(samples) / (2.0 * half_width), samples};
  }
  /// Signed offset of the node nearest to x from the origin node.
  long nearest_offset(double x) const { return std::lround(x / step()); }
  /// Half widths compare to a few ulp so that dual().dual() == *this.
  bool operator==(const Axis& o) const {
    return samples == o.samples &&
           std::abs(half_width - o.half_width) <= 4e-16 * std::max(half_width, o.half_width);
  }
};

class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) { validate(); }

  /// d identical axes.
  static GridSpec cube(std::size_t d, double half_width, std::size_t samples) {
    return GridSpec(std::vector<Axis>(d, Axis{half_width, samples}));
  }

  std::size_t dim() const { return axes_.size(); }
  const Axis& axis(std::size_t j) const { return axes_.at(j); }
  const std::vector<Axis>& axes() const { return axes_; }

  std::size_t size() const {
    std::size_t n = 1;
    for (auto& a : axes_) n *= a.samples;
    return n;
  }
  double cell_volume() const {
    double v = 1.0;
    for (auto& a : axes_) v *= a.step();
    return v;
  }
  GridSpec dual() const {
    std::vector<Axis> d;
    for (auto& a : axes_) d.push_back(a.dual());
    return GridSpec(std::move(d));
  }
  std::size_t stride(std::size_t j) const {
    std::size_t s = 1;
    for (std::size_t k = j + 1; k < axes_.size(); ++k) s *= axes_[k].samples;
    return s;
  }
  /// Per-axis indices of a flat row-major index.
  void unravel(std::size_t flat, std::span<std::size_t> idx) const {
    for (std::size_t j = axes_.size(); j-- > 0;) {
      idx[j] = flat % axes_[j].samples;
      flat /= axes_[j].samples;
    }
  }
  std::size_t ravel(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < axes_.size(); ++j) flat = flat * axes_[j].samples + idx[j];
    return flat;
  }
  void point(std::size_t flat, std::span<double> x) const {
    for (std::size_t j = axes_.size(); j-- > 0;) {
      x[j] = axes_[j].node(flat % axes_[j].samples);
      flat /= axes_[j].samples;
    }
  }
  std::vector<double> point(std::size_t flat) const {
    std::vector<double> x(dim());
    point(flat, x);
    return x;
  }
  /// Flat index of the origin-relative offsets, or -1 when outside the box.
  long flat_from_offsets(std::span<const long> off) const {
    long flat = 0;
    for (std::size_t j = 0; j < axes_.size(); ++j) {
      long k = off[j] + static_cast<long>(axes_[j].samples / 2);
      if (k < 0 || k >= static_cast<long>(axes_[j].samples)) return -1;
      flat = flat * static_cast<long>(axes_[j].samples) + k;
    }
    return flat;
  }
  bool operator==(const GridSpec& o) const { return axes_ == o.axes_; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }

 private:
  void validate() const {
    if (axes_.empty() || axes_.size() > 4)
      throw DimensionError("grid dimension must be in [1, 4], got " +
                           std::to_string(axes_.size()));
    for (auto& a : axes_) {
      if (!(a.half_width > 0.0) || !std::isfinite(a.half_width))
        throw ValidationError("grid half width must be positive and finite");
      if (!is_power_of_two(a.samples) || a.samples < 16)
        throw ValidationError("samples per axis must be a power of two >= 16, got " +
                              std::to_string(a.samples));
    }
  }

  std::vector<Axis> axes_;
};

/// Complex samples over a GridSpec, row-major with the last axis fastest.
struct GridFunction {
  GridSpec spec;
  std::vector<cplx> values;

  GridFunction() = default;
  explicit GridFunction(GridSpec s) : spec(std::move(s)), values(spec.size()) {}
  GridFunction(GridSpec s, std::vector<cplx> v) : spec(std::move(s)), values(std::move(v)) {
    if (values.size() != spec.size())
      throw DimensionError("value count does not match grid size");
  }

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  bool all_finite() const {
    for (auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
};

/// Rectangle rule for \int f conj(g) dx, summed in lexicographic order.
inline cplx quadrature_inner(const GridFunction& f, const GridFunction& g) {
  if (f.spec != g.spec) throw DimensionError("quadrature_inner: grid mismatch");
  ComplexCompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * std::conj(g[i]));
  return s.value() * f.spec.cell_volume();
}

inline double l2_norm(const GridFunction& f) {
  CompensatedSum s;
  for (auto& v : f.values) s.add(std::norm(v));
  return std::sqrt(s.value() * f.spec.cell_volume());
}

inline double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// ---------------------------------------------------------------------------
// Radix-2 FFT

namespace detail {

class Radix2Plan {
 public:
  explicit Radix2Plan(std::size_t n) : n_(n), rev_(n), tw_(n / 2) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      rev_[i] = r;
    }
    for (std::size_t k = 0; k < n / 2; ++k)
      tw_[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  }

  /// In-place DFT with kernel e^{sign * 2 pi i jk/N}, sign = -1 forward.
  void run(cplx* a, int sign) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      std::size_t half = len / 2, step = n_ / len;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t j = 0; j < half; ++j) {
          cplx w = sign < 0 ? tw_[j * step] : std::conj(tw_[j * step]);
          cplx u = a[i + j], v = a[i + j + half] * w;
          a[i + j] = u + v;
          a[i + j + half] = u - v;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<cplx> tw_;
};

inline std::shared_ptr<const Radix2Plan> plan_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const Radix2Plan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& p = cache[n];
  if (!p) p = std::make_shared<Radix2Plan>(n);
  return p;
}

}  // namespace detail

/// Centered DFT: out_j = sum_k a_k exp(sign i 2 pi (k - N/2)(j - N/2) / N).
/// N is a power of two >= 4, so the (-1)^{N/2} factor is 1.
inline void centered_dft(std::span<cplx> a, int sign) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n) || n < 4) throw ValidationError("centered_dft: N must be a power of two >= 4");
  for (std::size_t k = 1; k < n; k += 2) a[k] = -a[k];
  detail::plan_for(n)->run(a.data(), sign);
  for (std::size_t k = 1; k < n; k += 2) a[k] = -a[k];
}

/// Applies the 1-d unitary transform along one axis of data laid out by spec.
/// Forward uses e^{-i x xi}; inverse uses e^{+i x xi}. The scale is the input
/// step over sqrt(2 pi) in both directions.
inline void fourier_along_axis(std::vector<cplx>& data, const GridSpec& spec, std::size_t ax,
                               bool inverse) {
  const std::size_t n = spec.axis(ax).samples;
  const std::size_t stride = spec.stride(ax);
  const std::size_t outer = spec.size() / (n * stride);
  const double scale = spec.axis(ax).step() / std::sqrt(2.0 * kPi);
  const int sign = inverse ? +1 : -1;
  parallel_for(outer * stride, [&](std::size_t line) {
    std::size_t o = line / stride, s = line % stride;
    std::size_t base = o * n * stride + s;
    std::vector<cplx> buf(n);
    for (std::size_t k = 0; k < n; ++k) buf[k] = data[base + k * stride];
    centered_dft(buf, sign);
    for (std::size_t k = 0; k < n; ++k) data[base + k * stride] = buf[k] * scale;
  });
}

/// Fourier transform on the named axes (0-based); those axes move to their duals.
inline GridFunction partial_fourier(const GridFunction& f, std::span<const std::size_t> axes,
                                    bool inverse = false) {
  std::vector<Axis> out_axes = f.spec.axes();
  std::vector<cplx> data = f.values;
  std::vector<bool> seen(f.spec.dim(), false);
  for (std::size_t ax : axes) {
    if (ax >= f.spec.dim()) throw DimensionError("partial_fourier: invalid axis index " + std::to_string(ax));
    if (seen[ax]) continue;
    seen[ax] = true;
    fourier_along_axis(data, f.spec, ax, inverse);
    out_axes[ax] = out_axes[ax].dual();
  }
  return GridFunction(GridSpec(std::move(out_axes)), std::move(data));
}

inline GridFunction fourier(const GridFunction& f) {
  std::vector<std::size_t> all(f.spec.dim());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return partial_fourier(f, all, false);
}

inline GridFunction inverse_fourier(const GridFunction& f) {
  std::vector<std::size_t> all(f.spec.dim());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return partial_fourier(f, all, true);
}

}  // namespace phasescope
