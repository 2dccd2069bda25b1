#pragma once

// Windows: a Gaussian, sampled or tensor base plus a trail of window ops.

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "signals.hpp"

namespace phasescope {

class Window;

struct WindowOp {
  enum class Kind { Moment, Chirp, Pullback, Scale, Conj };
  Kind kind = Kind::Scale;
  std::vector<int> beta;  // Moment
  Mat matrix;             // Chirp: B, Pullback: A^{-1}
  Mat forward;            // Pullback: A
  cplx factor{1.0, 0.0};  // Scale

  std::string label() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::Moment:
        os << "moment(";
        for (std::size_t i = 0; i < beta.size(); ++i) os << (i ? "," : "") << beta[i];
        os << ")";
        break;
      case Kind::Chirp: os << "chirp"; break;
      case Kind::Pullback: os << "pullback"; break;
      case Kind::Scale: os << "scale(" << factor.real() << "," << factor.imag() << ")"; break;
      case Kind::Conj: os << "conj"; break;
    }
    return os.str();
  }
};

namespace win {
/// amplitude * prod_j exp(-t_j^2 / (2 sigma_j^2))
struct Gaussian {
  std::vector<double> sigma;
  cplx amplitude{1.0, 0.0};
};
struct Sampled {
  GridFunction f;
};
struct Tensor {
  std::shared_ptr<const Window> first, second;
};
}  // namespace win

class Window {
 public:
  using Base = std::variant<win::Gaussian, win::Sampled, win::Tensor>;

  Window() = default;
  Window(std::size_t dim, Base base, std::string name)
      : dim_(dim), base_(std::move(base)), name_(std::move(name)) {}

  std::size_t dim() const { return dim_; }
  const Base& base() const { return base_; }
  const std::vector<WindowOp>& ops() const { return ops_; }
  const std::string& name() const { return name_; }

  Window with(WindowOp op) const {
    Window w = *this;
    w.ops_.push_back(std::move(op));
    return w;
  }

  /// Base name followed by the derivation trail.
  std::string id() const {
    std::string s = name_;
    for (auto& op : ops_) s += "|" + op.label();
    return s;
  }

  cplx operator()(std::span<const double> t) const { return eval_from(ops_.size(), t); }

  bool is_plain_gaussian() const {
    if (!std::holds_alternative<win::Gaussian>(base_)) return false;
    for (auto& op : ops_)
      if (op.kind != WindowOp::Kind::Scale) return false;
    return true;
  }

 private:
  cplx eval_base(std::span<const double> t) const;
  cplx eval_from(std::size_t k, std::span<const double> t) const {
    if (k == 0) return eval_base(t);
    const WindowOp& op = ops_[k - 1];
    switch (op.kind) {
      case WindowOp::Kind::Moment: {
        double p = 1.0;
        for (std::size_t j = 0; j < op.beta.size(); ++j) p *= std::pow(-t[j], op.beta[j]);
        return p * eval_from(k - 1, t);
      }
      case WindowOp::Kind::Chirp:
        return std::polar(1.0, -0.5 * detail::quad_form(op.matrix, t)) * eval_from(k - 1, t);
      case WindowOp::Kind::Pullback: {
        Vec y = op.matrix * to_vec(t);
        return eval_from(k - 1, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
      }
      case WindowOp::Kind::Scale: return op.factor * eval_from(k - 1, t);
      case WindowOp::Kind::Conj: return std::conj(eval_from(k - 1, t));
    }
    return {};
  }

  std::size_t dim_ = 0;
  Base base_;
  std::vector<WindowOp> ops_;
  std::string name_;
};

inline cplx Window::eval_base(std::span<const double> t) const {
  return std::visit(overloaded{
                        [&](const win::Gaussian& g) {
                          double e = 0.0;
                          for (std::size_t j = 0; j < g.sigma.size(); ++j)
                            e += t[j] * t[j] / (2.0 * g.sigma[j] * g.sigma[j]);
                          return g.amplitude * std::exp(-e);
                        },
                        [&](const win::Sampled& s) { return detail::eval_sampled(s.f, t); },
                        [&](const win::Tensor& p) {
                          std::size_t k = p.first->dim();
                          return (*p.first)(t.subspan(0, k)) * (*p.second)(t.subspan(k));
                        },
                    },
                    base_);
}

// ---------------------------------------------------------------------------
// Constructors

/// psi_0 on R^d.
inline Window standard_gaussian(std::size_t d = 1) {
  if (d == 0 || d > 8) throw DimensionError("window dimension must be in [1, 8]");
  return Window(d, win::Gaussian{std::vector<double>(d, 1.0), std::pow(kPi, -0.25 * static_cast<double>(d))},
                "psi0");
}

inline Window gaussian_window(std::vector<double> sigma, cplx amplitude, std::string name = "gaussian") {
  for (double s : sigma)
    if (!(s > 0.0)) throw ValidationError("gaussian window: sigma must be positive");
  std::size_t d = sigma.size();
  return Window(d, win::Gaussian{std::move(sigma), amplitude}, std::move(name));
}

inline double window_norm(const Window& g);

inline Window sampled_window(GridFunction f, std::string name = "sampled") {
  if (!f.all_finite()) throw ValidationError("sampled window has non-finite values");
  std::size_t d = f.spec.dim();
  Window w(d, win::Sampled{std::move(f)}, std::move(name));
  if (window_norm(w) <= 1e-8) throw ValidationError("window must be nonzero (norm <= 1e-8)");
  return w;
}

inline Window window_tensor(const Window& a, const Window& b) {
  return Window(a.dim() + b.dim(),
                win::Tensor{std::make_shared<const Window>(a), std::make_shared<const Window>(b)},
                "(" + a.id() + ")x(" + b.id() + ")");
}

/// Smooth compactly supported bump exp(-1/(1-|t/r|^2)) sampled on spec, L2-normalized.
inline Window bump_window(const GridSpec& spec, double radius = 3.0) {
  GridFunction f(spec);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    auto x = spec.point(i);
    double r2 = 0.0;
    for (double v : x) r2 += v * v / (radius * radius);
    f[i] = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
  }
  double n = l2_norm(f);
  for (auto& v : f.values) v /= n;
  return sampled_window(std::move(f), "bump");
}

// ---------------------------------------------------------------------------
// Window ops

/// g_beta(t) = (-t)^beta g(t)
inline Window window_moment(const Window& g, std::vector<int> beta) {
  if (beta.size() != g.dim()) throw DimensionError("window_moment: multi-index length mismatch");
  int total = 0;
  for (int b : beta) {
    if (b < 0) throw ValidationError("window_moment: negative multi-index entry");
    total += b;
  }
  if (total > 8) throw ValidationError("window_moment: |beta| must be <= 8");
  if (total == 0) return g;
  WindowOp op;
  op.kind = WindowOp::Kind::Moment;
  op.beta = std::move(beta);
  return g.with(std::move(op));
}

/// g_B(t) = e^{-(i/2)<t,Bt>} g(t)
inline Window window_chirp(const Window& g, const Mat& B) {
  if (static_cast<std::size_t>(B.rows()) != g.dim()) throw DimensionError("window_chirp: dimension mismatch");
  Mat bs = checked_symmetric(B, "window_chirp");
  if (bs.cwiseAbs().maxCoeff() == 0.0) return g;
  WindowOp op;
  op.kind = WindowOp::Kind::Chirp;
  op.matrix = bs;
  return g.with(std::move(op));
}

/// A^{-*} g = g(A^{-1} .)
inline Window window_pullback(const Window& g, const Mat& A) {
  if (static_cast<std::size_t>(A.rows()) != g.dim()) throw DimensionError("window_pullback: dimension mismatch");
  check_invertible(A, "window_pullback");
  if ((A - Mat::Identity(A.rows(), A.cols())).cwiseAbs().maxCoeff() == 0.0) return g;
  WindowOp op;
  op.kind = WindowOp::Kind::Pullback;
  op.matrix = A.inverse();
  op.forward = A;
  return g.with(std::move(op));
}

inline Window window_scale(const Window& g, cplx c) {
  WindowOp op;
  op.kind = WindowOp::Kind::Scale;
  op.factor = c;
  return g.with(std::move(op));
}

inline Window window_conj(const Window& g) {
  WindowOp op;
  op.kind = WindowOp::Kind::Conj;
  return g.with(std::move(op));
}

// ---------------------------------------------------------------------------
// Sampling and quadrature

/// Grid with dual == self: L = sqrt(N pi / 2).
inline GridSpec balanced_grid(std::size_t d, std::size_t samples) {
  return GridSpec::cube(d, std::sqrt(static_cast<double>(samples) * kPi / 2.0), samples);
}

inline GridSpec default_window_grid(std::size_t d) {
  std::size_t n = d == 1 ? 256 : d == 2 ? 128 : 32;
  return balanced_grid(d, n);
}

inline GridFunction window_sample(const Window& g, const GridSpec& spec) {
  if (g.dim() != spec.dim()) throw DimensionError("window_sample: dimension mismatch");
  if (auto* s = std::get_if<win::Sampled>(&g.base()); s && g.ops().empty() && s->f.spec == spec) return s->f;
  GridFunction out(spec);
  parallel_for(spec.size(), [&](std::size_t i) {
    std::vector<double> t(spec.dim());
    spec.point(i, t);
    out[i] = g(t);
  });
  return out;
}

/// Grid on which the window is sampled for numerical work.
inline GridSpec window_grid(const Window& g) {
  if (auto* s = std::get_if<win::Sampled>(&g.base())) return s->f.spec;
  return default_window_grid(g.dim());
}

/// (h, g) = \int h conj(g)
inline cplx window_inner(const Window& h, const Window& g) {
  if (h.dim() != g.dim()) throw DimensionError("window_inner: dimension mismatch");
  GridSpec spec = std::holds_alternative<win::Sampled>(h.base()) ? window_grid(h) : window_grid(g);
  return quadrature_inner(window_sample(h, spec), window_sample(g, spec));
}

inline double window_norm(const Window& g) { return std::sqrt(std::abs(window_inner(g, g))); }

// ---------------------------------------------------------------------------
// Fourier transforms of windows

/// Fourier transform of the window on the given axes (inverse uses e^{+i}).
/// Closed form for plain Gaussians, numerical on the window grid otherwise.
inline Window window_fourier(const Window& g, const std::vector<std::size_t>& axes, bool inverse = false) {
  for (auto a : axes)
    if (a >= g.dim()) throw DimensionError("window_fourier: invalid axis");
  std::string tag = std::string(inverse ? "ifourier" : "fourier");
  if (g.is_plain_gaussian()) {
    auto gb = std::get<win::Gaussian>(g.base());
    cplx amp = gb.amplitude;
    for (auto& op : g.ops()) amp *= op.factor;
    std::vector<bool> seen(g.dim(), false);
    for (auto a : axes) {
      if (seen[a]) continue;
      seen[a] = true;
      amp *= gb.sigma[a];
      gb.sigma[a] = 1.0 / gb.sigma[a];
    }
    gb.amplitude = amp;
    std::string name = g.name();
    if (!axes.empty() && !(g.name() == "psi0" && g.ops().empty())) name = tag + "(" + g.id() + ")";
    return Window(g.dim(), gb, name);
  }
  GridFunction f = window_sample(g, window_grid(g));
  GridFunction t = partial_fourier(f, axes, inverse);
  return Window(g.dim(), win::Sampled{std::move(t)}, tag + "(" + g.id() + ")");
}

inline Window window_fourier(const Window& g) {
  std::vector<std::size_t> all(g.dim());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return window_fourier(g, all, false);
}
inline Window window_inverse_fourier(const Window& g) {
  std::vector<std::size_t> all(g.dim());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return window_fourier(g, all, true);
}

/// h = F_2(g o kappa), kappa(x, y) = (x + y/2, x - y/2).
inline Window window_kappa(const Window& g) {
  if (g.dim() % 2 != 0) throw DimensionError("window_kappa: window dimension must be even");
  const std::size_t d = g.dim() / 2;
  if (auto* s = std::get_if<win::Sampled>(&g.base())) {
    for (std::size_t j = 0; j < d; ++j)
      if (!(s->f.spec.axis(j) == s->f.spec.axis(j + d)))
        throw ValidationError("window_kappa: axis blocks must have equal specs");
  }
  std::vector<std::size_t> second(d);
  for (std::size_t j = 0; j < d; ++j) second[j] = d + j;
  if (g.is_plain_gaussian()) {
    auto gb = std::get<win::Gaussian>(g.base());
    bool paired = true;
    for (std::size_t j = 0; j < d; ++j) paired = paired && gb.sigma[j] == gb.sigma[j + d];
    if (paired) {
      // g o kappa has widths s/sqrt(2) (x) and s sqrt(2) (y)
      cplx amp = gb.amplitude;
      for (auto& op : g.ops()) amp *= op.factor;
      std::vector<double> sig(2 * d);
      for (std::size_t j = 0; j < d; ++j) {
        double s = gb.sigma[j];
        sig[j] = s / std::sqrt(2.0);
        sig[j + d] = 1.0 / (s * std::sqrt(2.0));
        amp *= s * std::sqrt(2.0);
      }
      return Window(2 * d, win::Gaussian{sig, amp}, "kappa(" + g.id() + ")");
    }
  }
  GridSpec spec = window_grid(g);
  GridFunction f(spec);
  parallel_for(spec.size(), [&](std::size_t i) {
    std::vector<double> p(2 * d), q(2 * d);
    spec.point(i, p);
    for (std::size_t j = 0; j < d; ++j) {
      q[j] = p[j] + 0.5 * p[j + d];
      q[j + d] = p[j] - 0.5 * p[j + d];
    }
    f[i] = g(q);
  });
  return Window(2 * d, win::Sampled{partial_fourier(f, second)}, "kappa(" + g.id() + ")");
}

// ---------------------------------------------------------------------------
// Separability

/// Splits g = g1 (x) g2 with g1 on the first k coordinates, when the window
/// structure allows it.
inline std::optional<std::pair<Window, Window>> split_window(const Window& g, std::size_t k) {
  if (k == 0 || k >= g.dim()) return std::nullopt;
  std::optional<std::pair<Window, Window>> parts;
  if (auto* gb = std::get_if<win::Gaussian>(&g.base())) {
    std::vector<double> s1(gb->sigma.begin(), gb->sigma.begin() + static_cast<long>(k));
    std::vector<double> s2(gb->sigma.begin() + static_cast<long>(k), gb->sigma.end());
    cplx a1 = std::pow(kPi, -0.25 * static_cast<double>(k)), a2 = gb->amplitude / a1;
    parts.emplace(Window(k, win::Gaussian{s1, a1}, g.name()), Window(g.dim() - k, win::Gaussian{s2, a2}, g.name()));
  } else if (auto* tb = std::get_if<win::Tensor>(&g.base())) {
    if (tb->first->dim() != k) return std::nullopt;
    parts.emplace(*tb->first, *tb->second);
  } else {
    return std::nullopt;
  }
  const auto kk = static_cast<Eigen::Index>(k);
  for (auto& op : g.ops()) {
    switch (op.kind) {
      case WindowOp::Kind::Moment: {
        std::vector<int> b1(op.beta.begin(), op.beta.begin() + static_cast<long>(k));
        std::vector<int> b2(op.beta.begin() + static_cast<long>(k), op.beta.end());
        parts->first = window_moment(parts->first, b1);
        parts->second = window_moment(parts->second, b2);
        break;
      }
      case WindowOp::Kind::Chirp:
        if (!is_block_diagonal(op.matrix, kk)) return std::nullopt;
        parts->first = window_chirp(parts->first, op.matrix.topLeftCorner(kk, kk));
        parts->second = window_chirp(parts->second, op.matrix.bottomRightCorner(op.matrix.rows() - kk, op.matrix.rows() - kk));
        break;
      case WindowOp::Kind::Pullback:
        if (!is_block_diagonal(op.forward, kk)) return std::nullopt;
        parts->first = window_pullback(parts->first, op.forward.topLeftCorner(kk, kk));
        parts->second = window_pullback(parts->second, op.forward.bottomRightCorner(op.forward.rows() - kk, op.forward.rows() - kk));
        break;
      case WindowOp::Kind::Scale: parts->first = window_scale(parts->first, op.factor); break;
      case WindowOp::Kind::Conj:
        parts->first = window_conj(parts->first);
        parts->second = window_conj(parts->second);
        break;
    }
  }
  return parts;
}

}  // namespace phasescope
