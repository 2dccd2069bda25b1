#pragma once

// Distribution surrogates (Signal) and window functions (Window).
//
// A Signal is a small immutable expression tree. Everything except PointMass
// can be evaluated pointwise; point masses are handled in closed form by the
// transform code.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "grid.hpp"
#include "linalg.hpp"

namespace phasescope {

class Signal;

namespace sig {

struct Sampled {
  GridFunction f;
};
struct PointMass {
  Vec x0;
  cplx weight{1.0, 0.0};
};
/// amplitude * sigma^{-d/2} pi^{-d/4} e^{-|x-x0|^2/(2 sigma^2)} e^{i<x-x0,xi0>} e^{(i/2)<x,Bx>}
struct GaussianPacket {
  Vec x0, xi0;
  double sigma = 1.0;
  Mat B;
  cplx amplitude{1.0, 0.0};
};
struct Constant {
  cplx value{1.0, 0.0};
  std::size_t dim = 1;
};
/// amplitude * e^{i<x,xi0>} e^{(i/2)<x,Bx>}; plane waves have B = 0.
struct Chirp {
  cplx amplitude{1.0, 0.0};
  Mat B;
  Vec xi0;
};
/// Any smooth polynomially bounded function given by a closure.
struct Analytic {
  std::string name;
  std::size_t dim = 1;
  std::function<cplx(std::span<const double>)> fn;
};
struct TensorProduct;
struct LinearCombination;
struct Pullback;
struct ChirpMul;
struct ShiftMod;

}  // namespace sig

namespace detail {
struct SignalNode;
}

class Signal {
 public:
  Signal() = default;
  explicit Signal(std::shared_ptr<const detail::SignalNode> n) : node_(std::move(n)) {}
  const detail::SignalNode& node() const { return *node_; }
  bool empty() const { return !node_; }

 private:
  std::shared_ptr<const detail::SignalNode> node_;
};

namespace sig {
struct TensorProduct {
  Signal first, second;
};
struct LinearCombination {
  std::vector<std::pair<cplx, Signal>> terms;
};
/// scale * inner(A x)
struct Pullback {
  Mat A;
  cplx scale{1.0, 0.0};
  Signal inner;
};
/// e^{(i/2)<x,Bx>} inner(x)
struct ChirpMul {
  Mat B;
  Signal inner;
};
/// T_{x0} M_{xi0} inner, i.e. e^{i<x-x0,xi0>} inner(x - x0)
struct ShiftMod {
  Vec x0, xi0;
  Signal inner;
};
}  // namespace sig

namespace detail {
using SignalVariant =
    std::variant<sig::Sampled, sig::PointMass, sig::GaussianPacket, sig::Constant, sig::Chirp,
                 sig::Analytic, sig::TensorProduct, sig::LinearCombination, sig::Pullback,
                 sig::ChirpMul, sig::ShiftMod>;
struct SignalNode {
  SignalVariant v;
};
}  // namespace detail

template <class T>
Signal make_signal(T&& alt) {
  return Signal(std::make_shared<const detail::SignalNode>(
      detail::SignalNode{detail::SignalVariant(std::forward<T>(alt))}));
}

inline const detail::SignalVariant& variant_of(const Signal& u) { return u.node().v; }

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

// ---------------------------------------------------------------------------
// Structural queries

inline std::size_t dim(const Signal& u) {
  return std::visit(
      overloaded{
          [](const sig::Sampled& s) { return s.f.spec.dim(); },
          [](const sig::PointMass& s) { return static_cast<std::size_t>(s.x0.size()); },
          [](const sig::GaussianPacket& s) { return static_cast<std::size_t>(s.x0.size()); },
          [](const sig::Constant& s) { return s.dim; },
          [](const sig::Chirp& s) { return static_cast<std::size_t>(s.xi0.size()); },
          [](const sig::Analytic& s) { return s.dim; },
          [](const sig::TensorProduct& s) { return dim(s.first) + dim(s.second); },
          [](const sig::LinearCombination& s) {
            return s.terms.empty() ? std::size_t{0} : dim(s.terms.front().second);
          },
          [](const sig::Pullback& s) { return dim(s.inner); },
          [](const sig::ChirpMul& s) { return dim(s.inner); },
          [](const sig::ShiftMod& s) { return dim(s.inner); },
      },
      variant_of(u));
}

inline std::size_t depth(const Signal& u) {
  return std::visit(overloaded{
                        [](const sig::TensorProduct& s) {
                          return 1 + std::max(depth(s.first), depth(s.second));
                        },
                        [](const sig::LinearCombination& s) {
                          std::size_t m = 0;
                          for (auto& t : s.terms) m = std::max(m, depth(t.second));
                          return 1 + m;
                        },
                        [](const sig::Pullback& s) { return 1 + depth(s.inner); },
                        [](const sig::ChirpMul& s) { return 1 + depth(s.inner); },
                        [](const sig::ShiftMod& s) { return 1 + depth(s.inner); },
                        [](const auto&) { return std::size_t{1}; },
                    },
                    variant_of(u));
}

inline bool has_point_mass(const Signal& u) {
  return std::visit(overloaded{
                        [](const sig::PointMass&) { return true; },
                        [](const sig::TensorProduct& s) {
                          return has_point_mass(s.first) || has_point_mass(s.second);
                        },
                        [](const sig::LinearCombination& s) {
                          for (auto& t : s.terms)
                            if (has_point_mass(t.second)) return true;
                          return false;
                        },
                        [](const sig::Pullback& s) { return has_point_mass(s.inner); },
                        [](const sig::ChirpMul& s) { return has_point_mass(s.inner); },
                        [](const sig::ShiftMod& s) { return has_point_mass(s.inner); },
                        [](const auto&) { return false; },
                    },
                    variant_of(u));
}

// ---------------------------------------------------------------------------
// Constructors

inline Signal point_mass(Vec x0, cplx weight = 1.0) {
  return make_signal(sig::PointMass{std::move(x0), weight});
}
inline Signal delta0(std::size_t d) { return point_mass(Vec::Zero(static_cast<Eigen::Index>(d))); }

inline Signal gaussian_packet(Vec x0, Vec xi0, double sigma, Mat B, cplx amplitude = 1.0) {
  if (x0.size() != xi0.size() || B.rows() != x0.size())
    throw DimensionError("gaussian_packet: inconsistent dimensions");
  if (!(sigma > 0.0)) throw ValidationError("gaussian_packet: sigma must be positive");
  Mat bs = checked_symmetric(B, "gaussian_packet chirp");
  return make_signal(sig::GaussianPacket{std::move(x0), std::move(xi0), sigma, bs, amplitude});
}

/// psi_0(x) = pi^{-d/4} e^{-|x|^2/2}
inline Signal psi0(std::size_t d = 1) {
  auto n = static_cast<Eigen::Index>(d);
  return gaussian_packet(Vec::Zero(n), Vec::Zero(n), 1.0, Mat::Zero(n, n));
}

/// 1-d packet shorthand: center, modulation, width, chirp.
inline Signal packet1(double x0, double xi0, double sigma = 1.0, double b = 0.0) {
  return gaussian_packet(Vec::Constant(1, x0), Vec::Constant(1, xi0), sigma, Mat::Constant(1, 1, b));
}

inline Signal constant(std::size_t d, cplx value = 1.0) { return make_signal(sig::Constant{value, d}); }

inline Signal chirp(Mat B, cplx amplitude = 1.0, std::optional<Vec> xi0 = std::nullopt) {
  Mat bs = checked_symmetric(B, "chirp");
  Vec lin = xi0 ? *xi0 : Vec::Zero(bs.rows());
  return make_signal(sig::Chirp{amplitude, bs, lin});
}
inline Signal chirp1(double b, cplx amplitude = 1.0) { return chirp(Mat::Constant(1, 1, b), amplitude); }

inline Signal analytic(std::string name, std::size_t d, std::function<cplx(std::span<const double>)> fn) {
  return make_signal(sig::Analytic{std::move(name), d, std::move(fn)});
}

inline Signal sampled(GridFunction f) { return make_signal(sig::Sampled{std::move(f)}); }

inline Signal tensor(Signal a, Signal b) {
  Signal t = make_signal(sig::TensorProduct{std::move(a), std::move(b)});
  if (depth(t) > 8) throw ValidationError("signal nesting depth exceeds 8");
  return t;
}

inline Signal linear_combination(std::vector<std::pair<cplx, Signal>> terms) {
  if (terms.empty()) throw ValidationError("linear_combination: no terms");
  std::size_t d = dim(terms.front().second);
  for (auto& t : terms)
    if (dim(t.second) != d) throw DimensionError("linear_combination: dimension mismatch");
  Signal s = make_signal(sig::LinearCombination{std::move(terms)});
  if (depth(s) > 8) throw ValidationError("signal nesting depth exceeds 8");
  return s;
}

inline Signal scaled(cplx c, Signal u) { return linear_combination({{c, std::move(u)}}); }

/// The zero signal of dimension d.
inline Signal zero_signal(std::size_t d) { return constant(d, 0.0); }

inline Signal pullback(Mat A, cplx scale, Signal inner) {
  if (static_cast<std::size_t>(A.rows()) != dim(inner)) throw DimensionError("pullback: dimension mismatch");
  check_invertible(A, "pullback");
  return make_signal(sig::Pullback{std::move(A), scale, std::move(inner)});
}
inline Signal chirp_mul(Mat B, Signal inner) {
  if (static_cast<std::size_t>(B.rows()) != dim(inner)) throw DimensionError("chirp_mul: dimension mismatch");
  return make_signal(sig::ChirpMul{checked_symmetric(B, "chirp_mul"), std::move(inner)});
}
inline Signal shift_mod(Vec x0, Vec xi0, Signal inner) {
  if (static_cast<std::size_t>(x0.size()) != dim(inner)) throw DimensionError("shift_mod: dimension mismatch");
  return make_signal(sig::ShiftMod{std::move(x0), std::move(xi0), std::move(inner)});
}

// ---------------------------------------------------------------------------
// Pointwise evaluation

namespace detail {

/// Periodic band-limited interpolation kernel for even N at fractional offset t.
inline double dirichlet(double t, std::size_t n) {
  double a = kPi * t;
  if (std::abs(std::sin(a)) < 1e-14) return (std::lround(t) % static_cast<long>(n) == 0) ? 1.0 : 0.0;
  return std::sin(a) / (static_cast<double>(n) * std::tan(a / static_cast<double>(n)));
}

inline cplx eval_sampled(const GridFunction& f, std::span<const double> x) {
  const GridSpec& s = f.spec;
  const std::size_t d = s.dim();
  std::vector<long> off(d);
  bool on_node = true;
  for (std::size_t j = 0; j < d; ++j) {
    double h = s.axis(j).step();
    double q = x[j] / h;
    off[j] = std::lround(q);
    if (std::abs(q - static_cast<double>(off[j])) > 1e-9) on_node = false;
    if (x[j] < -s.axis(j).half_width - 0.5 * h || x[j] >= s.axis(j).half_width - 0.5 * h) return 0.0;
  }
  if (on_node) {
    long flat = s.flat_from_offsets(off);
    return flat < 0 ? cplx{} : f.values[static_cast<std::size_t>(flat)];
  }
  // tensor-product trigonometric interpolation
  std::vector<std::vector<double>> w(d);
  for (std::size_t j = 0; j < d; ++j) {
    const Axis& a = s.axis(j);
    w[j].resize(a.samples);
    for (std::size_t k = 0; k < a.samples; ++k) w[j][k] = dirichlet((x[j] - a.node(k)) / a.step(), a.samples);
  }
  ComplexCompensatedSum acc;
  std::vector<std::size_t> idx(d);
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    s.unravel(flat, idx);
    double wt = 1.0;
    for (std::size_t j = 0; j < d; ++j) wt *= w[j][idx[j]];
    if (wt != 0.0) acc.add(wt * f.values[flat]);
  }
  return acc.value();
}

inline double quad_form(const Mat& B, std::span<const double> x) {
  double q = 0.0;
  for (Eigen::Index i = 0; i < B.rows(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j) q += x[static_cast<std::size_t>(i)] * B(i, j) * x[static_cast<std::size_t>(j)];
  return q;
}

}  // namespace detail

/// u(x) for signals without point masses.
inline cplx eval(const Signal& u, std::span<const double> x) {
  return std::visit(
      overloaded{
          [&](const sig::Sampled& s) { return detail::eval_sampled(s.f, x); },
          [&](const sig::PointMass&) -> cplx {
            throw UnsupportedSampling(
                "point masses cannot be evaluated pointwise; use the closed-form transform path");
          },
          [&](const sig::GaussianPacket& p) {
            const std::size_t d = x.size();
            double r2 = 0.0, lin = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              double y = x[j] - p.x0[static_cast<Eigen::Index>(j)];
              r2 += y * y;
              lin += y * p.xi0[static_cast<Eigen::Index>(j)];
            }
            double amp = std::pow(p.sigma, -0.5 * static_cast<double>(d)) *
                         std::pow(kPi, -0.25 * static_cast<double>(d)) *
                         std::exp(-r2 / (2.0 * p.sigma * p.sigma));
            return p.amplitude * amp * std::polar(1.0, lin + 0.5 * detail::quad_form(p.B, x));
          },
          [&](const sig::Constant& c) { return c.value; },
          [&](const sig::Chirp& c) {
            double lin = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) lin += x[j] * c.xi0[static_cast<Eigen::Index>(j)];
            return c.amplitude * std::polar(1.0, lin + 0.5 * detail::quad_form(c.B, x));
          },
          [&](const sig::Analytic& a) { return a.fn(x); },
          [&](const sig::TensorProduct& t) {
            std::size_t d1 = dim(t.first);
            return eval(t.first, x.subspan(0, d1)) * eval(t.second, x.subspan(d1));
          },
          [&](const sig::LinearCombination& l) {
            cplx s{};
            for (auto& [c, v] : l.terms) s += c * eval(v, x);
            return s;
          },
          [&](const sig::Pullback& p) {
            Vec y = p.A * to_vec(x);
            return p.scale * eval(p.inner, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
          },
          [&](const sig::ChirpMul& c) {
            return std::polar(1.0, 0.5 * detail::quad_form(c.B, x)) * eval(c.inner, x);
          },
          [&](const sig::ShiftMod& s) {
            std::vector<double> y(x.begin(), x.end());
            double lin = 0.0;
            for (std::size_t j = 0; j < y.size(); ++j) {
              y[j] -= s.x0[static_cast<Eigen::Index>(j)];
              lin += y[j] * s.xi0[static_cast<Eigen::Index>(j)];
            }
            return std::polar(1.0, lin) * eval(s.inner, y);
          },
      },
      variant_of(u));
}

inline cplx eval(const Signal& u, std::initializer_list<double> x) {
  std::vector<double> v(x);
  return eval(u, std::span<const double>(v));
}

/// Pointwise samples on the grid.
inline GridFunction sample(const Signal& u, const GridSpec& spec) {
  if (has_point_mass(u))
    throw UnsupportedSampling(
        "signal contains a point mass; sampling is unsupported, use the analytic transform path");
  if (dim(u) != spec.dim()) throw DimensionError("sample: signal/grid dimension mismatch");
  if (auto* s = std::get_if<sig::Sampled>(&variant_of(u)); s && s->f.spec == spec) return s->f;
  GridFunction out(spec);
  parallel_for(spec.size(), [&](std::size_t i) {
    std::vector<double> x(spec.dim());
    spec.point(i, x);
    out[i] = eval(u, x);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Point-mass normal form

/// Pushes Pullback/ChirpMul/ShiftMod wrappers through point masses so that
/// point masses only appear as leaves under LinearCombination or
/// TensorProduct nodes. Wrappers around point-mass-free subtrees are kept.
inline Signal normalize_point_masses(const Signal& u);

namespace detail {

inline std::pair<Mat, Mat> split_blocks(const Mat& m, Eigen::Index k) {
  return {m.topLeftCorner(k, k), m.bottomRightCorner(m.rows() - k, m.cols() - k)};
}

inline Signal push_wrapper(const detail::SignalVariant& wrapper, const Signal& inner) {
  Signal n = normalize_point_masses(inner);
  if (!has_point_mass(n)) {
    return std::visit(overloaded{
                          [&](const sig::Pullback& p) { return make_signal(sig::Pullback{p.A, p.scale, n}); },
                          [&](const sig::ChirpMul& c) { return make_signal(sig::ChirpMul{c.B, n}); },
                          [&](const sig::ShiftMod& s) { return make_signal(sig::ShiftMod{s.x0, s.xi0, n}); },
                          [&](const auto&) -> Signal { throw Error("push_wrapper: not a wrapper"); },
                      },
                      wrapper);
  }
  return std::visit(
      overloaded{
          [&](const sig::PointMass& pm) -> Signal {
            return std::visit(
                overloaded{
                    [&](const sig::Pullback& p) {
                      // s * delta_p(Ax) = s |A|^{-1} delta_{A^{-1}p}
                      Vec q = p.A.inverse() * pm.x0;
                      return point_mass(q, p.scale * pm.weight / std::abs(p.A.determinant()));
                    },
                    [&](const sig::ChirpMul& c) {
                      std::vector<double> x = to_std(pm.x0);
                      return point_mass(pm.x0, pm.weight * std::polar(1.0, 0.5 * quad_form(c.B, x)));
                    },
                    [&](const sig::ShiftMod& s) {
                      return point_mass(pm.x0 + s.x0, pm.weight * std::polar(1.0, pm.x0.dot(s.xi0)));
                    },
                    [&](const auto&) -> Signal { throw Error("push_wrapper: not a wrapper"); },
                },
                wrapper);
          },
          [&](const sig::LinearCombination& l) {
            std::vector<std::pair<cplx, Signal>> terms;
            for (auto& [c, v] : l.terms) terms.emplace_back(c, push_wrapper(wrapper, v));
            return make_signal(sig::LinearCombination{std::move(terms)});
          },
          [&](const sig::TensorProduct& t) -> Signal {
            auto k = static_cast<Eigen::Index>(dim(t.first));
            return std::visit(
                overloaded{
                    [&](const sig::Pullback& p) -> Signal {
                      if (!is_block_diagonal(p.A, k))
                        throw UnsupportedSampling("coordinate change couples a point-mass tensor factor");
                      auto [a1, a2] = split_blocks(p.A, k);
                      return tensor(push_wrapper(detail::SignalVariant(sig::Pullback{a1, p.scale, {}}), t.first),
                                    push_wrapper(detail::SignalVariant(sig::Pullback{a2, 1.0, {}}), t.second));
                    },
                    [&](const sig::ChirpMul& c) -> Signal {
                      if (!is_block_diagonal(c.B, k))
                        throw UnsupportedSampling("chirp couples a point-mass tensor factor");
                      auto [b1, b2] = split_blocks(c.B, k);
                      return tensor(push_wrapper(detail::SignalVariant(sig::ChirpMul{b1, {}}), t.first),
                                    push_wrapper(detail::SignalVariant(sig::ChirpMul{b2, {}}), t.second));
                    },
                    [&](const sig::ShiftMod& s) -> Signal {
                      return tensor(push_wrapper(detail::SignalVariant(sig::ShiftMod{s.x0.head(k), s.xi0.head(k), {}}), t.first),
                                    push_wrapper(detail::SignalVariant(sig::ShiftMod{s.x0.tail(s.x0.size() - k), s.xi0.tail(s.xi0.size() - k), {}}), t.second));
                    },
                    [&](const auto&) -> Signal { throw Error("push_wrapper: not a wrapper"); },
                },
                wrapper);
          },
          [&](const auto&) -> Signal { throw Error("push_wrapper: unexpected point-mass carrier"); },
      },
      variant_of(n));
}

}  // namespace detail

inline Signal normalize_point_masses(const Signal& u) {
  if (!has_point_mass(u)) return u;
  return std::visit(overloaded{
                        [&](const sig::TensorProduct& t) {
                          return make_signal(sig::TensorProduct{normalize_point_masses(t.first),
                                                                normalize_point_masses(t.second)});
                        },
                        [&](const sig::LinearCombination& l) {
                          std::vector<std::pair<cplx, Signal>> terms;
                          for (auto& [c, v] : l.terms) terms.emplace_back(c, normalize_point_masses(v));
                          return make_signal(sig::LinearCombination{std::move(terms)});
                        },
                        [&](const sig::Pullback& p) { return detail::push_wrapper(variant_of(u), p.inner); },
                        [&](const sig::ChirpMul& c) { return detail::push_wrapper(variant_of(u), c.inner); },
                        [&](const sig::ShiftMod& s) { return detail::push_wrapper(variant_of(u), s.inner); },
                        [&](const auto&) { return u; },
                    },
                    variant_of(u));
}

}  // namespace phasescope
