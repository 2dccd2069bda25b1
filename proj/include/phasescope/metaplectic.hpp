#pragma once

// Generators of the metaplectic representation acting on signals, on
// phase-space points and on transforms.

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "identities.hpp"

namespace phasescope {

namespace meta {
struct CoordChange {
  Mat A;
};
struct FourierRot {
  std::size_t dim = 1;
};
struct Shear {
  Mat B;
};
struct Shift {
  Vec x0, xi0;
};
}  // namespace meta

using Generator = std::variant<meta::CoordChange, meta::FourierRot, meta::Shear, meta::Shift>;

inline std::size_t generator_dim(const Generator& g) {
  return std::visit(overloaded{
                        [](const meta::CoordChange& c) { return static_cast<std::size_t>(c.A.rows()); },
                        [](const meta::FourierRot& f) { return f.dim; },
                        [](const meta::Shear& s) { return static_cast<std::size_t>(s.B.rows()); },
                        [](const meta::Shift& s) { return static_cast<std::size_t>(s.x0.size()); },
                    },
                    g);
}

inline std::string generator_name(const Generator& g) {
  return std::visit(overloaded{
                        [](const meta::CoordChange&) { return std::string("coord_change"); },
                        [](const meta::FourierRot&) { return std::string("fourier_rot"); },
                        [](const meta::Shear&) { return std::string("shear"); },
                        [](const meta::Shift&) { return std::string("shift"); },
                    },
                    g);
}

/// An ordered list of generators; the first one acts first.
class MetaplecticElement {
 public:
  static constexpr std::size_t kMaxLength = 16;

  explicit MetaplecticElement(std::vector<Generator> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw ValidationError("metaplectic element: empty composition");
    if (steps_.size() > kMaxLength) throw ValidationError("metaplectic element: composition longer than 16");
    dim_ = generator_dim(steps_.front());
    for (auto& s : steps_)
      if (generator_dim(s) != dim_) throw DimensionError("metaplectic element: generators of different dimension");
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Generator>& steps() const { return steps_; }
  bool is_composition() const { return steps_.size() > 1; }

 private:
  std::vector<Generator> steps_;
  std::size_t dim_ = 0;
};

inline MetaplecticElement coord_change(Mat A) {
  if (A.rows() != A.cols()) throw DimensionError("coord_change: A must be square");
  check_invertible(A, "coord_change");
  return MetaplecticElement({meta::CoordChange{std::move(A)}});
}
inline MetaplecticElement fourier_rot(std::size_t d = 1) { return MetaplecticElement({meta::FourierRot{d}}); }
inline MetaplecticElement shear(const Mat& B) { return MetaplecticElement({meta::Shear{checked_symmetric(B, "shear")}}); }
inline MetaplecticElement shift(Vec x0, Vec xi0) {
  if (x0.size() != xi0.size()) throw DimensionError("shift: x0 and xi0 differ in length");
  return MetaplecticElement({meta::Shift{std::move(x0), std::move(xi0)}});
}
inline MetaplecticElement compose(const std::vector<MetaplecticElement>& parts) {
  std::vector<Generator> all;
  for (auto& p : parts) all.insert(all.end(), p.steps().begin(), p.steps().end());
  return MetaplecticElement(std::move(all));
}

// ---------------------------------------------------------------------------
// Action on phase space

using PhasePoint = std::vector<double>;  // (x, xi)

namespace detail {

inline std::pair<Vec, Vec> split_point(const PhasePoint& z, std::size_t d) {
  if (z.size() != 2 * d) throw DimensionError("phase-space point has the wrong dimension");
  Vec x(static_cast<Eigen::Index>(d)), xi(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    x[static_cast<Eigen::Index>(j)] = z[j];
    xi[static_cast<Eigen::Index>(j)] = z[d + j];
  }
  return {x, xi};
}

inline PhasePoint join_point(const Vec& x, const Vec& xi) {
  PhasePoint z(to_std(x));
  z.insert(z.end(), xi.data(), xi.data() + xi.size());
  return z;
}

inline PhasePoint generator_point(const Generator& g, const PhasePoint& z) {
  const std::size_t d = generator_dim(g);
  auto [x, xi] = split_point(z, d);
  return std::visit(overloaded{
                        [&](const meta::CoordChange& c) {
                          return join_point(c.A.partialPivLu().solve(x), c.A.transpose() * xi);
                        },
                        [&](const meta::FourierRot&) { return join_point(xi, -x); },
                        [&](const meta::Shear& s) { return join_point(x, xi + s.B * x); },
                        [&](const meta::Shift& s) { return join_point(x + s.x0, xi + s.xi0); },
                    },
                    g);
}

}  // namespace detail

/// The action of the element on T*R^d.
inline PhasePoint apply_point(const MetaplecticElement& op, PhasePoint z) {
  for (auto& g : op.steps()) z = detail::generator_point(g, z);
  return z;
}

/// sigma((x, xi), (y, eta)) = <y, xi> - <x, eta>
inline double symplectic_form(const PhasePoint& a, const PhasePoint& b) {
  const std::size_t d = a.size() / 2;
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) s += b[j] * a[d + j] - a[j] * b[d + j];
  return s;
}

// ---------------------------------------------------------------------------
// Action on signals

namespace detail {

inline double abs_det(const Mat& A) { return std::abs(A.determinant()); }

/// sqrt(c) I == A^t A for some c > 0
inline std::optional<double> conformal_factor(const Mat& A) {
  Mat G = A.transpose() * A;
  double c2 = G.trace() / static_cast<double>(G.rows());
  if ((G - c2 * Mat::Identity(G.rows(), G.cols())).norm() > 1e-13 * c2) return std::nullopt;
  return std::sqrt(c2);
}

inline Signal shift_signal(const meta::Shift& s, const Signal& u);
inline Signal shear_signal(const Mat& B, const Signal& u);
inline Signal coord_signal(const Mat& A, const Signal& u);
inline Signal fourier_signal(const Signal& u);

inline Signal shift_signal(const meta::Shift& s, const Signal& u) {
  const Vec& a = s.x0;
  const Vec& b = s.xi0;
  return std::visit(
      overloaded{
          [&](const sig::GaussianPacket& p) {
            Vec X = p.x0 + a, Xi = p.xi0 + b - p.B * a;
            double ph = p.x0.dot(b) - p.x0.dot(p.B * a) - 0.5 * a.dot(p.B * a);
            return gaussian_packet(X, Xi, p.sigma, p.B, p.amplitude * std::polar(1.0, ph));
          },
          [&](const sig::Chirp& c) {
            Vec Xi = c.xi0 + b - c.B * a;
            double ph = -a.dot(b) - a.dot(c.xi0) + 0.5 * a.dot(c.B * a);
            return chirp(c.B, c.amplitude * std::polar(1.0, ph), Xi);
          },
          [&](const sig::Constant& c) {
            if (b.isZero(0.0)) return u;
            return chirp(Mat::Zero(a.size(), a.size()), c.value * std::polar(1.0, -a.dot(b)), b);
          },
          [&](const sig::PointMass& p) { return point_mass(p.x0 + a, p.weight * std::polar(1.0, p.x0.dot(b))); },
          [&](const sig::TensorProduct& t) {
            auto k = static_cast<Eigen::Index>(dim(t.first));
            auto r = a.size() - k;
            return tensor(shift_signal({a.head(k), b.head(k)}, t.first), shift_signal({a.tail(r), b.tail(r)}, t.second));
          },
          [&](const sig::LinearCombination& l) {
            std::vector<std::pair<cplx, Signal>> terms;
            for (auto& [c, v] : l.terms) terms.emplace_back(c, shift_signal(s, v));
            return linear_combination(std::move(terms));
          },
          [&](const auto&) { return shift_mod(a, b, u); },
      },
      variant_of(u));
}

inline Signal shear_signal(const Mat& B, const Signal& u) {
  return std::visit(
      overloaded{
          [&](const sig::GaussianPacket& p) { return gaussian_packet(p.x0, p.xi0, p.sigma, p.B + B, p.amplitude); },
          [&](const sig::Chirp& c) { return chirp(c.B + B, c.amplitude, c.xi0); },
          [&](const sig::Constant& c) { return chirp(B, c.value); },
          [&](const sig::PointMass& p) { return point_mass(p.x0, p.weight * std::polar(1.0, 0.5 * p.x0.dot(B * p.x0))); },
          [&](const sig::TensorProduct& t) {
            auto k = static_cast<Eigen::Index>(dim(t.first));
            if (!is_block_diagonal(B, k)) return chirp_mul(B, u);
            auto r = B.rows() - k;
            return tensor(shear_signal(B.topLeftCorner(k, k), t.first), shear_signal(B.bottomRightCorner(r, r), t.second));
          },
          [&](const sig::LinearCombination& l) {
            std::vector<std::pair<cplx, Signal>> terms;
            for (auto& [c, v] : l.terms) terms.emplace_back(c, shear_signal(B, v));
            return linear_combination(std::move(terms));
          },
          [&](const sig::ChirpMul& c) { return chirp_mul(c.B + B, c.inner); },
          [&](const auto&) { return chirp_mul(B, u); },
      },
      variant_of(u));
}

inline Signal coord_signal(const Mat& A, const Signal& u) {
  const double det = abs_det(A);
  const double root = std::sqrt(det);
  return std::visit(
      overloaded{
          [&](const sig::GaussianPacket& p) {
            auto c = conformal_factor(A);
            if (!c) return pullback(A, root, u);
            Vec X = A.partialPivLu().solve(p.x0);
            return gaussian_packet(X, A.transpose() * p.xi0, p.sigma / *c, A.transpose() * p.B * A, p.amplitude);
          },
          [&](const sig::Chirp& c) { return chirp(A.transpose() * c.B * A, c.amplitude * root, A.transpose() * c.xi0); },
          [&](const sig::Constant& c) { return constant(c.dim, c.value * root); },
          [&](const sig::PointMass& p) { return point_mass(A.partialPivLu().solve(p.x0), p.weight / root); },
          [&](const sig::TensorProduct& t) {
            auto k = static_cast<Eigen::Index>(dim(t.first));
            if (!is_block_diagonal(A, k)) return pullback(A, root, u);
            auto r = A.rows() - k;
            return tensor(coord_signal(A.topLeftCorner(k, k), t.first), coord_signal(A.bottomRightCorner(r, r), t.second));
          },
          [&](const sig::LinearCombination& l) {
            std::vector<std::pair<cplx, Signal>> terms;
            for (auto& [c, v] : l.terms) terms.emplace_back(c, coord_signal(A, v));
            return linear_combination(std::move(terms));
          },
          [&](const auto&) { return pullback(A, root, u); },
      },
      variant_of(u));
}

/// Fourier transform of a chirped isotropic packet, via the Gaussian integral
/// with complex quadratic form M = I/sigma^2 - iB.
inline Signal fourier_chirped_packet(const sig::GaussianPacket& p) {
  const auto d = p.x0.size();
  using CMat = Eigen::MatrixXcd;
  using CVec = Eigen::VectorXcd;
  CMat M = CMat::Identity(d, d) / (p.sigma * p.sigma) - cplx(0, 1) * p.B.cast<cplx>();
  CMat Minv = M.inverse();
  Eigen::SelfAdjointEigenSolver<Mat> es(p.B);
  cplx det_root = 1.0;
  for (Eigen::Index j = 0; j < d; ++j) det_root *= std::sqrt(cplx(1.0 / (p.sigma * p.sigma), -es.eigenvalues()[j]));
  CVec b = p.x0.cast<cplx>() / (p.sigma * p.sigma) + cplx(0, 1) * p.xi0.cast<cplx>();
  cplx c0 = -0.5 * p.x0.squaredNorm() / (p.sigma * p.sigma) - cplx(0, 1) * p.x0.dot(p.xi0);
  cplx K = p.amplitude * std::pow(p.sigma, -0.5 * static_cast<double>(d)) * std::pow(kPi, -0.25 * static_cast<double>(d)) /
           det_root;
  return analytic("fourier(packet)", static_cast<std::size_t>(d), [=](std::span<const double> xi) {
    CVec v = b;
    for (Eigen::Index j = 0; j < d; ++j) v[j] -= cplx(0, 1) * xi[static_cast<std::size_t>(j)];
    cplx q = (v.transpose() * Minv * v)(0, 0);
    return K * std::exp(0.5 * q + c0);
  });
}

inline std::size_t fourier_resample_points(std::size_t d) { return d == 1 ? 256 : d == 2 ? 64 : 16; }

inline Signal fourier_signal(const Signal& u) {
  const std::size_t d = dim(u);
  const double two_pi_d = std::pow(2.0 * kPi, 0.5 * static_cast<double>(d));
  return std::visit(
      overloaded{
          [&](const sig::GaussianPacket& p) {
            if (!p.B.isZero(0.0)) return fourier_chirped_packet(p);
            return gaussian_packet(p.xi0, -p.x0, 1.0 / p.sigma, p.B, p.amplitude * std::polar(1.0, -p.x0.dot(p.xi0)));
          },
          [&](const sig::Constant& c) {
            return point_mass(Vec::Zero(static_cast<Eigen::Index>(d)), c.value * two_pi_d);
          },
          [&](const sig::Chirp& c) {
            if (c.B.isZero(0.0)) return point_mass(c.xi0, c.amplitude * two_pi_d);
            Eigen::SelfAdjointEigenSolver<Mat> es(c.B);
            cplx root = 1.0;
            for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
              double beta = es.eigenvalues()[j];
              if (std::abs(beta) < 1e-12 * c.B.norm())
                throw UnsupportedSampling("Fourier transform of a chirp with singular nonzero B");
              root *= std::sqrt(cplx(0.0, -beta));
            }
            Mat Binv = c.B.inverse();
            cplx amp = c.amplitude / root * std::polar(1.0, -0.5 * c.xi0.dot(Binv * c.xi0));
            return chirp(Mat(-Binv), amp, Vec(Binv * c.xi0));
          },
          [&](const sig::PointMass& p) {
            return chirp(Mat::Zero(p.x0.size(), p.x0.size()), p.weight / two_pi_d, Vec(-p.x0));
          },
          [&](const sig::TensorProduct& t) { return tensor(fourier_signal(t.first), fourier_signal(t.second)); },
          [&](const sig::LinearCombination& l) {
            std::vector<std::pair<cplx, Signal>> terms;
            for (auto& [c, v] : l.terms) terms.emplace_back(c, fourier_signal(v));
            return linear_combination(std::move(terms));
          },
          [&](const sig::ShiftMod& s) {
            // F T_a M_b = e^{-i<a,b>} T_b M_{-a} F
            return scaled(std::polar(1.0, -s.x0.dot(s.xi0)), shift_mod(s.xi0, Vec(-s.x0), fourier_signal(s.inner)));
          },
          [&](const sig::Sampled& s) { return sampled(fourier(s.f)); },
          [&](const auto&) {
            if (has_point_mass(u)) throw UnsupportedSampling("Fourier transform of this point-mass expression");
            return sampled(fourier(sample(u, balanced_grid(d, fourier_resample_points(d)))));
          },
      },
      variant_of(u));
}

}  // namespace detail

inline Signal apply_signal(const Generator& g, const Signal& u) {
  if (generator_dim(g) != dim(u)) throw DimensionError("apply_signal: dimension mismatch");
  return std::visit(overloaded{
                        [&](const meta::CoordChange& c) { return detail::coord_signal(c.A, u); },
                        [&](const meta::FourierRot&) { return detail::fourier_signal(u); },
                        [&](const meta::Shear& s) { return detail::shear_signal(s.B, u); },
                        [&](const meta::Shift& s) { return detail::shift_signal(s, u); },
                    },
                    g);
}

/// mu(chi) u, generators applied in list order.
inline Signal apply_signal(const MetaplecticElement& op, Signal u) {
  for (auto& g : op.steps()) u = apply_signal(g, u);
  return u;
}

// ---------------------------------------------------------------------------
// Action on transforms

/// T_g(mu u)(z) = factor * T_{g'} u(z') for a single generator.
struct TransformRule {
  cplx factor;
  PhasePoint point;
};

inline Window rule_window(const Generator& gen, const Window& g) {
  return std::visit(overloaded{
                        [&](const meta::CoordChange& c) { return window_pullback(g, c.A); },
                        [&](const meta::FourierRot&) { return window_inverse_fourier(g); },
                        [&](const meta::Shear& s) { return window_chirp(g, s.B); },
                        [&](const meta::Shift&) { return g; },
                    },
                    gen);
}

inline TransformRule rule_point(const Generator& gen, const PhasePoint& z) {
  const std::size_t d = generator_dim(gen);
  auto [x, xi] = detail::split_point(z, d);
  return std::visit(overloaded{
                        [&](const meta::CoordChange& c) {
                          return TransformRule{1.0 / std::sqrt(detail::abs_det(c.A)),
                                               detail::join_point(c.A * x, c.A.transpose().partialPivLu().solve(xi))};
                        },
                        [&](const meta::FourierRot&) {
                          return TransformRule{std::polar(1.0, x.dot(xi)), detail::join_point(-xi, x)};
                        },
                        [&](const meta::Shear& s) {
                          return TransformRule{std::polar(1.0, 0.5 * x.dot(s.B * x)), detail::join_point(x, xi - s.B * x)};
                        },
                        [&](const meta::Shift& s) {
                          return TransformRule{std::polar(1.0, s.xi0.dot(x - s.x0)), detail::join_point(x - s.x0, xi - s.xi0)};
                        },
                    },
                    gen);
}

/// The window g' with T_g(mu u) expressed through T_{g'} u.
inline Window rule_window(const MetaplecticElement& op, Window g) {
  for (auto it = op.steps().rbegin(); it != op.steps().rend(); ++it) g = rule_window(*it, g);
  return g;
}

inline TransformRule rule_point(const MetaplecticElement& op, PhasePoint z) {
  cplx f = 1.0;
  for (auto it = op.steps().rbegin(); it != op.steps().rend(); ++it) {
    TransformRule r = rule_point(*it, z);
    f *= r.factor;
    z = std::move(r.point);
  }
  return {f, z};
}

struct CovarianceOptions {
  std::optional<GridSpec> grid;  // default_grid(d) when unset
  double interior = 0.6;
  std::size_t probes_per_axis = 0;  // 0: 21 for d = 1, 4 otherwise
  std::optional<QuadratureOptions> quadrature;  // step 0.04 for d = 1, 0.08 otherwise
};

/// max |T_g(mu u) - factor T_{g'} u(z')| / max |T_g(mu u)| over centered probes.
inline double covariance_check(const MetaplecticElement& op, const Signal& u, const Window& g,
                               CovarianceOptions opt = {}) {
  const std::size_t d = dim(u);
  if (op.dim() != d || g.dim() != d) throw DimensionError("covariance_check: dimension mismatch");
  GridSpec grid = opt.grid ? *opt.grid : default_grid(d);
  std::size_t n = opt.probes_per_axis ? opt.probes_per_axis : (d == 1 ? 21 : 4);
  QuadratureOptions q = opt.quadrature ? *opt.quadrature : QuadratureOptions{9.0, d == 1 ? 0.04 : 0.08};
  PhaseSpaceField lhs = transform(apply_signal(op, u), g, grid);
  auto probes = detail::probe_lattice(lhs, opt.interior, n);
  PointEvaluator ev(u, rule_window(op, g), q);
  std::vector<cplx> a(probes.size()), b(probes.size());
  parallel_for(probes.size(), [&](std::size_t k) {
    PhasePoint z = lhs.point(probes[k]);
    TransformRule r = rule_point(op, z);
    std::span<const double> zp(r.point);
    a[k] = lhs.values[probes[k]];
    b[k] = r.factor * ev(zp.subspan(0, d), zp.subspan(d));
  });
  std::vector<std::size_t> all(probes.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return max_relative_error(b, a, all);
}

/// T_g u(x1,x2,xi1,xi2) = e^{i<x2,xi2>} T_{F2 g} F2 u(x1,xi2,xi1,-x2), F2 acting on
/// the last d - n variables. Both sides live on grid nodes.
inline double partial_fourier_covariance_check(const Signal& u, std::size_t n, std::optional<Window> window = {},
                                               std::optional<GridSpec> grid = {}, double interior = 0.6) {
  const std::size_t d = dim(u);
  if (n > d) throw ValidationError("partial_fourier_covariance_check: split n must satisfy 0 <= n <= d");
  Window g = window ? *window : standard_gaussian(d);
  GridSpec spec = grid ? *grid : default_grid(d);
  std::vector<std::size_t> axes2;
  for (std::size_t j = n; j < d; ++j) axes2.push_back(j);
  PhaseSpaceField lhs = transform(u, g, spec);
  GridFunction f2 = partial_fourier(sample(u, spec), axes2);
  PhaseSpaceField rhs = transform(sampled(f2), window_fourier(g, axes2), f2.spec);
  const GridSpec pl = lhs.phase_spec(), pr = rhs.phase_spec();
  std::vector<std::size_t> probes = interior_probes(lhs, interior);
  std::vector<cplx> b(lhs.size());
  parallel_for(probes.size(), [&](std::size_t k) {
    std::vector<std::size_t> il(2 * d), ir(2 * d);
    pl.unravel(probes[k], il);
    double phase = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (j < n) {
        ir[j] = il[j];
        ir[d + j] = il[d + j];
      } else {
        std::size_t N = spec.axis(j).samples;
        ir[j] = il[d + j];
        ir[d + j] = (N - il[j]) % N;
        phase += spec.axis(j).node(il[j]) * lhs.xi_spec.axis(j).node(il[d + j]);
      }
    }
    b[probes[k]] = std::polar(1.0, phase) * rhs.values[pr.ravel(ir)];
  });
  return max_relative_error(b, lhs.values, probes);
}

}  // namespace phasescope
