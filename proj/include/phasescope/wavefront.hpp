#pragma once

// Gabor wave-front sets estimated from conic decay of the transform,
// containment in conormal spaces, symplectic transport and microlocality.

#include "conormal.hpp"
#include "decay.hpp"
#include "weyl.hpp"

namespace phasescope {

struct WaveFrontParams {
  double aperture_deg = 0.0;  // full cone opening; 0: 10 degrees in d = 1, 60 in d = 2
  double threshold = 4.0;     // IN iff the fitted exponent exceeds -threshold
  double r_min = 3.0;
  double r_max = 0.0;  // 0: 0.8 of the grid extent
  std::size_t directions = 0;  // 0: 64 in d = 1, 512 in d = 2
  std::size_t shells = 8;
  double floor_rel = 1e-11;
  std::size_t min_nodes = 8;  // per shell and cone
  std::optional<GridSpec> grid;
};

/// Exponents of cones whose data sinks below the floor within two shells.
inline constexpr double kRapidDecay = -100.0;

struct WaveFrontReport {
  std::size_t d = 0;
  std::vector<Vec> directions;
  std::vector<double> exponents;
  std::vector<bool> in;
  double aperture_deg = 0.0, threshold = 0.0, r_min = 0.0, r_max = 0.0;
  std::string provenance;

  std::vector<Vec> in_directions() const {
    std::vector<Vec> out;
    for (std::size_t k = 0; k < directions.size(); ++k)
      if (in[k]) out.push_back(directions[k]);
    return out;
  }
};

/// Quasi-uniform unit vectors: equally spaced angles on S^1 (so the axes and
/// diagonals are included), a super-Fibonacci spiral on S^3.
inline std::vector<Vec> sphere_directions(std::size_t d, std::size_t n) {
  std::vector<Vec> out;
  if (d == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      double t = 2 * kPi * static_cast<double>(k) / static_cast<double>(n);
      Vec v(2);
      v << std::cos(t), std::sin(t);
      // exact zeros on the axes
      for (Eigen::Index j = 0; j < 2; ++j)
        if (std::abs(v[j]) < 1e-15) v[j] = 0.0;
      out.push_back(v);
    }
    return out;
  }
  if (d == 2) {
    const double phi = std::sqrt(2.0), psi = 1.533751168755204288118041;
    for (std::size_t k = 0; k < n; ++k) {
      double s = static_cast<double>(k) + 0.5;
      double r = std::sqrt(s / static_cast<double>(n)), R = std::sqrt(1.0 - s / static_cast<double>(n));
      double a = 2 * kPi * s / phi, b = 2 * kPi * s / psi;
      Vec v(4);
      v << r * std::sin(a), r * std::cos(a), R * std::sin(b), R * std::cos(b);
      out.push_back(v);
    }
    return out;
  }
  throw DimensionError("sphere_directions: only d <= 2 is supported");
}

inline double angle_between(const Vec& a, const Vec& b) {
  return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
}

/// Angle between a direction and the unit sphere of a linear subspace with
/// orthonormal basis Q.
inline double angle_to_subspace(const Vec& w, const Mat& Q) {
  if (Q.cols() == 0) return kPi / 2;
  return std::acos(std::clamp((Q.transpose() * w).norm() / w.norm(), 0.0, 1.0));
}

namespace detail {

inline WaveFrontParams resolved(WaveFrontParams p, std::size_t d) {
  if (p.aperture_deg <= 0) p.aperture_deg = d == 1 ? 10.0 : 60.0;
  if (p.directions == 0) p.directions = d == 1 ? 64 : 512;
  if (!(p.aperture_deg < 180)) throw ValidationError("wavefront: aperture must be below 180 degrees");
  if (!(p.threshold > 0)) throw ValidationError("wavefront: threshold must be positive");
  return p;
}

inline GridSpec wavefront_grid(std::size_t d) { return conormal_grid(d); }

}  // namespace detail

/// Cone-wise decay of |T_g u| over shells in [r_min, r_max].
inline WaveFrontReport wf_from_field(const PhaseSpaceField& F, WaveFrontParams p = {}) {
  const std::size_t d = F.dim();
  p = detail::resolved(p, d);
  const double extent = field_extent(F);
  if (p.r_max <= 0) p.r_max = 0.8 * extent;
  if (p.r_max > 0.8 * extent + 1e-12 || !(p.r_min > 0) || !(p.r_min < p.r_max))
    throw ValidationError("wavefront: radii must satisfy 0 < r_min < r_max <= 0.8 extent");

  // nodes inside the radial range as (unit direction, radius, |F|)
  struct Node {
    Vec w;
    double r, v;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto z = F.point(i);
    Vec zv = to_vec(z);
    double r = zv.norm();
    if (r >= p.r_min && r <= p.r_max) nodes.push_back({zv / r, r, std::abs(F.values[i])});
  }
  const double floor_abs = p.floor_rel * max_abs(F.values);
  const double cos_half = std::cos(0.5 * p.aperture_deg * kPi / 180.0);

  WaveFrontReport rep;
  rep.d = d;
  rep.directions = sphere_directions(d, p.directions);
  rep.exponents.resize(rep.directions.size());
  rep.in.resize(rep.directions.size());
  rep.aperture_deg = p.aperture_deg;
  rep.threshold = p.threshold;
  rep.r_min = p.r_min;
  rep.r_max = p.r_max;
  rep.provenance = F.provenance;
  std::vector<std::string> starved(rep.directions.size());
  parallel_for(rep.directions.size(), [&](std::size_t k) {
    const Vec& om = rep.directions[k];
    std::vector<std::pair<double, double>> smp;
    for (auto& n : nodes)
      if (n.w.dot(om) >= cos_half - 1e-12) smp.emplace_back(n.r, n.v);
    if (smp.empty()) {
      starved[k] = "empty cone";
      return;
    }
    ShellFit fit = fit_shells(smp, p.r_min, p.r_max, p.shells, floor_abs);
    for (int c : fit.counts)
      if (c < static_cast<int>(p.min_nodes)) {
        starved[k] = std::to_string(c) + " nodes in a shell";
        return;
      }
    double e = std::isfinite(fit.exponent) ? std::max(fit.exponent, kRapidDecay) : kRapidDecay;
    rep.exponents[k] = e;
    rep.in[k] = e > -p.threshold;
  });
  for (auto& s : starved)
    if (!s.empty()) throw ValidationError("wavefront: cone sample starvation (" + s + "); widen the aperture");
  return rep;
}

inline WaveFrontReport wf_estimate(const Signal& u, const Window& g, const WaveFrontParams& p = {}) {
  const GridSpec grid = p.grid ? *p.grid : detail::wavefront_grid(dim(u));
  return wf_from_field(transform(u, g, grid), p);
}

// ---------------------------------------------------------------------------
// Containment

struct ContainmentReport {
  bool verdict = true;
  double tolerance_deg = 0.0;
  double worst_deg = 0.0;  // largest angle of an IN direction from N(Y)
  std::vector<Vec> outside;
};

/// Every IN direction within aperture + 5 degrees of the unit sphere of N(Y).
inline ContainmentReport containment_check(const WaveFrontReport& r, const SubspaceSpec& Y) {
  if (Y.d != r.d) throw DimensionError("containment_check: dimension mismatch");
  ContainmentReport c;
  c.tolerance_deg = r.aperture_deg + 5.0;
  const Mat N = Y.conormal_basis();
  for (auto& w : r.in_directions()) {
    double a = angle_to_subspace(w, N) * 180.0 / kPi;
    c.worst_deg = std::max(c.worst_deg, a);
    if (a > c.tolerance_deg) c.outside.push_back(w);
  }
  c.verdict = c.outside.empty();
  return c;
}

// ---------------------------------------------------------------------------
// Direction-set comparison

struct DirectionSetComparison {
  bool verdict = true;
  double tolerance_deg = 0.0;
  std::size_t unmatched_expected = 0;  // expected directions with no IN direction nearby
  std::size_t unmatched_actual = 0;    // IN directions with no expected direction nearby
};

/// Two direction sets agree when each element lies within the tolerance of
/// some element of the other.
inline DirectionSetComparison compare_directions(const std::vector<Vec>& expected, const std::vector<Vec>& actual,
                                                 double tolerance_deg) {
  DirectionSetComparison c;
  c.tolerance_deg = tolerance_deg;
  const double tol = tolerance_deg * kPi / 180.0;
  auto near = [&](const Vec& w, const std::vector<Vec>& set) {
    for (auto& v : set)
      if (angle_between(w, v) <= tol) return true;
    return false;
  };
  for (auto& w : expected) c.unmatched_expected += !near(w, actual);
  for (auto& w : actual) c.unmatched_actual += !near(w, expected);
  c.verdict = c.unmatched_expected == 0 && c.unmatched_actual == 0;
  return c;
}

/// Linear part of chi applied to a direction, i.e. chi at infinity.
inline Vec transport_direction(const MetaplecticElement& chi, const Vec& w) {
  constexpr double R = 1e8;
  PhasePoint z(static_cast<std::size_t>(w.size()));
  for (Eigen::Index j = 0; j < w.size(); ++j) z[static_cast<std::size_t>(j)] = R * w[j];
  PhasePoint o(z.size(), 0.0);
  Vec a = to_vec(apply_point(chi, z)), b = to_vec(apply_point(chi, o));
  return (a - b).normalized();
}

struct TransportReport {
  DirectionSetComparison comparison;
  WaveFrontReport before, after;
  bool verdict = true;
};

/// WF(mu(chi) u) against chi(WF(u)).
inline TransportReport transport_check(const Signal& u, const MetaplecticElement& chi, const Window& g,
                                       const WaveFrontParams& p = {}) {
  if (chi.dim() != dim(u)) throw DimensionError("transport_check: dimension mismatch");
  TransportReport t;
  t.before = wf_estimate(u, g, p);
  t.after = wf_estimate(apply_signal(chi, u), g, p);
  std::vector<Vec> mapped;
  for (auto& w : t.before.in_directions()) mapped.push_back(transport_direction(chi, w));
  t.comparison = compare_directions(mapped, t.after.in_directions(), t.before.aperture_deg + 5.0);
  t.verdict = t.comparison.verdict;
  return t;
}

// ---------------------------------------------------------------------------
// Microlocality

/// Schwartz windows with Gaussian decay; compactly supported bumps decay too
/// slowly in frequency for the finite radial range.
inline std::vector<Window> wavefront_windows() {
  return {standard_gaussian(1), gaussian_window({0.8}, 1.0), window_moment(standard_gaussian(1), {1})};
}

/// Smallest order on lo, lo + step, .. hi at which membership passes, or
/// nullopt when none does.
inline std::optional<double> order_threshold(const Signal& u, const SubspaceSpec& Y, const Window& g, double lo,
                                             double hi, double step, const ConormalOptions& opt = {}) {
  if (!(step > 0) || !(hi >= lo)) throw ValidationError("order_threshold: need step > 0 and hi >= lo");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    double m = lo + step * static_cast<double>(k);
    if (membership_test(u, Y, m, 1.0, g, 2, 4, opt).verdict) return m;
  }
  return std::nullopt;
}

/// Grid representation of u: samples, with a point mass at a node replaced by
/// weight / h^d at that node.
inline GridFunction grid_signal(const Signal& u, const GridSpec& base) {
  if (!has_point_mass(u)) return sample(u, base);
  const Signal n = normalize_point_masses(u);
  const auto& v = variant_of(n);
  if (auto* pm = std::get_if<sig::PointMass>(&v)) {
    GridFunction f(base);
    std::vector<long> off(base.dim());
    for (std::size_t j = 0; j < base.dim(); ++j) {
      double q = pm->x0[static_cast<Eigen::Index>(j)] / base.axis(j).step();
      off[j] = std::lround(q);
      if (std::abs(q - static_cast<double>(off[j])) > 1e-9)
        throw UnsupportedSampling("grid_signal: point mass off the grid nodes");
    }
    long flat = base.flat_from_offsets(off);
    if (flat < 0) throw UnsupportedSampling("grid_signal: point mass outside the grid");
    f[static_cast<std::size_t>(flat)] = pm->weight / base.cell_volume();
    return f;
  }
  if (auto* l = std::get_if<sig::LinearCombination>(&v)) {
    GridFunction f(base);
    for (auto& [c, s] : l->terms) {
      GridFunction t = grid_signal(s, base);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] += c * t[i];
    }
    return f;
  }
  if (auto* t = std::get_if<sig::TensorProduct>(&v)) {
    const auto k = static_cast<long>(dim(t->first));
    GridSpec ga(std::vector<Axis>(base.axes().begin(), base.axes().begin() + k));
    GridSpec gb(std::vector<Axis>(base.axes().begin() + k, base.axes().end()));
    GridFunction a = grid_signal(t->first, ga), b = grid_signal(t->second, gb), f(base);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) f[i * b.size() + j] = a[i] * b[j];
    return f;
  }
  throw UnsupportedSampling("grid_signal: point masses only inside tensors and linear combinations");
}

struct MicrolocalityReport {
  bool contained = true;   // WF(a^w u) within WF(u)
  std::size_t violations = 0;
  WaveFrontReport before, after;
  std::optional<bool> conormal_preserved;  // membership at m + m' whenever at m
  bool verdict = true;
};

/// WF(a^w u) against WF(u) on the symbol's base grid; with Y and m given,
/// also membership of a^w u at order m + a.m whenever u passes at m.
inline MicrolocalityReport microlocality_check(const SymbolGrid& a, const Signal& u, const Window& g,
                                               const WaveFrontParams& p = {},
                                               std::optional<std::pair<SubspaceSpec, double>> conormal = {}) {
  if (a.dim() % 2 != 0 || a.dim() / 2 != dim(u)) throw DimensionError("microlocality_check: dimension mismatch");
  const GridSpec base = weyl_base_grid(a.spec);
  GridFunction f = grid_signal(u, base);
  GridFunction Af = apply_weyl(a, f);
  MicrolocalityReport rep;
  WaveFrontParams q = p;
  q.grid = base;
  rep.before = wf_from_field(transform(sampled(f), g, base), q);
  rep.after = wf_from_field(transform(sampled(Af), g, base), q);
  const double tol = (rep.before.aperture_deg + 5.0) * kPi / 180.0;
  auto in_u = rep.before.in_directions();
  for (auto& w : rep.after.in_directions()) {
    bool ok = false;
    for (auto& v : in_u) ok = ok || angle_between(w, v) <= tol;
    rep.violations += !ok;
  }
  rep.contained = rep.violations == 0;
  if (conormal) {
    auto& [Y, m] = *conormal;
    ConormalOptions o;
    o.grid = base;
    bool before = membership_test(sampled(f), Y, m, 1.0, g, 2, 4, o).verdict;
    bool after = membership_test(sampled(Af), Y, m + a.m, a.rho, g, 2, 4, o).verdict;
    rep.conormal_preserved = !before || after;
  }
  rep.verdict = rep.contained && rep.conormal_preserved.value_or(true);
  return rep;
}

}  // namespace phasescope
