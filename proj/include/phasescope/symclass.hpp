#pragma once

// Shubin symbol classes: direct seminorms, transform-side and geometric
// characterizations, order estimation and classical-symbol tests.

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "decay.hpp"
#include "identities.hpp"

namespace phasescope {

struct SymbolGrid {
  GridSpec spec;
  std::vector<cplx> values;
  double m = 0.0;
  double rho = 1.0;
  std::string name;
  std::optional<Signal> source;  // exact pointwise values when available

  std::size_t dim() const { return spec.dim(); }
  std::size_t size() const { return values.size(); }
};

inline GridSpec default_symbol_grid(std::size_t d) {
  if (d == 1) return GridSpec::cube(1, 24.0, 512);
  if (d == 2) return GridSpec::cube(2, 24.0, 128);
  return GridSpec::cube(d, 16.0, 32);
}

/// Phase-space grid for transform-side symbol checks.
inline GridSpec symbol_field_grid(std::size_t d) {
  if (d == 1) return GridSpec::cube(1, 32.0, 512);
  return default_grid(d);
}

inline void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("declared rho must lie in [0, 1]");
}

inline SymbolGrid make_symbol(std::string name, const Signal& a, double m, double rho = 1.0,
                              std::optional<GridSpec> spec = std::nullopt) {
  check_rho(rho);
  if (has_point_mass(a)) throw UnsupportedSampling("symbols must be functions; point masses are not symbols");
  GridSpec s = spec ? *spec : default_symbol_grid(dim(a));
  GridFunction f = sample(a, s);
  for (auto& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ValidationError("symbol has non-finite values");
  return {s, std::move(f.values), m, rho, std::move(name), a};
}

inline SymbolGrid symbol_from_samples(GridFunction f, double m, double rho = 1.0, std::string name = "sampled") {
  check_rho(rho);
  for (auto& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ValidationError("symbol has non-finite values");
  return {f.spec, std::move(f.values), m, rho, std::move(name), std::nullopt};
}

// ---------------------------------------------------------------------------
// Growth fits

struct GrowthSample {
  double r;    // radius used for shell assignment
  double w;    // weighted quantity whose growth is measured
  double raw;  // unweighted magnitude, compared against the floor
};

struct GrowthFit {
  std::vector<double> edges, sups, radii;  // radii: where each shell sup is attained
  double exponent = 0.0;                   // slope of log sup against log <r>
  double residual = 0.0;
  double constant = 0.0;                   // max w over the fitted range
  bool floor_hit = false;
  std::size_t used = 0;
};

struct VerdictRule {
  double slope_tol = 0.25;
  double ceiling = 1e3;
  double r_min = 2.0;
  std::size_t shells = 8;
  double floor_rel = 1e-11;
};

/// Geometric shells on [r_min, r_max]; per shell the sup of w and the radius
/// where it is attained. Shells whose raw sup sits at or below floor_abs end
/// the usable range.
inline GrowthFit growth_fit(const std::vector<GrowthSample>& samples, double r_min, double r_max, std::size_t shells,
                            double floor_abs) {
  if (!(r_max > r_min) || r_min <= 0) throw ValidationError("growth fit: need 0 < R_min < R_max");
  GrowthFit fit;
  fit.edges.resize(shells + 1);
  for (std::size_t k = 0; k <= shells; ++k)
    fit.edges[k] = r_min * std::pow(r_max / r_min, static_cast<double>(k) / static_cast<double>(shells));
  fit.sups.assign(shells, -1.0);
  fit.radii.assign(shells, 0.0);
  std::vector<double> raw(shells, 0.0);
  const double lr = std::log(r_max / r_min);
  for (auto& s : samples) {
    if (s.r < r_min || s.r > r_max) continue;
    auto k = std::min(static_cast<std::size_t>(std::log(s.r / r_min) / lr * static_cast<double>(shells)), shells - 1);
    if (s.w > fit.sups[k]) {
      fit.sups[k] = s.w;
      fit.radii[k] = s.r;
    }
    raw[k] = std::max(raw[k], s.raw);
  }
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < shells; ++k) {
    if (fit.sups[k] < 0) continue;
    if (raw[k] <= floor_abs || fit.sups[k] <= 0) {
      fit.floor_hit = true;
      break;
    }
    xs.push_back(japanese(fit.radii[k]));
    ys.push_back(fit.sups[k]);
    fit.constant = std::max(fit.constant, fit.sups[k]);
  }
  for (auto& v : fit.sups) v = std::max(v, 0.0);
  fit.used = xs.size();
  if (xs.empty() && !fit.floor_hit) throw ValidationError("growth fit: no samples in range");
  if (xs.size() < 2) {
    fit.exponent = fit.floor_hit ? -std::numeric_limits<double>::infinity() : 0.0;
    return fit;
  }
  auto [slope, res] = loglog_slope(xs, ys);
  fit.exponent = slope;
  fit.residual = res;
  return fit;
}

// ---------------------------------------------------------------------------
// Reports

struct SeminormEntry {
  std::vector<int> alpha;  // derivative multi-index (or L-product word for geometric checks)
  double constant = 0.0;
  double growth = 0.0;
  bool floor_hit = false;
  bool pass = true;
};

struct SeminormReport {
  std::string kind;
  std::string symbol;
  double m = 0.0, rho = 1.0;
  int M = 0, N = 0;
  std::vector<SeminormEntry> entries;
  double max_constant = 0.0;
  double ceiling = 1e3;
  double slope_tol = 0.25;
  double expansion_residual = 0.0;  // geometric checks only
  bool verdict = true;
};

inline SeminormEntry judge(std::vector<int> alpha, const GrowthFit& f, const VerdictRule& rule) {
  SeminormEntry e{std::move(alpha), f.constant, f.exponent, f.floor_hit, true};
  e.pass = e.growth <= rule.slope_tol && e.constant <= rule.ceiling;
  return e;
}

inline void finish(SeminormReport& r, const VerdictRule& rule) {
  r.ceiling = rule.ceiling;
  r.slope_tol = rule.slope_tol;
  r.verdict = true;
  r.max_constant = 0.0;
  for (auto& e : r.entries) {
    r.max_constant = std::max(r.max_constant, e.constant);
    r.verdict = r.verdict && e.pass;
  }
}

/// All multi-indices in N^d with |alpha| <= max_order, graded.
inline std::vector<std::vector<int>> multi_indices(std::size_t d, int max_order) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= max_order; ++total) {
    std::vector<int> a(d, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t j, int left) {
      if (j + 1 == d) {
        a[j] = left;
        out.push_back(a);
        return;
      }
      for (int k = left; k >= 0; --k) {
        a[j] = k;
        rec(j + 1, left - k);
      }
    };
    rec(0, total);
  }
  return out;
}

inline int order_of(const std::vector<int>& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

namespace detail {

/// Nodes with |z_j| <= frac L_j.
inline std::vector<std::size_t> symbol_probes(const GridSpec& s, double frac) {
  std::vector<std::size_t> out;
  std::vector<double> z(s.dim());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.point(i, z);
    bool in = true;
    for (std::size_t j = 0; j < s.dim() && in; ++j) in = std::abs(z[j]) <= frac * s.axis(j).half_width;
    if (in) out.push_back(i);
  }
  return out;
}

inline double min_half_width(const GridSpec& s) {
  double h = std::numeric_limits<double>::infinity();
  for (auto& a : s.axes()) h = std::min(h, a.half_width);
  return h;
}

inline double norm_of(std::span<const double> z) { return std::sqrt(dot(z, z)); }

/// d^alpha a at every probe: pointwise differences on the source when present,
/// grid differences otherwise.
inline std::vector<cplx> symbol_derivative(const SymbolGrid& a, const std::vector<int>& alpha,
                                           const std::vector<std::size_t>& probes, double step = 0.01) {
  std::vector<cplx> out(probes.size());
  if (a.source) {
    const Signal& src = *a.source;
    parallel_for(probes.size(), [&](std::size_t k) {
      auto z = a.spec.point(probes[k]);
      out[k] = fd_point([&](std::span<const double> p) { return eval(src, p); }, z, alpha, step);
    });
    return out;
  }
  std::vector<cplx> v = a.values;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    for (int r = 0; r < alpha[j]; ++r) v = fd_axis(v, a.spec, j, 1);
  for (std::size_t k = 0; k < probes.size(); ++k) out[k] = v[probes[k]];
  return out;
}

}  // namespace detail

constexpr double kSymbolProbeFrac = 0.8;  // 20% boundary margin per axis
constexpr double kFieldProbeFrac = 0.6;

// ---------------------------------------------------------------------------
// Direct seminorms and order estimation

/// C_alpha = max |d^alpha a| <z>^{rho|alpha| - m} over interior probes, |alpha| <= M.
inline SeminormReport shubin_seminorm(const SymbolGrid& a, int M, VerdictRule rule = {}) {
  if (M < 0 || M > 4) throw ValidationError("shubin_seminorm: derivative cap must be in [0, 4]");
  SeminormReport rep{"direct", a.name, a.m, a.rho, M, 0, {}, 0, 0, 0, 0, true};
  auto probes = detail::symbol_probes(a.spec, kSymbolProbeFrac);
  const double r_max = kSymbolProbeFrac * detail::min_half_width(a.spec);
  for (auto& alpha : multi_indices(a.dim(), M)) {
    auto der = detail::symbol_derivative(a, alpha, probes);
    std::vector<GrowthSample> smp(probes.size());
    double gmax = 0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      auto z = a.spec.point(probes[k]);
      double mag = std::abs(der[k]);
      smp[k] = {detail::norm_of(z), mag * std::pow(japanese(z), a.rho * order_of(alpha) - a.m), mag};
      gmax = std::max(gmax, mag);
    }
    GrowthFit f = growth_fit(smp, rule.r_min, r_max, rule.shells, rule.floor_rel * gmax);
    SeminormEntry e = judge(alpha, f, rule);
    // the constant covers every probe, including those inside r_min
    for (auto& s : smp) e.constant = std::max(e.constant, s.w);
    e.pass = e.growth <= rule.slope_tol && e.constant <= rule.ceiling;
    rep.entries.push_back(std::move(e));
  }
  finish(rep, rule);
  return rep;
}

struct OrderEstimate {
  double order = 0.0;
  double residual = 0.0;
  bool floor_hit = false;
  std::size_t shells_used = 0;
};

/// Shell regression of sup |a| against <r>.
inline OrderEstimate estimate_order(const SymbolGrid& a, VerdictRule rule = {}) {
  auto probes = detail::symbol_probes(a.spec, kSymbolProbeFrac);
  std::vector<GrowthSample> smp(probes.size());
  double gmax = 0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    auto z = a.spec.point(probes[k]);
    double v = std::abs(a.values[probes[k]]);
    smp[k] = {detail::norm_of(z), v, v};
    gmax = std::max(gmax, v);
  }
  if (gmax == 0.0) throw ValidationError("estimate_order: symbol vanishes on the probe set");
  GrowthFit f = growth_fit(smp, rule.r_min, kSymbolProbeFrac * detail::min_half_width(a.spec), rule.shells,
                           rule.floor_rel * gmax);
  return {f.exponent, f.residual, f.floor_hit, f.used};
}

// ---------------------------------------------------------------------------
// Transform-side checks

namespace detail {

inline PhaseSpaceField symbol_transform(const SymbolGrid& a, const Window& g, const GridSpec& grid) {
  if (a.source) return transform(*a.source, g, grid);
  return transform(sampled(GridFunction(a.spec, a.values)), g, grid);
}

/// Growth of |D| <x>^{-e} <xi>^N over x-shells on the interior field probes.
/// The floor is relative to the field itself, so derivatives that vanish
/// identically read as zero rather than as rounding noise.
inline GrowthFit field_growth(const PhaseSpaceField& F, const std::vector<cplx>& D, double e, int N,
                              const VerdictRule& rule) {
  auto probes = interior_probes(F, kFieldProbeFrac);
  const std::size_t d = F.dim();
  std::vector<GrowthSample> smp(probes.size());
  double gmax = 0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    auto z = F.point(probes[k]);
    std::span<const double> x(z.data(), d), xi(z.data() + d, d);
    double mag = std::abs(D[probes[k]]);
    smp[k] = {norm_of(x), mag * std::pow(japanese(x), -e) * std::pow(japanese(xi), N), mag};
    gmax = std::max(gmax, std::abs(F.values[probes[k]]));
  }
  double r_max = kFieldProbeFrac * min_half_width(F.x_spec);
  return growth_fit(smp, rule.r_min, r_max, rule.shells, rule.floor_rel * gmax);
}

inline std::vector<cplx> fd_x(const PhaseSpaceField& F, const std::vector<cplx>& v, const std::vector<int>& alpha) {
  std::vector<int> order(alpha);
  order.resize(2 * F.dim(), 0);
  return fd_multi(v, F.phase_spec(), order);
}

}  // namespace detail

/// sup |d_x^alpha T_g a| <x>^{rho|alpha| - m} <xi>^N for |alpha| <= alpha_max.
inline SeminormReport transform_side_check(const SymbolGrid& a, const Window& g, double m, double rho, int alpha_max,
                                           int N, std::optional<GridSpec> grid = std::nullopt, VerdictRule rule = {}) {
  check_rho(rho);
  if (alpha_max < 0 || alpha_max > 3) throw ValidationError("transform_side_check: alpha_max must be in [0, 3]");
  if (N < 0 || N > 6) throw ValidationError("transform_side_check: N must be in [0, 6]");
  PhaseSpaceField F = detail::symbol_transform(a, g, grid ? *grid : symbol_field_grid(a.dim()));
  SeminormReport rep{"transform", a.name, m, rho, alpha_max, N, {}, 0, 0, 0, 0, true};
  for (auto& alpha : multi_indices(a.dim(), alpha_max)) {
    auto D = detail::fd_x(F, F.values, alpha);
    GrowthFit f = detail::field_growth(F, D, m - rho * order_of(alpha), N, rule);
    rep.entries.push_back(judge(alpha, f, rule));
  }
  finish(rep, rule);
  return rep;
}

namespace detail {

/// x_j d_{x_n} applied to a field by finite differences.
inline std::vector<cplx> apply_L(const PhaseSpaceField& F, const std::vector<cplx>& v, std::size_t j, std::size_t n) {
  std::vector<cplx> out = fd_axis(v, F.phase_spec(), n, 1);
  const GridSpec ps = F.phase_spec();
  std::vector<double> z(ps.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    ps.point(i, z);
    out[i] *= z[j];
  }
  return out;
}

}  // namespace detail

/// Products L_1 ... L_k of fields x_j d_{x_n}, k <= 2, against <x>^m <xi>^{-N}.
/// The word of each entry lists (j, n) pairs, innermost last.
inline SeminormReport geometric_check(const SymbolGrid& a, const Window& g, double m, int k, int N,
                                      std::optional<GridSpec> grid = std::nullopt, VerdictRule rule = {}) {
  if (k < 0 || k > 2) throw ValidationError("geometric_check: k must be in [0, 2]");
  if (N < 0 || N > 6) throw ValidationError("geometric_check: N must be in [0, 6]");
  PhaseSpaceField F = detail::symbol_transform(a, g, grid ? *grid : symbol_field_grid(a.dim()));
  const std::size_t d = a.dim();
  SeminormReport rep{"geometric", a.name, m, 1.0, k, N, {}, 0, 0, 0, 0, true};
  std::vector<std::vector<int>> words{{}};
  for (int level = 1; level <= k; ++level) {
    std::vector<std::vector<int>> next;
    for (auto& w : words)
      if (static_cast<int>(w.size()) == 2 * (level - 1))
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t n = 0; n < d; ++n) {
            auto nw = w;
            nw.push_back(static_cast<int>(j));
            nw.push_back(static_cast<int>(n));
            next.push_back(nw);
          }
    words.insert(words.end(), next.begin(), next.end());
  }
  double resid = 0.0;
  for (auto& w : words) {
    std::vector<cplx> v = F.values;
    for (std::size_t p = w.size(); p >= 2; p -= 2)
      v = detail::apply_L(F, v, static_cast<std::size_t>(w[p - 2]), static_cast<std::size_t>(w[p - 1]));
    if (w.size() == 4) {
      // L1 L2 = x_{j1} x_{j2} d_{n1} d_{n2} + [n1 == j2] x_{j1} d_{n2}
      auto j1 = static_cast<std::size_t>(w[0]), n1 = static_cast<std::size_t>(w[1]);
      auto j2 = static_cast<std::size_t>(w[2]), n2 = static_cast<std::size_t>(w[3]);
      std::vector<int> ord(2 * d, 0);
      ord[n1] += 1;
      ord[n2] += 1;
      auto dd = fd_multi(F.values, F.phase_spec(), ord);
      std::vector<cplx> e(F.size());
      auto d1 = n1 == j2 ? fd_axis(F.values, F.phase_spec(), n2, 1) : std::vector<cplx>(F.size());
      for (std::size_t i = 0; i < F.size(); ++i) {
        auto z = F.point(i);
        e[i] = z[j1] * z[j2] * dd[i] + z[j1] * d1[i];
      }
      resid = std::max(resid, max_relative_error(v, e, interior_probes(F, kFieldProbeFrac)));
    }
    GrowthFit f = detail::field_growth(F, v, m, N, rule);
    rep.entries.push_back(judge(w, f, rule));
  }
  rep.expansion_residual = resid;
  finish(rep, rule);
  return rep;
}

// ---------------------------------------------------------------------------
// Classical symbols

struct ClassicalReport {
  std::string symbol;
  double m = 0.0;
  int N = 0;
  double defect_order = 0.0;
  double threshold = 0.0;  // m - N + 0.25
  bool floor_hit = false;
  bool classical = true;
};

namespace detail {

/// (R - m + level - 1) ... (R - m) a at z, R = <z, grad>, by fourth-order
/// differences with a step proportional to <z>.
inline cplx radial_defect_at(const Signal& a, std::span<const double> z, double m, int level) {
  if (level == 0) return eval(a, z);
  const std::size_t d = z.size();
  const double h = 0.01 * japanese(z);
  std::vector<double> p(z.begin(), z.end());
  cplx grad_dot{};
  for (std::size_t j = 0; j < d; ++j) {
    auto f = [&](double off) {
      p[j] = z[j] + off;
      cplx v = radial_defect_at(a, p, m, level - 1);
      p[j] = z[j];
      return v;
    };
    cplx der = (-f(2 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2 * h)) / (12.0 * h);
    grad_dot += z[j] * der;
  }
  return grad_dot - (m - (level - 1)) * radial_defect_at(a, z, m, level - 1);
}

}  // namespace detail

/// Order of (R - m + N - 1) ... (R - m) a; classical iff it is <= m - N + 0.25.
/// Shells where the defect drops below 1e-8 |a| are treated as zero.
inline ClassicalReport classical_defect(const SymbolGrid& a, double m, int N, VerdictRule rule = {}) {
  if (N < 0 || N > 3) throw ValidationError("classical_defect: N must be in [0, 3]");
  auto probes = detail::symbol_probes(a.spec, kSymbolProbeFrac);
  std::vector<cplx> defect(probes.size());
  if (a.source) {
    parallel_for(probes.size(), [&](std::size_t k) {
      auto z = a.spec.point(probes[k]);
      defect[k] = detail::radial_defect_at(*a.source, z, m, N);
    });
  } else {
    std::vector<cplx> v = a.values;
    for (int level = 0; level < N; ++level) {
      std::vector<cplx> r(v.size());
      for (std::size_t j = 0; j < a.dim(); ++j) {
        auto dj = fd_axis(v, a.spec, j, 1);
        for (std::size_t i = 0; i < v.size(); ++i) r[i] += a.spec.point(i)[j] * dj[i];
      }
      for (std::size_t i = 0; i < v.size(); ++i) r[i] -= (m - level) * v[i];
      v = std::move(r);
    }
    for (std::size_t k = 0; k < probes.size(); ++k) defect[k] = v[probes[k]];
  }
  std::vector<GrowthSample> smp(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k) {
    auto z = a.spec.point(probes[k]);
    double mag = std::abs(defect[k]), ref = std::abs(a.values[probes[k]]);
    smp[k] = {detail::norm_of(z), mag, ref > 0 ? mag / ref : mag};
  }
  GrowthFit f = growth_fit(smp, std::max(rule.r_min, 3.0), kSymbolProbeFrac * detail::min_half_width(a.spec),
                           rule.shells, 1e-8);
  ClassicalReport rep{a.name, m, N, f.exponent, m - N + 0.25, f.floor_hit, true};
  rep.classical = rep.defect_order <= rep.threshold;
  return rep;
}

/// Applies (Rt - m + N - 1) ... (Rt - m) with Rt = <x + i grad_xi, grad_x> to
/// T_g a and checks |.| <~ <x>^{m-N} <xi>^{-M}.
inline SeminormReport radial_transform_defect(const SymbolGrid& a, const Window& g, double m, int N, int M = 2,
                                              std::optional<GridSpec> grid = std::nullopt, VerdictRule rule = {}) {
  if (N < 0 || N > 2) throw ValidationError("radial_transform_defect: N must be in [0, 2]");
  if (M < 0 || M > 4) throw ValidationError("radial_transform_defect: M must be in [0, 4]");
  PhaseSpaceField F = detail::symbol_transform(a, g, grid ? *grid : symbol_field_grid(a.dim()));
  const std::size_t d = a.dim();
  const GridSpec ps = F.phase_spec();
  std::vector<cplx> v = F.values;
  for (int level = 0; level < N; ++level) {
    std::vector<cplx> r(v.size());
    for (std::size_t j = 0; j < d; ++j) {
      auto dx = fd_axis(v, ps, j, 1);
      auto dxdxi = fd_axis(dx, ps, d + j, 1);
      std::vector<double> z(2 * d);
      for (std::size_t i = 0; i < v.size(); ++i) {
        ps.point(i, z);
        r[i] += z[j] * dx[i] + cplx(0, 1) * dxdxi[i];
      }
    }
    for (std::size_t i = 0; i < v.size(); ++i) r[i] -= (m - level) * v[i];
    v = std::move(r);
  }
  SeminormReport rep{"radial", a.name, m, 1.0, M, N, {}, 0, 0, 0, 0, true};
  GrowthFit f = detail::field_growth(F, v, m - N, M, rule);
  rep.entries.push_back(judge({}, f, rule));
  finish(rep, rule);
  return rep;
}

// ---------------------------------------------------------------------------
// Test symbols

/// <z>^m
inline Signal japanese_power(std::size_t d, double m) {
  return analytic("japanese^" + std::to_string(m), d, [m](std::span<const double> z) {
    return cplx(std::pow(1.0 + dot(z, z), 0.5 * m));
  });
}

/// Smoothstep 6t^5 - 15t^4 + 10t^3 from 0 at |z| = 1 to 1 at |z| = 2.
inline double cutoff_blend(double r) {
  if (r <= 1.0) return 0.0;
  if (r >= 2.0) return 1.0;
  double t = r - 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// |z|^m, exactly homogeneous for |z| >= 2.
inline Signal smoothed_homogeneous(std::size_t d, double m) {
  return analytic("homogeneous^" + std::to_string(m), d, [m](std::span<const double> z) {
    double r = std::sqrt(dot(z, z));
    return cplx(cutoff_blend(r) * (r > 0 ? std::pow(r, m) : 0.0));
  });
}

/// <z>^m (amp + sin(freq log <z>))
inline Signal log_periodic(std::size_t d, double m, double freq = 4.0, double amp = 2.0) {
  return analytic("log_periodic", d, [=](std::span<const double> z) {
    double j = japanese(z);
    return cplx(std::pow(j, m) * (amp + std::sin(freq * std::log(j))));
  });
}

/// log <z>
inline Signal log_symbol(std::size_t d) {
  return analytic("log", d, [](std::span<const double> z) { return cplx(std::log(japanese(z))); });
}

/// e^{i|z|^2/2}
inline Signal unit_chirp(std::size_t d) {
  return chirp(Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
}

struct CorpusSymbol {
  std::string name;
  Signal symbol;
  double m;
  double rho;
  bool member;                     // expected verdict at (m, rho)
  std::optional<bool> classical;   // expected classicality where meaningful
};

/// Ten one-dimensional symbols, two of them designed failures.
inline std::vector<CorpusSymbol> symbol_corpus() {
  return {
      {"japanese", japanese_power(1, 1.0), 1.0, 1.0, true, true},
      {"one", constant(1), 0.0, 1.0, true, true},
      {"japanese^1.5", japanese_power(1, 1.5), 1.5, 1.0, true, true},
      {"japanese^-1", japanese_power(1, -1.0), -1.0, 1.0, true, true},
      {"japanese^2", japanese_power(1, 2.0), 2.0, 1.0, true, true},
      {"psi0", psi0(), -3.0, 1.0, true, true},
      {"homogeneous^2", smoothed_homogeneous(1, 2.0), 2.0, 1.0, true, true},
      {"log_periodic", log_periodic(1, 1.0), 1.0, 1.0, true, false},
      {"chirp", unit_chirp(1), 0.0, 0.0, false, std::nullopt},
      {"log", log_symbol(1), 0.0, 1.0, false, std::nullopt},
  };
}

}  // namespace phasescope
