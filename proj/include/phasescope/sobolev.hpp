#pragma once

// Shubin-Sobolev norms ||<.>^s T_g u||_{L^2} and the continuity harness for
// Weyl operators Q^{s+m} -> Q^s.

#include <string>
#include <vector>

#include "weyl.hpp"

namespace phasescope {

struct QsParams {
  double s = 0.0;
  Window window = standard_gaussian();

  void validate() const {
    if (!(std::abs(s) <= 10.0)) throw ValidationError("Q^s: |s| must be at most 10");
  }
};

/// ||<(x, xi)>^s T_g u||_{L^2} on grid x grid.dual().
inline double qs_norm(const PhaseSpaceField& F, double s) {
  if (!(std::abs(s) <= 10.0)) throw ValidationError("Q^s: |s| must be at most 10");
  CompensatedSum acc;
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto z = F.point(i);
    acc.add(std::pow(japanese(z), 2.0 * s) * std::norm(F.values[i]));
  }
  return std::sqrt(acc.value() * F.cell_volume());
}

inline double qs_norm(const Signal& u, double s, const Window& g, const GridSpec& grid) {
  return qs_norm(transform(u, g, grid), s);
}

inline double qs_norm(const Signal& u, double s, const Window& g) { return qs_norm(u, s, g, default_grid(dim(u))); }

inline double qs_norm(const Signal& u, const QsParams& p) {
  p.validate();
  return qs_norm(u, p.s, p.window);
}

// ---------------------------------------------------------------------------
// Corpus

struct NamedSignal {
  std::string name;
  Signal signal;
};

/// x^k psi0(x) in one dimension.
inline Signal moment_psi0(int k) {
  return analytic("x^" + std::to_string(k) + "psi0", 1, [k](std::span<const double> x) {
    return cplx(std::pow(x[0], k) * std::pow(kPi, -0.25) * std::exp(-0.5 * x[0] * x[0]));
  });
}

/// Hermite-type functions h_0 .. h_{n-1}: Gram-Schmidt on x^k psi0 with the
/// inner product of a fine grid, returned as linear combinations of moments.
inline std::vector<Signal> hermite_functions(int n) {
  if (n < 1 || n > 12) throw ValidationError("hermite_functions: n must be in [1, 12]");
  const GridSpec q = GridSpec::cube(1, 16.0, 1024);
  std::vector<GridFunction> basis;
  for (int k = 0; k < n; ++k) basis.push_back(sample(moment_psi0(k), q));
  // coefficients of each orthonormal function in the moment basis
  std::vector<std::vector<cplx>> coef;
  std::vector<GridFunction> ortho;
  for (int k = 0; k < n; ++k) {
    GridFunction v = basis[static_cast<std::size_t>(k)];
    std::vector<cplx> c(static_cast<std::size_t>(n), 0.0);
    c[static_cast<std::size_t>(k)] = 1.0;
    for (std::size_t j = 0; j < ortho.size(); ++j) {
      cplx p = quadrature_inner(v, ortho[j]);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * ortho[j][i];
      for (std::size_t i = 0; i < c.size(); ++i) c[i] -= p * coef[j][i];
    }
    double nv = l2_norm(v);
    for (auto& x : v.values) x /= nv;
    for (auto& x : c) x /= nv;
    // fix the sign so that the leading coefficient is positive
    if (c[static_cast<std::size_t>(k)].real() < 0) {
      for (auto& x : v.values) x = -x;
      for (auto& x : c) x = -x;
    }
    ortho.push_back(std::move(v));
    coef.push_back(std::move(c));
  }
  std::vector<Signal> out;
  for (int k = 0; k < n; ++k) {
    std::vector<std::pair<cplx, Signal>> terms;
    for (int j = 0; j <= k; ++j) terms.push_back({coef[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)], moment_psi0(j)});
    out.push_back(linear_combination(std::move(terms)));
  }
  return out;
}

/// psi0, h_1 .. h_6, two chirped packets and one shifted packet.
inline std::vector<NamedSignal> sobolev_corpus() {
  std::vector<NamedSignal> c{{"psi0", psi0()}};
  auto h = hermite_functions(7);
  for (int k = 1; k <= 6; ++k) c.push_back({"h" + std::to_string(k), h[static_cast<std::size_t>(k)]});
  c.push_back({"chirped(0.5)", packet1(0.0, 0.0, 1.0, 0.5)});
  c.push_back({"chirped(-1)", packet1(0.5, 1.0, 0.8, -1.0)});
  c.push_back({"shifted(2,-1)", packet1(2.0, -1.0)});
  return c;
}

// ---------------------------------------------------------------------------
// Continuity harness

struct ContinuityReport {
  std::string symbol;
  double m = 0.0, s = 0.0;
  double ratio = 0.0;
  std::string argmax;
  std::vector<double> ratios;
};

/// max over the corpus of ||a^w u||_{Q^s} / ||u||_{Q^{s + m}}, m = a.m, with
/// u sampled on the symbol's base grid.
inline ContinuityReport continuity_ratio(const SymbolGrid& a, double s, const std::vector<NamedSignal>& corpus,
                                         const Window& g = standard_gaussian()) {
  if (corpus.empty()) throw ValidationError("continuity_ratio: corpus must be nonempty");
  if (!(std::abs(s) <= 10.0) || !(std::abs(s + a.m) <= 10.0)) throw ValidationError("Q^s: |s| must be at most 10");
  GridSpec base = weyl_base_grid(a.spec);
  ContinuityReport rep{a.name, a.m, s, 0.0, {}, std::vector<double>(corpus.size())};
  std::vector<std::string> err(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t k) {
    GridFunction u = sample(corpus[k].signal, base);
    double den = qs_norm(transform(sampled(u), g, base), s + a.m);
    if (den <= 1e-300) {
      err[k] = corpus[k].name;
      return;
    }
    rep.ratios[k] = qs_norm(transform(sampled(apply_weyl(a, u)), g, base), s) / den;
  });
  for (auto& e : err)
    if (!e.empty()) throw ValidationError("continuity_ratio: corpus element '" + e + "' has zero norm");
  for (std::size_t k = 0; k < corpus.size(); ++k)
    if (rep.ratios[k] > rep.ratio) {
      rep.ratio = rep.ratios[k];
      rep.argmax = corpus[k].name;
    }
  return rep;
}

/// (2 + sin x)(2 + sin xi): bounded with bounded derivatives, order 0, rho = 0.
inline Signal bounded_oscillating_symbol() {
  return analytic("bounded_sin", 2, [](std::span<const double> z) {
    return cplx((2.0 + std::sin(z[0])) * (2.0 + std::sin(z[1])));
  });
}

}  // namespace phasescope
