#pragma once

// Log-log shell regression of sup |F| against the phase-space radius.

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fbi.hpp"

namespace phasescope {

struct ShellFit {
  std::vector<double> edges;  // shell boundaries, geometric
  std::vector<double> sups;   // sup per shell, 0 for empty shells
  std::vector<int> counts;
  double exponent = 0.0;      // -inf when the data sinks below the floor
  double residual = 0.0;      // RMS residual of the log fit
  bool floor_hit = false;
  std::size_t used = 0;       // shells entering the regression
};

/// Least-squares slope of log y against log x.
inline std::pair<double, double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return {0.0, 0.0};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::log(x[i]) - mx, b = std::log(y[i]) - my;
    sxx += a * a;
    sxy += a * b;
  }
  double slope = sxx > 0 ? sxy / sxx : 0.0;
  double res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = std::log(y[i]) - (my + slope * (std::log(x[i]) - mx));
    res += e * e;
  }
  return {slope, std::sqrt(res / static_cast<double>(n))};
}

/// samples: (radius, |value|). Shells whose sup falls below floor_abs end the
/// usable range; with fewer than two usable shells the exponent is -inf.
inline ShellFit fit_shells(const std::vector<std::pair<double, double>>& samples, double r_min, double r_max,
                           std::size_t shells, double floor_abs) {
  if (!(r_max > r_min) || r_min <= 0) throw ValidationError("decay fit: need 0 < R_min < R_max");
  if (shells < 2) throw ValidationError("decay fit: need at least two shells");
  ShellFit fit;
  fit.edges.resize(shells + 1);
  for (std::size_t k = 0; k <= shells; ++k)
    fit.edges[k] = r_min * std::pow(r_max / r_min, static_cast<double>(k) / static_cast<double>(shells));
  fit.sups.assign(shells, 0.0);
  fit.counts.assign(shells, 0);
  const double lr = std::log(r_max / r_min);
  for (auto& [r, v] : samples) {
    if (r < r_min || r > r_max) continue;
    auto k = static_cast<std::size_t>(std::log(r / r_min) / lr * static_cast<double>(shells));
    k = std::min(k, shells - 1);
    fit.sups[k] = std::max(fit.sups[k], v);
    ++fit.counts[k];
  }
  bool any = false;
  for (int c : fit.counts) any = any || c > 0;
  if (!any) throw ValidationError("decay fit: region contains no samples");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < shells; ++k) {
    if (fit.counts[k] == 0) continue;
    if (fit.sups[k] <= floor_abs) {
      fit.floor_hit = true;
      break;
    }
    xs.push_back(std::sqrt(fit.edges[k] * fit.edges[k + 1]));
    ys.push_back(fit.sups[k]);
  }
  fit.used = xs.size();
  if (xs.size() < 2) {
    fit.exponent = fit.floor_hit ? -std::numeric_limits<double>::infinity() : 0.0;
    return fit;
  }
  auto [s, r] = loglog_slope(xs, ys);
  fit.exponent = s;
  fit.residual = r;
  return fit;
}

struct Region {
  enum class Kind { Shell, Cone };
  Kind kind = Kind::Shell;
  Vec direction;               // unit vector in R^{2d} for cones
  double aperture_deg = 10.0;  // full opening angle

  static Region shell() { return {}; }
  static Region cone(Vec dir, double aperture_deg = 10.0) {
    if (dir.norm() == 0) throw ValidationError("cone direction must be nonzero");
    return {Kind::Cone, dir.normalized(), aperture_deg};
  }
  bool contains(std::span<const double> z) const {
    if (kind == Kind::Shell) return true;
    double r = 0, c = 0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      r += z[j] * z[j];
      c += z[j] * direction[static_cast<Eigen::Index>(j)];
    }
    if (r == 0) return false;
    double cosang = std::clamp(c / std::sqrt(r), -1.0, 1.0);
    return std::acos(cosang) <= 0.5 * aperture_deg * kPi / 180.0 + 1e-12;
  }
  std::string describe() const {
    if (kind == Kind::Shell) return "shell";
    std::string s = "cone(";
    for (Eigen::Index j = 0; j < direction.size(); ++j) s += (j ? "," : "") + std::to_string(direction[j]);
    return s + ";" + std::to_string(aperture_deg) + ")";
  }
};

struct DecayOptions {
  double r_min = 3.0;
  double r_max = 0.0;  // 0: 0.8 of the smallest half width
  std::size_t shells = 8;
  double floor_rel = 1e-11;  // relative to the field's global max
  std::optional<double> requested;
  double ceiling = 1e3;
};

struct DecayReport {
  std::string region;
  std::vector<double> radii;  // shell boundaries
  std::vector<double> sups;
  double exponent = 0.0;
  double residual = 0.0;
  bool floor_hit = false;
  double constant = 0.0;  // max sup / <r>^requested over shells
  std::optional<double> requested;
  bool verdict = true;
};

inline double field_extent(const PhaseSpaceField& F) {
  double e = std::numeric_limits<double>::infinity();
  for (auto& a : F.x_spec.axes()) e = std::min(e, a.half_width);
  for (auto& a : F.xi_spec.axes()) e = std::min(e, a.half_width);
  return e;
}

inline DecayReport decay_report(const ShellFit& fit, const std::string& region, const DecayOptions& opt) {
  DecayReport rep;
  rep.region = region;
  rep.radii = fit.edges;
  rep.sups = fit.sups;
  rep.exponent = fit.exponent;
  rep.residual = fit.residual;
  rep.floor_hit = fit.floor_hit;
  rep.requested = opt.requested;
  if (opt.requested) {
    for (std::size_t k = 0; k < fit.sups.size(); ++k)
      rep.constant = std::max(rep.constant, fit.sups[k] / std::pow(japanese(fit.edges[k]), *opt.requested));
    rep.verdict = rep.exponent <= *opt.requested + 0.25 && rep.constant <= opt.ceiling;
  }
  return rep;
}

inline DecayReport decay_fit(const PhaseSpaceField& F, const Region& region, DecayOptions opt = {}) {
  if (region.kind == Region::Kind::Cone && static_cast<std::size_t>(region.direction.size()) != 2 * F.dim())
    throw DimensionError("decay_fit: cone direction must live in R^{2d}");
  double extent = field_extent(F);
  if (opt.r_max <= 0) opt.r_max = 0.8 * extent;
  if (opt.r_max > 0.8 * extent + 1e-12) throw ValidationError("decay_fit: radii must stay within 80% of the grid extent");
  std::vector<std::pair<double, double>> samples;
  double gmax = max_abs(F.values);
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto z = F.point(i);
    if (!region.contains(z)) continue;
    double r = 0;
    for (double v : z) r += v * v;
    r = std::sqrt(r);
    if (r >= opt.r_min && r <= opt.r_max) samples.emplace_back(r, std::abs(F.values[i]));
  }
  ShellFit fit = fit_shells(samples, opt.r_min, opt.r_max, opt.shells, opt.floor_rel * gmax);
  return decay_report(fit, region.describe(), opt);
}

}  // namespace phasescope
