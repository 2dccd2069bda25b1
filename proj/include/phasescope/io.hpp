#pragma once

// PSF1 binary fields, JSON sidecars and reports, CSV exports, and the JSON
// descriptor format for signals, windows, grids, subspaces and metaplectic
// compositions. Requires nlohmann/json.

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "defaults.hpp"
#include "sobolev.hpp"
#include "wavefront.hpp"

namespace phasescope {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// PSF1

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}
inline void put_f64(std::string& out, double x) {
  auto v = std::bit_cast<std::uint64_t>(x);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}
inline std::uint64_t get_le(const std::string& in, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > in.size()) throw ValidationError("PSF1: truncated file");
  std::uint64_t v = 0;
  for (int k = 0; k < bytes; ++k) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + k])) << (8 * k);
  pos += static_cast<std::size_t>(bytes);
  return v;
}

}  // namespace detail

/// magic "PSF1", u32 rank, per axis (u32 N, f64 half width), complex128 LE
/// payload in row-major order.
inline std::string encode_psf1(const GridFunction& f) {
  std::string out = "PSF1";
  detail::put_u32(out, static_cast<std::uint32_t>(f.spec.dim()));
  for (auto& a : f.spec.axes()) {
    detail::put_u32(out, static_cast<std::uint32_t>(a.samples));
    detail::put_f64(out, a.half_width);
  }
  out.reserve(out.size() + 16 * f.size());
  for (auto& v : f.values) {
    detail::put_f64(out, v.real());
    detail::put_f64(out, v.imag());
  }
  return out;
}

inline GridFunction decode_psf1(const std::string& in) {
  if (in.size() < 8 || in.compare(0, 4, "PSF1") != 0) throw ValidationError("PSF1: bad magic");
  std::size_t pos = 4;
  auto rank = static_cast<std::size_t>(detail::get_le(in, pos, 4));
  if (rank < 1 || rank > 8) throw ValidationError("PSF1: rank must be in [1, 8]");
  std::vector<Axis> axes(rank);
  for (auto& a : axes) {
    a.samples = static_cast<std::size_t>(detail::get_le(in, pos, 4));
    a.half_width = std::bit_cast<double>(detail::get_le(in, pos, 8));
  }
  GridFunction f{GridSpec(std::move(axes))};
  if (in.size() - pos != 16 * f.size()) throw ValidationError("PSF1: payload size does not match the header");
  for (auto& v : f.values) {
    double re = std::bit_cast<double>(detail::get_le(in, pos, 8));
    double im = std::bit_cast<double>(detail::get_le(in, pos, 8));
    v = {re, im};
  }
  return f;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw ValidationError("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_psf1(const std::string& path, const GridFunction& f) { write_file(path, encode_psf1(f)); }
inline GridFunction read_psf1(const std::string& path) { return decode_psf1(read_file(path)); }

/// A rank-2d PSF1 whose last d axes are the dual of the first d.
inline PhaseSpaceField field_from_function(const GridFunction& f, std::string provenance = {}) {
  const std::size_t r = f.spec.dim();
  if (r % 2 != 0) throw ValidationError("PSF1 field: rank must be even");
  std::vector<Axis> xa(f.spec.axes().begin(), f.spec.axes().begin() + static_cast<long>(r / 2));
  GridSpec xs(std::move(xa));
  PhaseSpaceField F(xs, xs.dual(), std::move(provenance));
  if (!(F.phase_spec() == f.spec)) throw ValidationError("PSF1 field: frequency axes are not the dual of the space axes");
  F.values = f.values;
  return F;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

/// One row per node: x_1 .. x_r, re, im.
inline std::string grid_csv(const GridFunction& f) {
  std::ostringstream os;
  const std::size_t r = f.spec.dim();
  for (std::size_t j = 0; j < r; ++j) os << "x" << j + 1 << ",";
  os << "re,im\n";
  std::vector<double> z(r);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.spec.point(i, z);
    for (double c : z) os << fmt_double(c) << ",";
    os << fmt_double(f[i].real()) << "," << fmt_double(f[i].imag()) << "\n";
  }
  return os.str();
}

/// One row per direction: omega_1 .. omega_{2d}, exponent, in.
inline std::string wavefront_csv(const WaveFrontReport& r) {
  std::ostringstream os;
  for (std::size_t j = 0; j < 2 * r.d; ++j) os << "w" << j + 1 << ",";
  os << "exponent,in\n";
  for (std::size_t k = 0; k < r.directions.size(); ++k) {
    for (Eigen::Index j = 0; j < r.directions[k].size(); ++j) os << fmt_double(r.directions[k][j]) << ",";
    os << fmt_double(r.exponents[k]) << "," << (r.in[k] ? 1 : 0) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// JSON descriptors

namespace detail {

inline const json& req(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

inline double num(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ValidationError(ctx + ": expected a number");
  return j.get<double>();
}

inline double num_or(const json& j, const char* key, double dflt, const std::string& ctx) {
  return j.contains(key) ? num(j.at(key), ctx + "." + key) : dflt;
}

inline std::size_t count(const json& j, const std::string& ctx) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ValidationError(ctx + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline cplx complex_of(const json& j, const std::string& ctx) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2) return {num(j[0], ctx), num(j[1], ctx)};
  throw ValidationError(ctx + ": expected a number or [re, im]");
}

inline Vec vec_of(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ValidationError(ctx + ": expected a nonempty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = num(j[i], ctx);
  return v;
}

/// Row-major nested arrays.
inline Mat mat_of(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ValidationError(ctx + ": expected a matrix [[..], ..]");
  const std::size_t r = j.size(), c = j[0].size();
  Mat M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != c) throw ValidationError(ctx + ": ragged matrix");
    for (std::size_t k = 0; k < c; ++k) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = num(j[i][k], ctx);
  }
  return M;
}

inline std::string type_of(const json& j, const std::string& ctx) {
  const json& t = req(j, "type", ctx);
  if (!t.is_string()) throw ValidationError(ctx + ".type: expected a string");
  return t.get<std::string>();
}

}  // namespace detail

inline GridSpec grid_from_json(const json& j, const std::string& ctx = "grid") {
  using namespace detail;
  if (j.contains("axes")) {
    const json& a = j.at("axes");
    if (!a.is_array() || a.empty()) throw ValidationError(ctx + ".axes: expected a nonempty array");
    std::vector<Axis> axes;
    for (auto& e : a) axes.push_back({num(req(e, "L", ctx + ".axes"), ctx), count(req(e, "N", ctx + ".axes"), ctx)});
    return GridSpec(std::move(axes));
  }
  const std::size_t d = count(req(j, "d", ctx), ctx + ".d");
  if (!j.contains("L") && !j.contains("N")) return default_grid(d);
  return GridSpec::cube(d, num(req(j, "L", ctx), ctx + ".L"), count(req(j, "N", ctx), ctx + ".N"));
}

inline Signal signal_from_json(const json& j, const std::string& ctx = "signal") {
  using namespace detail;
  const std::string t = type_of(j, ctx);
  auto d_or = [&](std::size_t dflt) { return j.contains("d") ? count(j.at("d"), ctx + ".d") : dflt; };
  if (t == "delta" || t == "point_mass") {
    Vec x0 = j.contains("x0") ? vec_of(j.at("x0"), ctx + ".x0") : Vec::Zero(static_cast<Eigen::Index>(d_or(1)));
    return point_mass(x0, j.contains("weight") ? complex_of(j.at("weight"), ctx + ".weight") : cplx(1.0));
  }
  if (t == "psi0") return psi0(d_or(1));
  if (t == "constant") return constant(d_or(1), j.contains("value") ? complex_of(j.at("value"), ctx + ".value") : cplx(1.0));
  if (t == "gaussian_packet") {
    Vec x0 = vec_of(req(j, "x0", ctx), ctx + ".x0");
    const auto n = x0.size();
    Vec xi0 = j.contains("xi0") ? vec_of(j.at("xi0"), ctx + ".xi0") : Vec::Zero(n);
    Mat B = j.contains("B") ? mat_of(j.at("B"), ctx + ".B") : Mat::Zero(n, n);
    cplx amp = j.contains("amplitude") ? complex_of(j.at("amplitude"), ctx + ".amplitude") : cplx(1.0);
    return gaussian_packet(x0, xi0, num_or(j, "sigma", 1.0, ctx), B, amp);
  }
  if (t == "chirp") {
    Mat B = mat_of(req(j, "B", ctx), ctx + ".B");
    std::optional<Vec> xi0;
    if (j.contains("xi0")) xi0 = vec_of(j.at("xi0"), ctx + ".xi0");
    return chirp(B, j.contains("amplitude") ? complex_of(j.at("amplitude"), ctx + ".amplitude") : cplx(1.0), xi0);
  }
  if (t == "hermite") {
    auto n = static_cast<int>(count(req(j, "n", ctx), ctx + ".n"));
    return hermite_functions(n + 1)[static_cast<std::size_t>(n)];
  }
  if (t == "tensor") return tensor(signal_from_json(req(j, "first", ctx), ctx + ".first"),
                                   signal_from_json(req(j, "second", ctx), ctx + ".second"));
  if (t == "linear_combination") {
    const json& terms = req(j, "terms", ctx);
    if (!terms.is_array() || terms.empty()) throw ValidationError(ctx + ".terms: expected a nonempty array");
    std::vector<std::pair<cplx, Signal>> out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      std::string c = ctx + ".terms[" + std::to_string(k) + "]";
      out.push_back({complex_of(req(terms[k], "coef", c), c + ".coef"), signal_from_json(req(terms[k], "signal", c), c + ".signal")});
    }
    return linear_combination(std::move(out));
  }
  if (t == "pullback") {
    cplx s = j.contains("scale") ? complex_of(j.at("scale"), ctx + ".scale") : cplx(1.0);
    return pullback(mat_of(req(j, "A", ctx), ctx + ".A"), s, signal_from_json(req(j, "inner", ctx), ctx + ".inner"));
  }
  // symbols on R^{2d}
  if (t == "japanese") return japanese_power(d_or(2), num_or(j, "m", 1.0, ctx));
  if (t == "homogeneous") return smoothed_homogeneous(d_or(2), num_or(j, "m", 1.0, ctx));
  if (t == "log_periodic") return log_periodic(d_or(2), num_or(j, "m", 1.0, ctx));
  if (t == "log") return log_symbol(d_or(2));
  if (t == "unit_chirp") return unit_chirp(d_or(2));
  if (t == "gaussian_symbol")
    return gaussian_symbol(static_cast<int>(j.value("p", 0)), static_cast<int>(j.value("q", 0)), num_or(j, "x0", 0.0, ctx),
                           num_or(j, "xi0", 0.0, ctx));
  if (t == "oscillator") return oscillator_symbol();
  if (t == "bounded_sin") return bounded_oscillating_symbol();
  if (t == "xi") return analytic("xi", 2, [](std::span<const double> z) { return cplx(z[1]); });
  throw ValidationError(ctx + ".type: unknown signal type '" + t + "'");
}

inline Window window_from_json(const json& j, const std::string& ctx = "window") {
  using namespace detail;
  const std::string t = type_of(j, ctx);
  if (t == "psi0") return standard_gaussian(j.contains("d") ? count(j.at("d"), ctx + ".d") : 1);
  if (t == "gaussian") {
    const json& s = req(j, "sigma", ctx);
    std::vector<double> sigma;
    for (auto& e : s) sigma.push_back(num(e, ctx + ".sigma"));
    if (sigma.empty()) throw ValidationError(ctx + ".sigma: expected a nonempty array");
    return gaussian_window(sigma, j.contains("amplitude") ? complex_of(j.at("amplitude"), ctx + ".amplitude") : cplx(1.0));
  }
  if (t == "bump") {
    const std::size_t d = j.contains("d") ? count(j.at("d"), ctx + ".d") : 1;
    return bump_window(default_window_grid(d), num_or(j, "radius", 3.0, ctx));
  }
  if (t == "moment") {
    std::vector<int> beta;
    for (auto& e : req(j, "beta", ctx)) beta.push_back(static_cast<int>(count(e, ctx + ".beta")));
    return window_moment(window_from_json(req(j, "base", ctx), ctx + ".base"), beta);
  }
  if (t == "chirp") return window_chirp(window_from_json(req(j, "base", ctx), ctx + ".base"), mat_of(req(j, "B", ctx), ctx + ".B"));
  if (t == "pullback") return window_pullback(window_from_json(req(j, "base", ctx), ctx + ".base"), mat_of(req(j, "A", ctx), ctx + ".A"));
  if (t == "tensor") return window_tensor(window_from_json(req(j, "first", ctx), ctx + ".first"),
                                          window_from_json(req(j, "second", ctx), ctx + ".second"));
  throw ValidationError(ctx + ".type: unknown window type '" + t + "'");
}

/// An ordered array of generators, applied first to last.
inline MetaplecticElement metaplectic_from_json(const json& j, const std::string& ctx = "metaplectic") {
  using namespace detail;
  const json arr = j.is_array() ? j : json::array({j});
  if (arr.empty()) throw ValidationError(ctx + ": empty composition");
  std::vector<MetaplecticElement> parts;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const json& g = arr[k];
    std::string c = ctx + "[" + std::to_string(k) + "]";
    std::string t = type_of(g, c);
    if (t == "coord_change") parts.push_back(coord_change(mat_of(req(g, "A", c), c + ".A")));
    else if (t == "fourier") parts.push_back(fourier_rot(g.contains("d") ? count(g.at("d"), c + ".d") : 1));
    else if (t == "shear") parts.push_back(shear(mat_of(req(g, "B", c), c + ".B")));
    else if (t == "shift") parts.push_back(shift(vec_of(req(g, "x0", c), c + ".x0"), vec_of(req(g, "xi0", c), c + ".xi0")));
    else throw ValidationError(c + ".type: unknown generator '" + t + "'");
  }
  return parts.size() == 1 ? parts.front() : compose(parts);
}

/// {"d": 2, "vectors": [[1, 0]]} spans Y; {"d": 2, "n": 1} is R^n x {0}.
inline SubspaceSpec subspace_from_json(const json& j, const std::string& ctx = "subspace") {
  using namespace detail;
  const std::size_t d = count(req(j, "d", ctx), ctx + ".d");
  if (j.contains("vectors")) {
    const json& v = j.at("vectors");
    if (!v.is_array()) throw ValidationError(ctx + ".vectors: expected an array");
    if (v.empty()) return coordinate_subspace(d, 0);
    Mat M(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) {
      Vec c = vec_of(v[k], ctx + ".vectors");
      if (static_cast<std::size_t>(c.size()) != d) throw DimensionError(ctx + ".vectors: vector length differs from d");
      M.col(static_cast<Eigen::Index>(k)) = c;
    }
    return make_subspace(M);
  }
  return coordinate_subspace(d, count(req(j, "n", ctx), ctx + ".n"));
}

// ---------------------------------------------------------------------------
// Reports

inline json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

/// Non-finite numbers as strings, since JSON has no infinities.
inline json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

inline json defaults_json() {
  namespace D = defaults;
  return {{"version", D::kVersion},
          {"grid_1d", {{"L", D::kHalfWidth1}, {"N", D::kSamples1}}},
          {"grid_2d", {{"L", D::kHalfWidth2}, {"N", D::kSamples2}}},
          {"kernel_grid", {{"L", D::kKernelHalfWidth}, {"N", D::kKernelSamples}}},
          {"window", "psi0"},
          {"verdict_rule",
           {{"slope_tol", D::kSlopeTol}, {"ceiling", D::kCeiling}, {"r_min", D::kShellRMin}, {"shells", D::kShells},
            {"floor_rel", D::kFloorRel}}},
          {"conormal", {{"k_max", D::kConormalOrder}, {"N", D::kConormalN}}},
          {"wavefront",
           {{"aperture_deg_1d", D::kApertureDeg1}, {"aperture_deg_2d", D::kApertureDeg2}, {"threshold", D::kThreshold},
            {"r_min", D::kWfRMin}, {"r_max_frac", D::kWfRMaxFrac}, {"directions_1d", D::kDirections1},
            {"directions_2d", D::kDirections2}}},
          {"seed", D::kSeed}};
}

/// SOURCE_DATE_EPOCH when set, otherwise the epoch, so that manifests are
/// reproducible.
inline std::string created_stamp() {
  long long t = 0;
  if (const char* s = std::getenv("SOURCE_DATE_EPOCH")) t = std::atoll(s);
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline json sidecar_json(const std::string& role, const json& window, const json& signal) {
  return {{"role", role}, {"window", window}, {"signal", signal}, {"created", created_stamp()}, {"defaults", defaults_json()}};
}

inline json report_json(const SeminormReport& r) {
  json e = json::array();
  for (auto& x : r.entries)
    e.push_back({{"alpha", x.alpha}, {"growth", finite_or_string(x.growth)}, {"constant", finite_or_string(x.constant)},
                 {"floor_hit", x.floor_hit}, {"pass", x.pass}});
  return {{"kind", r.kind}, {"symbol", r.symbol}, {"m", r.m}, {"rho", r.rho}, {"M", r.M}, {"N", r.N},
          {"entries", e}, {"max_constant", finite_or_string(r.max_constant)}, {"ceiling", r.ceiling},
          {"slope_tol", r.slope_tol}, {"verdict", r.verdict}};
}

inline json report_json(const DecayReport& r) {
  return {{"region", r.region}, {"radii", r.radii}, {"exponent", finite_or_string(r.exponent)},
          {"residual", r.residual}, {"constant", finite_or_string(r.constant)}, {"verdict", r.verdict}};
}

inline json report_json(const OrderEstimate& r) {
  return {{"order", finite_or_string(r.order)}, {"residual", r.residual}, {"floor_hit", r.floor_hit},
          {"shells_used", r.shells_used}};
}

inline json report_json(const ClassicalReport& r) {
  return {{"symbol", r.symbol}, {"m", r.m}, {"N", r.N}, {"defect_order", finite_or_string(r.defect_order)},
          {"threshold", r.threshold}, {"floor_hit", r.floor_hit}, {"classical", r.classical}};
}

inline json report_json(const ContinuityReport& r) {
  return {{"symbol", r.symbol}, {"m", r.m}, {"s", r.s}, {"ratio", finite_or_string(r.ratio)}, {"argmax", r.argmax},
          {"ratios", r.ratios}};
}

inline json report_json(const WaveFrontReport& r) {
  json dirs = json::array(), ex = json::array(), in = json::array();
  for (std::size_t k = 0; k < r.directions.size(); ++k) {
    dirs.push_back(vec_json(r.directions[k]));
    ex.push_back(r.exponents[k]);
    in.push_back(static_cast<bool>(r.in[k]));
  }
  return {{"d", r.d}, {"aperture_deg", r.aperture_deg}, {"threshold", r.threshold}, {"radii", {r.r_min, r.r_max}},
          {"directions", dirs}, {"exponents", ex}, {"in", in}, {"provenance", r.provenance}};
}

inline json report_json(const ContainmentReport& r) {
  return {{"verdict", r.verdict}, {"tolerance_deg", r.tolerance_deg}, {"worst_deg", r.worst_deg},
          {"outside", r.outside.size()}};
}

inline json report_json(const TransportReport& r) {
  return {{"verdict", r.verdict},
          {"tolerance_deg", r.comparison.tolerance_deg},
          {"unmatched_expected", r.comparison.unmatched_expected},
          {"unmatched_actual", r.comparison.unmatched_actual},
          {"before", report_json(r.before)},
          {"after", report_json(r.after)}};
}

}  // namespace phasescope
