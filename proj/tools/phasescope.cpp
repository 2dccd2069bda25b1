// Batch command-line surface: one pipeline per command, PSF1/JSON/CSV out.
// Exit codes: 0 success, 2 verdict failed, 3 input error, 4 numerical failure.

#include <iostream>

#include <CLI11.hpp>
#include <phasescope/io.hpp>

using namespace phasescope;

namespace {

constexpr int kVerdictFail = 2, kInputError = 3, kNumericalError = 4;

/// A JSON literal, or @path to a JSON file.
json parse_arg(const std::string& text, const std::string& what) {
  if (text.empty()) throw ValidationError(what + ": value required");
  try {
    if (text[0] == '@') return json::parse(read_file(text.substr(1)));
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what + ": malformed JSON (" + std::string(e.what()) + ")");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(what + ": expected comma-separated numbers");
    }
  }
  return out;
}

bool finite_values(const std::vector<cplx>& v) {
  for (auto& c : v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

struct Common {
  std::string signal, window = R"({"type":"psi0"})", symbol, grid, out = "phasescope_out", op;
  std::size_t threads = 0;
  unsigned long long seed = defaults::kSeed;
  bool csv = false;
};

struct Context {
  std::string command;
  Common c;
  json config = json::object();

  Signal signal() {
    json j = parse_arg(c.signal, "--signal");
    config["signal"] = j;
    return signal_from_json(j, "signal");
  }
  Window window(std::size_t d) {
    json j = parse_arg(c.window, "--window");
    if (j.is_object() && j.value("type", "") == "psi0" && !j.contains("d")) j["d"] = d;
    config["window"] = j;
    return window_from_json(j, "window");
  }
  Signal symbol() {
    json j = parse_arg(c.symbol, "--symbol");
    config["symbol"] = j;
    return signal_from_json(j, "symbol");
  }
  std::optional<GridSpec> grid() {
    if (c.grid.empty()) return std::nullopt;
    json j = parse_arg(c.grid, "--grid");
    config["grid"] = j;
    return grid_from_json(j);
  }
  MetaplecticElement op() {
    json j = parse_arg(c.op, "--op");
    config["op"] = j;
    return metaplectic_from_json(j);
  }

  /// Writes <out>.json with the report, config and defaults; returns the exit code.
  int finish(json report, std::optional<bool> verdict = std::nullopt) {
    json doc{{"command", command},
             {"config", config},
             {"seed", c.seed},
             {"defaults", defaults_json()},
             {"created", created_stamp()},
             {"report", std::move(report)}};
    if (verdict) doc["verdict"] = *verdict;
    write_file(c.out + ".json", doc.dump(2) + "\n");
    return verdict.value_or(true) ? 0 : kVerdictFail;
  }

  void write_function(const GridFunction& f, const std::string& role, const json& window) {
    if (!finite_values(f.values)) throw NumericalError(role + ": non-finite values");
    write_psf1(c.out + ".psf1", f);
    write_file(c.out + ".psf1.json", sidecar_json(role, window, config.value("signal", json())).dump(2) + "\n");
    if (c.csv) write_file(c.out + ".csv", grid_csv(f));
  }
};

void add_common(CLI::App* s, Common& c, bool signal, bool window, bool symbol, bool grid) {
  if (signal) s->add_option("--signal", c.signal, "signal descriptor (JSON or @file)")->required();
  if (window) s->add_option("--window", c.window, "window descriptor (JSON or @file), default psi0");
  if (symbol) s->add_option("--symbol", c.symbol, "symbol descriptor on R^{2d} (JSON or @file)")->required();
  if (grid) s->add_option("--grid", c.grid, R"(grid {"d":1,"L":12,"N":256} (JSON or @file))");
  s->add_option("--out", c.out, "output path prefix");
  s->add_option("--threads", c.threads, "worker cap; overrides PHASESCOPE_THREADS");
  s->add_option("--seed", c.seed, "seed recorded in the manifest (default 0)");
  s->add_flag("--csv", c.csv, "also write a CSV export");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phasescope: phase-space analysis with the FBI-type transform T_g u(x, xi)"};
  app.require_subcommand(1);
  Context ctx;
  Common& c = ctx.c;

  double m = 0.0, rho = 1.0, s = 0.0, aperture = 0.0, threshold = defaults::kThreshold;
  int order = 2, N = defaults::kConormalN, alpha = 0, beta = 0;
  std::string method = "direct", field, synthesis, subspace, M1, M2, radii, kernel;

  auto* transform_cmd = app.add_subcommand("transform", "transform T_g u on a phase-space grid; PSF1 field out");
  add_common(transform_cmd, c, true, true, false, true);

  auto* invert_cmd = app.add_subcommand("invert", "inversion u = (h, g)^{-1} T_h^* T_g u of a stored field");
  invert_cmd->add_option("--field", field, "PSF1 phase-space field")->required();
  invert_cmd->add_option("--synthesis", synthesis, "synthesis window h (default: the analysis window)");
  add_common(invert_cmd, c, false, true, false, false);

  auto* meta_cmd = app.add_subcommand("metaplectic", "metaplectic covariance T_g(mu(chi) u) against T_{g'} u(chi z)");
  meta_cmd->add_option("--op", c.op, "generator or ordered array of generators (JSON or @file)")->required();
  add_common(meta_cmd, c, true, true, false, true);

  auto* sym_cmd = app.add_subcommand("symbol-check", "Shubin class S^m_rho membership by seminorm growth");
  sym_cmd->add_option("--m", m, "declared order");
  sym_cmd->add_option("--rho", rho, "type rho in [0, 1]");
  sym_cmd->add_option("--order", order, "derivative cap (direct), alpha cap (transform) or k (geometric)");
  sym_cmd->add_option("--N", N, "transform-side decay exponent");
  sym_cmd->add_option("--method", method, "direct | transform | geometric")->check(CLI::IsMember({"direct", "transform", "geometric"}));
  add_common(sym_cmd, c, false, true, true, false);

  auto* ord_cmd = app.add_subcommand("symbol-order", "fitted growth order of a symbol");
  add_common(ord_cmd, c, false, false, true, false);

  auto* cls_cmd = app.add_subcommand("classical-check", "classical (polyhomogeneous) expansion defect");
  cls_cmd->add_option("--m", m, "declared order");
  cls_cmd->add_option("--N", N, "expansion depth");
  add_common(cls_cmd, c, false, false, true, false);

  auto* wk_cmd = app.add_subcommand("weyl-kernel", "Weyl kernel K_a(x, y) on a rank-2d grid");
  add_common(wk_cmd, c, false, false, true, true);

  auto* wa_cmd = app.add_subcommand("weyl-apply", "a^w(x, D) u on the signal grid");
  add_common(wa_cmd, c, true, false, true, true);

  auto* kc_cmd = app.add_subcommand("kernel-check", "kernel-side membership test through the diagonal transform");
  kc_cmd->add_option("--kernel", kernel, "PSF1 kernel (instead of --symbol)");
  kc_cmd->add_option("--m", m, "declared order");
  kc_cmd->add_option("--rho", rho, "type rho");
  kc_cmd->add_option("--order", order, "derivative scan order (0..2)");
  kc_cmd->add_option("--alpha", alpha, "single x-derivative order")->excludes(kc_cmd->get_option("--order"));
  kc_cmd->add_option("--beta", beta, "single y-derivative order");
  kc_cmd->add_option("--N", N, "transversal decay exponent");
  add_common(kc_cmd, c, false, true, false, true);
  kc_cmd->add_option("--symbol", c.symbol, "symbol descriptor (JSON or @file)");

  auto* qs_cmd = app.add_subcommand("qs-norm", "Shubin-Sobolev norm ||<z>^s T_g u||_{L^2}");
  qs_cmd->add_option("--s", s, "order s, |s| <= 10");
  add_common(qs_cmd, c, true, true, false, true);

  auto* ct_cmd = app.add_subcommand("continuity", "Q^{s+m} -> Q^s continuity ratio of a^w over the test corpus");
  ct_cmd->add_option("--m", m, "symbol order");
  ct_cmd->add_option("--rho", rho, "symbol type");
  ct_cmd->add_option("--s", s, "target order");
  add_common(ct_cmd, c, false, true, true, true);

  auto* cm_cmd = app.add_subcommand("conormal-make", "conormal distribution from a symbol a(x, theta)");
  cm_cmd->add_option("--M1", M1, "d x n block (JSON matrix)")->required();
  cm_cmd->add_option("--M2", M2, "d x (d - n) block (JSON matrix)")->required();
  add_common(cm_cmd, c, false, false, true, true);

  auto* ctst_cmd = app.add_subcommand("conormal-test", "Gamma-conormal membership I^m(R^d, Y)");
  ctst_cmd->add_option("--subspace", subspace, R"(Y as {"d":..,"n":..} or {"d":..,"vectors":[..]})")->required();
  ctst_cmd->add_option("--m", m, "order");
  ctst_cmd->add_option("--rho", rho, "type");
  ctst_cmd->add_option("--order", order, "derivative cap k (0..2)");
  ctst_cmd->add_option("--N", N, "transversal decay exponent (0..5)");
  add_common(ctst_cmd, c, true, true, false, true);

  auto* wf_cmd = app.add_subcommand("wavefront", "Gabor wave-front set from conic decay of T_g u");
  wf_cmd->add_option("--aperture", aperture, "full cone aperture in degrees (default 10 in d = 1, 60 in d = 2)");
  wf_cmd->add_option("--threshold", threshold, "IN iff fitted exponent > -threshold");
  wf_cmd->add_option("--radii", radii, "r_min,r_max");
  add_common(wf_cmd, c, true, true, false, true);

  auto* tc_cmd = app.add_subcommand("transport-check", "WF(mu(chi) u) against chi(WF(u))");
  tc_cmd->add_option("--op", c.op, "generator or ordered array of generators (JSON or @file)")->required();
  add_common(tc_cmd, c, true, true, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), kInputError);
  }

  CLI::App* sub = app.get_subcommands().front();
  ctx.command = sub->get_name();
  if (c.threads > 0) set_threads(c.threads);
  const std::string& cmd = ctx.command;

  try {
    if (cmd == "transform") {
      Signal u = ctx.signal();
      Window g = ctx.window(dim(u));
      GridSpec grid = ctx.grid().value_or(default_grid(dim(u)));
      PhaseSpaceField F = transform(u, g, grid);
      ctx.write_function(field_as_function(F), "field", ctx.config["window"]);
      return ctx.finish({{"nodes", F.size()}, {"l2_norm", l2_norm(F)}});
    }
    if (cmd == "invert") {
      PhaseSpaceField F = field_from_function(read_psf1(field), field);
      ctx.config["field"] = field;
      Window g = ctx.window(F.dim());
      Window h = g;
      if (!synthesis.empty()) {
        ctx.config["synthesis"] = parse_arg(synthesis, "--synthesis");
        h = window_from_json(ctx.config["synthesis"], "synthesis");
      }
      GridFunction u = invert(F, g, h);
      ctx.write_function(u, "signal", ctx.config["window"]);
      return ctx.finish({{"l2_norm", l2_norm(u)}});
    }
    if (cmd == "metaplectic") {
      Signal u = ctx.signal();
      MetaplecticElement op = ctx.op();
      Window g = ctx.window(dim(u));
      CovarianceOptions o;
      o.grid = ctx.grid();
      double err = covariance_check(op, u, g, o);
      if (!std::isfinite(err)) throw NumericalError("metaplectic: non-finite covariance error");
      PhaseSpaceField F = transform(apply_signal(op, u), g, o.grid.value_or(default_grid(dim(u))));
      ctx.write_function(field_as_function(F), "field", ctx.config["window"]);
      return ctx.finish({{"max_relative_error", err}, {"tolerance", 1e-5}}, err <= 1e-5);
    }
    if (cmd == "symbol-check") {
      Signal a = ctx.symbol();
      SymbolGrid A = make_symbol("symbol", a, m, rho);
      SeminormReport r;
      if (method == "direct") r = shubin_seminorm(A, order);
      else if (method == "transform") r = transform_side_check(A, ctx.window(dim(a)), m, rho, order, N);
      else r = geometric_check(A, ctx.window(dim(a)), m, order, N);
      ctx.config["method"] = method;
      return ctx.finish(report_json(r), r.verdict);
    }
    if (cmd == "symbol-order") {
      Signal a = ctx.symbol();
      OrderEstimate e = estimate_order(make_symbol("symbol", a, 0.0));
      if (!std::isfinite(e.order) && !e.floor_hit) throw NumericalError("symbol-order: non-finite fit");
      return ctx.finish(report_json(e));
    }
    if (cmd == "classical-check") {
      Signal a = ctx.symbol();
      ClassicalReport r = classical_defect(make_symbol("symbol", a, m), m, N);
      return ctx.finish(report_json(r), r.classical);
    }
    if (cmd == "weyl-kernel" || cmd == "weyl-apply" || cmd == "continuity") {
      Signal a = ctx.symbol();
      if (dim(a) % 2 != 0) throw DimensionError("symbol must live on R^{2d}");
      GridSpec base = ctx.grid().value_or(dim(a) == 2 ? default_grid(1) : default_grid(dim(a) / 2));
      SymbolGrid A = weyl_symbol("symbol", a, base, m, rho);
      if (cmd == "weyl-kernel") {
        KernelGrid K = kernel_from_symbol(A);
        ctx.write_function(K.as_function(), "kernel", json());
        return ctx.finish({{"rank", K.spec.dim()}, {"nodes", K.values.size()}});
      }
      if (cmd == "weyl-apply") {
        Signal u = ctx.signal();
        GridFunction f = apply_weyl(A, grid_signal(u, base));
        ctx.write_function(f, "signal", json());
        return ctx.finish({{"l2_norm", l2_norm(f)}});
      }
      ContinuityReport r = continuity_ratio(A, s, sobolev_corpus(), ctx.window(base.dim()));
      return ctx.finish(report_json(r), std::isfinite(r.ratio));
    }
    if (cmd == "kernel-check") {
      KernelGrid K;
      if (!kernel.empty()) {
        GridFunction f = read_psf1(kernel);
        K = KernelGrid(f.spec, f.values, kernel);
        ctx.config["kernel"] = kernel;
      } else if (!c.symbol.empty()) {
        Signal a = ctx.symbol();
        K = kernel_from_symbol(weyl_symbol("symbol", a, ctx.grid().value_or(kernel_base_grid()), m, rho));
      } else {
        throw ValidationError("kernel-check: --kernel or --symbol required");
      }
      Window g = ctx.window(K.spec.dim());
      SeminormReport r = kc_cmd->count("--alpha") || kc_cmd->count("--beta")
                             ? kernel_conormal_check(K, g, m, rho, alpha, beta, N)
                             : kernel_conormal_scan(K, g, m, rho, order, N);
      return ctx.finish(report_json(r), r.verdict);
    }
    if (cmd == "qs-norm") {
      Signal u = ctx.signal();
      Window g = ctx.window(dim(u));
      double q = qs_norm(u, s, g, ctx.grid().value_or(default_grid(dim(u))));
      if (!std::isfinite(q)) throw NumericalError("qs-norm: non-finite norm");
      return ctx.finish({{"s", s}, {"norm", q}});
    }
    if (cmd == "conormal-make") {
      Signal a = ctx.symbol();
      json m1 = parse_arg(M1, "--M1"), m2 = parse_arg(M2, "--M2");
      ctx.config["M1"] = m1;
      ctx.config["M2"] = m2;
      Mat A1 = detail::mat_of(m1, "M1"), A2 = detail::mat_of(m2, "M2");
      const auto d = static_cast<std::size_t>(A1.rows());
      GridSpec base = ctx.grid().value_or(conormal_grid(d));
      ConormalSignal cs = construct(make_symbol("symbol", a, m, rho, symbol_field_grid(d)), A1, A2);
      ctx.write_function(grid_signal(cs.u, base), "signal", json());
      json basis = json::array();
      for (Eigen::Index k = 0; k < cs.Y.basis.cols(); ++k) basis.push_back(vec_json(cs.Y.basis.col(k)));
      return ctx.finish({{"subspace", {{"d", cs.Y.d}, {"vectors", basis}}}});
    }
    if (cmd == "conormal-test") {
      Signal u = ctx.signal();
      json y = parse_arg(subspace, "--subspace");
      ctx.config["subspace"] = y;
      SubspaceSpec Y = subspace_from_json(y);
      ConormalOptions o;
      o.grid = ctx.grid();
      ConormalReport r = membership_test(u, Y, m, rho, ctx.window(dim(u)), order, N, o);
      return ctx.finish(report_json(r), r.verdict);
    }
    if (cmd == "wavefront" || cmd == "transport-check") {
      Signal u = ctx.signal();
      Window g = ctx.window(dim(u));
      WaveFrontParams p;
      p.grid = ctx.grid();
      p.aperture_deg = aperture;
      p.threshold = threshold;
      if (!radii.empty()) {
        auto r = parse_list(radii, "--radii");
        if (r.size() != 2) throw ValidationError("--radii: expected r_min,r_max");
        p.r_min = r[0];
        p.r_max = r[1];
      }
      ctx.config["params"] = {{"aperture", aperture}, {"threshold", threshold}, {"radii", radii}};
      if (cmd == "wavefront") {
        WaveFrontReport r = wf_estimate(u, g, p);
        if (c.csv) write_file(c.out + ".csv", wavefront_csv(r));
        return ctx.finish(report_json(r));
      }
      TransportReport t = transport_check(u, ctx.op(), g, p);
      return ctx.finish(report_json(t), t.verdict);
    }
    throw ValidationError("unknown command " + cmd);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  }
}
