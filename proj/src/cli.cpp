#include "plainwalk/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "plainwalk/boundary.hpp"
#include "plainwalk/config.hpp"
#include "plainwalk/drift_entropy.hpp"
#include "plainwalk/linearize.hpp"
#include "plainwalk/simulate.hpp"
#include "plainwalk/util.hpp"

namespace plainwalk {

namespace {

namespace fs = std::filesystem;

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + dir + "/" + name);
  out << content;
}

void write_json(const std::string& dir, const std::string& name, const Json& j) {
  write_file(dir, name, j.dump(2) + "\n");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool hard = true;
  std::string note;
};

Json checks_to_json(const std::vector<Check>& checks) {
  Json arr = Json::array();
  for (const Check& c : checks) {
    Json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["bound"] = c.bound;
    j["pass"] = c.pass;
    j["hard"] = c.hard;
    if (!c.note.empty()) j["note"] = c.note;
    arr.push_back(j);
  }
  return arr;
}

void print_checks(const std::vector<Check>& checks) {
  for (const Check& c : checks) {
    std::printf("%-4s %-38s %12.4g (bound %.4g)%s\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.bound,
                c.note.empty() ? "" : (" [" + c.note + "]").c_str());
  }
}

// Nearest-neighbor pipeline shared by the solver-backed subcommands. Scalar
// walks with identity mass are stripped first (gamma and h pick up the
// factor 1 - p_e through E[tau] of the stripped walk).
struct Pipeline {
  RunConfig cfg;
  double pe = 0.0;
  ScalarWalkSpec stripped;  // scalar inputs only
  LinearizationResult lin;
  ColoredKernel kernel;
  BoundarySolution boundary;
  bool from_scalar = false;

  explicit Pipeline(const RunConfig& c, Construction construction = Construction::Prefix) : cfg(c) {
    if (cfg.is_scalar()) {
      from_scalar = true;
      const ScalarWalkSpec& w = *cfg.scalar;
      pe = w.identity_mass();
      stripped = w;
      if (pe > 0.0) {
        ScalarWalkSpec s;
        s.group = w.group;
        for (size_t i = 0; i < w.support.size(); ++i)
          if (!w.support[i].empty()) {
            s.support.push_back(w.support[i]);
            s.probs.push_back(w.probs[i] / (1.0 - pe));
          }
        stripped = std::move(s);
      }
      lin = construction == Construction::Prefix ? linearize_prefix(stripped) : linearize_reversible(stripped);
      kernel = lin.kernel;
    } else {
      kernel = *cfg.colored;
    }
    boundary = solve_boundary(kernel, cfg.solver.tol, cfg.solver.max_iter);
  }

  // drift and entropy of the input walk (tilde values scaled back through
  // E[tau] and the stripped identity mass)
  double drift(double* tilde = nullptr) const {
    double g = drift_exact(kernel, boundary.traffic).value;
    if (tilde) *tilde = g;
    if (!from_scalar) return g;
    return (1.0 - pe) * lin.expected_return_time * g;
  }

  EntropyReport entropy(double* tilde = nullptr) const {
    EntropyReport rep;
    if (kernel.r == 1) {
      rep.value = entropy_colorless_closed(kernel, boundary);
      rep.method = "closed-form-oracle";
    } else {
      rep = entropy_explicit_mc(kernel, boundary, cfg.mc.nu_samples, cfg.mc.seed, cfg.mc.nu_depth, cfg.mc.threads);
    }
    if (tilde) *tilde = rep.value;
    if (from_scalar) {
      double scale = (1.0 - pe) * lin.expected_return_time;
      rep.value *= scale;
      rep.ci_half_width *= scale;
    }
    return rep;
  }
};

Json boundary_to_json(const Pipeline& p) {
  const PlainGroup& G = *p.kernel.group;
  Json j;
  Json q = Json::object(), mu = Json::object(), delta = Json::object();
  for (Gen g = 0; g < G.alphabet_size(); ++g) {
    q[G.letter_name(g)] = matrix_to_json(p.boundary.hitting.q[g]);
    mu[G.letter_name(g)] = matrix_to_json(p.boundary.traffic.mu[g]);
    Json d = Json::array();
    for (int u = 0; u < p.kernel.r; ++u) d.push_back(p.boundary.traffic.delta[g](u));
    delta[G.letter_name(g)] = d;
  }
  j["q"] = q;
  j["mu"] = mu;
  j["Delta"] = delta;
  Json pi = Json::array();
  for (int u = 0; u < p.kernel.r; ++u) pi.push_back(p.boundary.traffic.pi(u));
  j["pi"] = pi;
  j["iterations"] = p.boundary.hitting.iterations;
  j["residuals"] = Json{{"hitting", p.boundary.hitting.residual},
                        {"traffic", p.boundary.traffic.traffic_residual},
                        {"cross_check", p.boundary.traffic.cross_check_distance},
                        {"mu_qd", p.boundary.traffic.mu_qd_residual},
                        {"stationarity", stationarity_residual(p.kernel, p.boundary.hitting, p.boundary.traffic)}};
  j["traffic_fallback"] = p.boundary.traffic.used_fallback;
  return j;
}

int cmd_validate(const RunConfig& cfg) {
  Json rep;
  bool ok = true;
  if (cfg.is_scalar()) {
    const ScalarWalkSpec& w = *cfg.scalar;
    bool capped = false;
    bool gen = support_generates_group(*w.group, w.support, &capped);
    rep["type"] = "scalar";
    rep["support_size"] = w.support.size();
    rep["max_word_length"] = w.max_word_length();
    rep["identity_mass"] = w.identity_mass();
    rep["symmetric"] = w.is_symmetric();
    rep["nearest_neighbor"] = w.is_nearest_neighbor();
    rep["support_generates"] = gen;
    ok = gen;
  } else {
    ValidationReport v = validate(*cfg.colored);
    rep["type"] = "colored";
    rep["r"] = cfg.colored->r;
    rep["stochastic_residual"] = v.stochastic_residual;
    rep["color_chain_irreducible"] = v.color_chain_irreducible;
    rep["support_generates"] = v.support_generates;
    ReversibilityReport rev = check_reversible(*cfg.colored);
    rep["reversible"] = rev.reversible;
    rep["reversibility_violation"] = rev.max_violation;
    ok = v.ok(1e-9);
  }
  rep["ok"] = ok;
  write_json(cfg.out_dir, "validate.json", rep);
  std::cout << rep.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_linearize(const RunConfig& cfg, const std::string& construction) {
  if (!cfg.is_scalar()) throw ConfigError("linearize needs a scalar walk");
  Construction c = construction == "reversible" ? Construction::Reversible : Construction::Prefix;
  LinearizationResult lin = c == Construction::Prefix ? linearize_prefix(*cfg.scalar) : linearize_reversible(*cfg.scalar);
  FirstReturnReport fr = verify_first_return(lin, *cfg.scalar);

  RunConfig out = cfg;
  out.scalar.reset();
  out.colored = lin.kernel;
  write_json(cfg.out_dir, "linearized.json", config_to_json(out));

  Json rep;
  rep["construction"] = c == Construction::Prefix ? "general" : "reversible";
  rep["r"] = lin.kernel.r;
  rep["suffix_count_estimate"] = lin.suffix_count_estimate;
  rep["expected_tau"] = lin.expected_return_time;
  rep["first_return_max_law_error"] = fr.max_law_error;
  rep["expected_tau_error"] = fr.expected_tau_error;
  Json labels = Json::array();
  for (const auto& l : lin.color_labels) labels.push_back(l);
  rep["color_labels"] = labels;
  write_json(cfg.out_dir, "linearize_report.json", rep);
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_solve_boundary(const RunConfig& cfg) {
  Pipeline p(cfg);
  Json j = boundary_to_json(p);
  if (p.from_scalar) {
    j["note"] = "scalar input linearized (prefix construction) before solving";
    j["expected_tau"] = p.lin.expected_return_time;
    j["stripped_identity_mass"] = p.pe;
  }
  write_json(cfg.out_dir, "boundary.json", j);
  std::cout << j["residuals"].dump(2) << "\n";
  return 0;
}

int cmd_drift(const RunConfig& cfg) {
  Pipeline p(cfg);
  double tilde = 0.0;
  double gamma = p.drift(&tilde);
  Json j;
  j["value"] = gamma;
  j["method"] = "exact";
  if (p.from_scalar) {
    j["tilde_gamma"] = tilde;
    j["expected_tau"] = p.lin.expected_return_time;
    j["stripped_identity_mass"] = p.pe;
    j["r"] = p.kernel.r;
  }
  write_json(cfg.out_dir, "drift.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_entropy(const RunConfig& cfg) {
  Pipeline p(cfg);
  double tilde = 0.0;
  EntropyReport rep = p.entropy(&tilde);
  Json j;
  j["value"] = rep.value;
  j["method"] = rep.method;
  if (rep.method == "mc") {
    j["ci_half_width"] = rep.ci_half_width;
    j["n_samples"] = rep.n_samples;
    j["depth"] = rep.depth;
    j["depth_doubling_delta"] = rep.depth_doubling_delta;
    j["seed"] = rep.seed;
  }
  if (p.from_scalar) {
    j["tilde_h"] = tilde;
    j["expected_tau"] = p.lin.expected_return_time;
    j["stripped_identity_mass"] = p.pe;
    j["r"] = p.kernel.r;
  }
  write_json(cfg.out_dir, "entropy.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  Pipeline p(cfg);
  double gamma = p.drift();
  EntropyReport ent = p.entropy();
  double h = ent.value;

  long T = cfg.mc.horizon;
  TrajectoryBatch batch = cfg.is_scalar() ? trajectory_batch(*cfg.scalar, cfg.mc.n_paths, T, cfg.mc.seed, cfg.mc.threads)
                                          : trajectory_batch(*cfg.colored, cfg.mc.n_paths, T, cfg.mc.seed, 0, cfg.mc.threads);

  bool with_perm = cfg.is_scalar() && cfg.group->num_finite_factors() == 0;
  RandomActionSeries perm;
  long t_perm = 0;
  if (with_perm) {
    double logn = std::log(static_cast<double>(cfg.mc.perm_size));
    t_perm = std::min<long>(T, static_cast<long>(2.0 * logn / std::max(h, 0.05)) + 2);
    perm = random_action_entropy(*cfg.scalar, cfg.mc.perm_size, t_perm, cfg.mc.seed + 1, h);
  }

  std::string csv = "t,mean_abs,gamma_line,entropy_est,h_line\n";
  for (long t = 0; t <= T; ++t) {
    csv += std::to_string(t);
    csv += ",";
    csv += fmt(batch.mean_abs[t]);
    csv += ",";
    csv += fmt(gamma * t);
    csv += ",";
    if (with_perm && t <= t_perm) csv += fmt(perm.entropy[t]);
    csv += ",";
    csv += fmt(h * t);
    csv += "\n";
  }
  write_file(cfg.out_dir, "series.csv", csv);

  double slope = series_slope(batch.mean_abs, T / 2, T);
  Json j;
  j["gamma_exact"] = gamma;
  j["h"] = h;
  j["mean_abs_slope"] = slope;
  j["slope_rel_error"] = std::abs(slope - gamma) / std::max(1e-12, std::abs(gamma));
  if (with_perm) {
    j["perm_entropy_slope"] = perm.slope;
    j["perm_window_end"] = perm.window_end;
    j["perm_slope_rel_error"] = std::abs(perm.slope - h) / std::max(1e-12, std::abs(h));
  }
  j["n_paths"] = cfg.mc.n_paths;
  j["horizon"] = T;
  j["seed"] = cfg.mc.seed;
  write_json(cfg.out_dir, "simulate.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  std::vector<Check> checks;
  auto add = [&](const std::string& name, double value, double bound, bool hard = true, const std::string& note = "") {
    checks.push_back({name, value, bound, value <= bound, hard, note});
  };

  Pipeline p(cfg);
  if (cfg.is_scalar()) {
    FirstReturnReport fr = verify_first_return(p.lin, p.stripped);
    add("first_return_law (prefix)", fr.max_law_error, 1e-12);
    add("expected_tau formula (prefix)", fr.expected_tau_error, 1e-10);
    if (p.stripped.is_symmetric()) {
      LinearizationResult rev = linearize_reversible(p.stripped);
      FirstReturnReport fr2 = verify_first_return(rev, p.stripped);
      add("first_return_law (reversible)", fr2.max_law_error, 1e-12);
      add("expected_tau formula (reversible)", fr2.expected_tau_error, 1e-10);
      ReversibilityReport rr = check_reversible(rev.kernel);
      add("detailed_balance (reversible)", rr.max_violation, 1e-12);
    }
  }
  ValidationReport v = validate(p.kernel);
  add("kernel stochasticity", v.stochastic_residual, 1e-10);
  checks.push_back({"kernel quasi-irreducible", v.color_chain_irreducible && v.support_generates ? 0.0 : 1.0, 0.5,
                    v.color_chain_irreducible && v.support_generates, true, ""});

  add("hitting residual", p.boundary.hitting.residual, std::max(cfg.solver.tol * 10, 1e-11));
  add("traffic residual", p.boundary.traffic.traffic_residual, 1e-8);
  add("traffic dual-path distance", p.boundary.traffic.cross_check_distance, 1e-8);
  add("mu = q Delta residual", p.boundary.traffic.mu_qd_residual, 1e-8);

  double mu_le_q = 0.0, row_sto = 0.0;
  Matrix total = Matrix::Zero(p.kernel.r, p.kernel.r);
  for (Gen g = 0; g < p.kernel.group->alphabet_size(); ++g) {
    mu_le_q = std::max(mu_le_q, (p.boundary.traffic.mu[g] - p.boundary.hitting.q[g]).maxCoeff());
    total += p.boundary.traffic.mu[g];
  }
  row_sto = (total.rowwise().sum() - Vector::Ones(p.kernel.r)).cwiseAbs().maxCoeff();
  add("mu <= q", mu_le_q, 1e-9);
  add("sum mu row-stochastic", row_sto, 1e-9);
  add("stationarity residual", stationarity_residual(p.kernel, p.boundary.hitting, p.boundary.traffic), 1e-10);

  double cyl_err = 0.0;
  for (int len = 1; len <= 3; ++len) {
    for (int u = 0; u < p.kernel.r; ++u) {
      double total_mass = 0.0;
      for (const Word& w : p.kernel.group->reduced_words(len))
        total_mass += harmonic_cylinder({u, w}, p.kernel, p.boundary.hitting, p.boundary.traffic);
      cyl_err = std::max(cyl_err, std::abs(total_mass - 1.0));
    }
  }
  add("cylinder masses sum to 1 (n<=3)", cyl_err, 1e-8);

  if (p.kernel.group->is_extended_free()) {
    TrafficSolution free_mu = free_group_mu(p.kernel, p.boundary.hitting);
    double dist = 0.0;
    for (Gen g = 0; g < p.kernel.group->alphabet_size(); ++g)
      dist = std::max(dist, (free_mu.mu[g] - p.boundary.traffic.mu[g]).cwiseAbs().maxCoeff());
    add("free-group closed form vs traffic", dist, 1e-8);
    ZConsistencyReport z = z_consistency_check(p.kernel, p.boundary.hitting);
    if (z.applicable) {
      add("z-relation (Z_g+Q_g)Q_g = I", z.max_identity_residual, 1e-8);
      checks.push_back({"z spectra positive real parts", std::min(z.min_real_part_qp, z.min_real_part_z), 0.0,
                        z.min_real_part_qp > 0 && z.min_real_part_z > 0, true, ""});
    } else {
      checks.push_back({"z-relation", 0.0, 0.0, true, false, z.notice});
    }
  }

  LalleyReport lal = find_lalley_params(p.boundary.hitting, *p.kernel.group);
  checks.push_back({"lalley column-support condition", lal.holds ? 0.0 : 1.0, 0.5, lal.holds, cfg.is_scalar(),
                    lal.holds ? ("k=" + std::to_string(lal.k) + " m=" + std::to_string(lal.m)) : lal.violation});

  if (cfg.is_scalar()) {
    // renewal scaling against simulation of the original walk
    double tilde = drift_exact(p.kernel, p.boundary.traffic).value;
    double gamma = (1.0 - p.pe) * p.lin.expected_return_time * tilde;
    DriftEstimate est = empirical_drift(*cfg.scalar, cfg.mc.n_paths, cfg.mc.horizon, cfg.mc.seed, cfg.mc.threads);
    double margin = est.slope_ci_half_width * (4.0 / 1.96);
    checks.push_back({"renewal scaling E[tau] gamma~ vs sim", std::abs(gamma - est.slope_estimate), margin,
                      std::abs(gamma - est.slope_estimate) <= margin, true, "4-sigma window"});

    RenewalStats rs = renewal_statistics(p.lin, p.stripped, 100000, cfg.mc.seed + 17);
    checks.push_back({"renewal mean gap vs E[tau]", std::abs(rs.mean_gap - p.lin.expected_return_time),
                      rs.gap_ci_half_width * (4.0 / 1.96),
                      std::abs(rs.mean_gap - p.lin.expected_return_time) <= rs.gap_ci_half_width * (4.0 / 1.96), true,
                      ""});
    checks.push_back({"renewal gaps lag-1 correlation", std::abs(rs.lag1_corr), 4.0 * rs.lag1_sigma,
                      std::abs(rs.lag1_corr) <= 4.0 * rs.lag1_sigma, true, ""});
    checks.push_back({"renewal increment law (max z)", rs.law_max_z, 4.5, rs.law_max_z <= 4.5, true, ""});
  }

  print_checks(checks);
  Json j;
  j["checks"] = checks_to_json(checks);
  bool all = true;
  for (const Check& c : checks)
    if (c.hard && !c.pass) all = false;
  j["ok"] = all;
  write_json(cfg.out_dir, "verify.json", j);
  return all ? 0 : 1;
}

int cmd_preset_report(const RunConfig& cfg) {
  Json j;
  j["preset"] = cfg.preset_name;
  Pipeline p(cfg);
  double tilde_gamma = 0.0, tilde_h = 0.0;
  double gamma = p.drift(&tilde_gamma);
  EntropyReport ent = p.entropy(&tilde_h);
  j["gamma"] = gamma;
  j["h"] = ent.value;
  j["h_method"] = ent.method;
  if (ent.method == "mc") {
    j["h_ci_half_width"] = ent.ci_half_width;
    j["nu_depth"] = ent.depth;
    j["seed"] = ent.seed;
  }
  if (p.from_scalar) {
    j["r"] = p.kernel.r;
    j["expected_tau"] = p.lin.expected_return_time;
    j["tilde_gamma"] = tilde_gamma;
    j["tilde_h"] = tilde_h;
  }
  j["residuals"] = boundary_to_json(p)["residuals"];

  std::string name = cfg.preset_name.substr(0, cfg.preset_name.find(' '));
  if (name == "application-sec6") {
    std::istringstream is(cfg.preset_name);
    std::string tok;
    is >> tok;
    ApplicationWalkParams params;
    while (is >> tok) {
      auto eq = tok.find('=');
      std::string key = tok.substr(0, eq);
      double val = std::stod(tok.substr(eq + 1));
      if (key == "L") params.L = static_cast<int>(val);
      if (key == "k1") params.k1 = static_cast<int>(val);
      if (key == "k2") params.k2 = static_cast<int>(val);
    }
    params.p1.assign(params.L, 0.5 / params.L);
    params.p2.assign(params.L, 0.5 / params.L);
    double oracle = application_drift_oracle(params);
    j["oracle_gamma"] = oracle;
    j["oracle_pipeline_diff"] = std::abs(oracle - gamma);
  }
  write_json(cfg.out_dir, "report.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"linearization, boundary solving, drift and entropy for random walks on plain groups"};
  app.require_subcommand(1);

  std::string config_path, preset_spec, out_dir, construction = "general";
  double tol = -1.0;
  std::int64_t seed = -1;
  int threads = 0;
  std::vector<std::string> preset_tokens;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config path");
    sub->add_option("--preset", preset_spec, "preset name with optional key=value parameters");
    sub->add_option("--seed", seed, "RNG seed override");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--tol", tol, "solver tolerance override");
    sub->add_option("--threads", threads, "worker thread cap (0 = PLAINWALK_THREADS or hardware)");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check walk/kernel validity");
  CLI::App* linearize_cmd = app.add_subcommand("linearize", "emit a nearest-neighbor colored kernel");
  linearize_cmd->add_option("--construction", construction, "general | reversible")
      ->check(CLI::IsMember({"general", "reversible"}));
  CLI::App* solve_cmd = app.add_subcommand("solve-boundary", "solve hitting and traffic equations");
  CLI::App* drift_cmd = app.add_subcommand("drift", "exact drift via the boundary solution");
  CLI::App* entropy_cmd = app.add_subcommand("entropy", "entropy via the explicit formula");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo series and CSV output");
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the invariant suite; nonzero exit on violation");
  CLI::App* preset_cmd = app.add_subcommand("preset", "run a built-in instance end to end");
  preset_cmd->add_option("name", preset_tokens, "preset name and key=value parameters");
  for (CLI::App* sub : {validate_cmd, linearize_cmd, solve_cmd, drift_cmd, entropy_cmd, simulate_cmd, verify_cmd,
                        preset_cmd})
    add_common(sub);

  std::vector<const char*> argv;
  argv.push_back("plainwalk");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (app.got_subcommand(preset_cmd)) {
      std::string spec;
      for (const auto& t : preset_tokens) spec += (spec.empty() ? "" : " ") + t;
      if (spec.empty()) spec = preset_spec;
      if (spec.empty()) throw ConfigError("preset needs a name");
      cfg = preset_config(spec);
    } else if (!preset_spec.empty()) {
      cfg = preset_config(preset_spec);
    } else if (!config_path.empty()) {
      cfg = load_config_file(config_path);
    } else {
      throw ConfigError("provide --config PATH or --preset NAME");
    }
    if (seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (tol > 0) cfg.solver.tol = tol;
    if (threads > 0) cfg.mc.threads = threads;

    if (app.got_subcommand(validate_cmd)) return cmd_validate(cfg);
    if (app.got_subcommand(linearize_cmd)) return cmd_linearize(cfg, construction);
    if (app.got_subcommand(solve_cmd)) return cmd_solve_boundary(cfg);
    if (app.got_subcommand(drift_cmd)) return cmd_drift(cfg);
    if (app.got_subcommand(entropy_cmd)) return cmd_entropy(cfg);
    if (app.got_subcommand(simulate_cmd)) return cmd_simulate(cfg);
    if (app.got_subcommand(verify_cmd)) return cmd_verify(cfg);
    if (app.got_subcommand(preset_cmd)) return cmd_preset_report(cfg);
    throw ConfigError("no subcommand");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace plainwalk
