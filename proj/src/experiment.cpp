#include "shocklab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "shocklab/diagnostics.hpp"
#include "shocklab/dynamics.hpp"
#include "shocklab/error.hpp"
#include "shocklab/field_io.hpp"
#include "shocklab/initial_data.hpp"

namespace shocklab {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_output_root() {
  const char* env = std::getenv("SHOCKLAB_OUT");
  return (env != nullptr && *env != '\0') ? fs::path(env) : fs::path("runs");
}

namespace {

void write_json(const fs::path& path, const json& j) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

json admissibility_json(const AdmissibilityReport& r, bool overridden) {
  return json{{"lax", r.lax},
              {"flux_hyp", r.flux_hyp},
              {"strength_hyp", r.strength_hyp},
              {"flux_threshold", r.flux_threshold},
              {"strength_threshold", r.strength_threshold},
              {"admissible", r.admissible()},
              {"overridden", overridden}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_summary(const json& s, std::ostream& out) {
  if (s.value("aborted", false)) out << "ABORTED: " << s.value("abort_message", std::string("unknown")) << '\n';
  out << "samples " << s["samples"] << ", t_final " << fmt(s["t_final"].get<double>()) << ", t_min "
      << fmt(s["t_min"].get<double>()) << '\n';
  std::vector<std::string> enabled;
  for (const auto& e : s["enabled_checks"]) enabled.push_back(e.get<std::string>());
  for (const auto& [name, c] : s["checks"].items()) {
    const bool on = std::find(enabled.begin(), enabled.end(), name) != enabled.end();
    out << "  " << std::left << std::setw(16) << name << (c["pass"].get<bool>() ? "pass" : "FAIL")
        << (on ? "" : " (not enabled)") << "  margin " << fmt(c["margin"].get<double>()) << "  at t "
        << fmt(c["worst_t"].get<double>()) << '\n';
  }
  for (const char* key : {"l2_dist", "xdot"}) {
    const auto& f = s["decay"][key];
    out << "  fit " << std::left << std::setw(8) << key << "slope " << fmt(f["slope"].get<double>()) << " ("
        << f["points"] << " points" << (f["conclusive"].get<bool>() ? "" : ", inconclusive") << "), envelope "
        << (f["envelope_ok"].get<bool>() ? "ok" : "exceeded") << " (max ratio "
        << fmt(f["max_envelope_ratio"].get<double>()) << ")\n";
  }
  const auto& m = s["margins"];
  out << "  max positive residual " << fmt(m["max_positive_residual"].get<double>()) << ", final X "
      << fmt(m["final_X"].get<double>()) << " (bound " << fmt(m["x_bound"].get<double>()) << ")\n";
  if (s.contains("timedecay"))
    out << "  time-decay ratio " << fmt(s["timedecay"]["max_ratio"].get<double>()) << " with empirical constant "
        << fmt(s["timedecay"]["gn_constant"].get<double>()) << '\n';
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("SHA-256 unavailable");
  }
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return hex.str();
}

json summarize_run_dir(const fs::path& dir, std::optional<double> t_min) {
  const json manifest = read_json(dir / "manifest.json");
  const auto records = read_diagnostics_csv(dir / "diagnostics.csv");
  try {
    SummarySettings set;
    set.tol_residual = manifest.at("tol_residual").get<double>();
    set.t_min = t_min.value_or(manifest.at("t_min").get<double>());
    set.gn_constant = manifest.at("gn").at("constant").get<double>();
    set.l1_rel_tol = manifest.at("l1_rel_tol").get<double>();
    set.tail_tol = manifest.at("tail_tol").get<double>();
    set.enabled = manifest.at("enabled_checks").get<std::vector<std::string>>();
    const std::string status = manifest.at("status").get<std::string>();
    if (status != "completed") {
      set.aborted = true;
      set.abort_message = manifest.value("abort_message", std::string("run did not finish"));
    }
    return build_summary(records, constants_from_json(manifest.at("constants")), set);
  } catch (const json::exception& e) {
    throw IoError((dir / "manifest.json").string() + ": " + e.what());
  }
}

RunOutcome execute_run(const ExperimentConfig& cfg_in, const RunOptions& opts, std::ostream& log) {
  RunOutcome res;
  ExperimentConfig cfg = cfg_in;
  if (opts.seed) cfg.initial.seed = *opts.seed;
  if (opts.t_min) cfg.t_min = *opts.t_min;
  set_thread_count(opts.threads);

  // Pre-flight: nothing is written before the hypotheses are known to hold.
  FluxSpec flux;
  ShockData shock;
  AdmissibilityReport adm;
  try {
    flux = cfg.flux();
    shock = ShockData::make(flux, cfg.u_minus, cfg.u_plus);
    adm = check_admissibility(flux, shock);
    if (!adm.lax) {
      res.exit_code = kExitInadmissible;
      res.message = "Lax condition violated: u_minus = " + fmt(cfg.u_minus) + " must exceed u_plus = " +
                    fmt(cfg.u_plus);
      return res;
    }
    // The maximum principle confines u to [u+, u-]; sample a unit beyond either end.
    flux.verify(cfg.u_plus - 1.0, cfg.u_minus + 1.0);
    flux.transverse_lipschitz(cfg.u_plus - 1.0, cfg.u_minus + 1.0, static_cast<std::size_t>(cfg.n_dims - 1));
  } catch (const DomainError& e) {
    res.exit_code = kExitInadmissible;
    res.message = e.what();
    return res;
  }
  if (!adm.admissible() && !opts.allow_inadmissible) {
    res.exit_code = kExitInadmissible;
    res.message = "inadmissible: " + adm.failures();
    return res;
  }

  Grid grid;
  ShockProfile profile;
  Field u0;
  double alpha = 0.0;
  Constants constants;
  try {
    grid = cfg.grid();
    ProfileOptions po;
    po.tol = cfg.profile_tol;
    po.half_width = std::max(default_half_width(flux, shock, cfg.profile_tol), cfg.half_width + 10.0);
    profile = solve_profile(flux, shock, po);
    alpha = compute_alpha(flux, shock.eps);
    u0 = generate_initial(cfg.initial, grid, profile, cfg.t_final);
    constants = make_constants(profile, u0);
  } catch (const AdmissibilityError& e) {
    res.exit_code = kExitInadmissible;
    res.message = e.what();
    return res;
  } catch (const DomainError& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
    return res;
  }

  StepperOptions so;
  so.order = cfg.order;
  so.c_diffusion = cfg.c_diffusion;
  so.c_advection = cfg.c_advection;
  so.linf_growth_tol = cfg.linf_growth_tol;
  double dt = 0.0;
  std::int64_t nsteps = 0;
  {
    Stepper probe(grid, flux, profile, so);
    const auto [lo, hi] = std::minmax_element(u0.data().begin(), u0.data().end());
    const double limit = cfg.dt_auto ? probe.stable_dt(*lo, *hi) : cfg.dt;
    nsteps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(cfg.t_final / limit - 1e-9)));
    dt = cfg.t_final / static_cast<double>(nsteps);
  }
  const double tol_residual = cfg.tol_residual.value_or(default_tol_residual(grid, dt, constants.u0.energy()));
  const auto gn = estimate_gn_constant(gn_corpus(cfg.n_dims));

  res.run_dir = opts.out_root / cfg.name;
  json manifest;
  manifest["format"] = "shocklab-run/1";
  manifest["status"] = "running";
  manifest["config"] = config_to_json(cfg);
  manifest["grid"] = grid_metadata(grid);
  manifest["shock"] = {{"u_minus", shock.u_minus}, {"u_plus", shock.u_plus}, {"eps", shock.eps}, {"sigma", shock.sigma}};
  manifest["admissibility"] = admissibility_json(adm, !adm.admissible());
  manifest["profile"] = {{"closed_form", profile.closed_form()},
                         {"half_width", profile.half_width()},
                         {"spacing", profile.spacing()},
                         {"tol", profile.tol()}};
  manifest["alpha"] = alpha;
  manifest["constants"] = to_json(constants);
  manifest["tol_residual"] = tol_residual;
  manifest["tol_residual_source"] = cfg.tol_residual ? "config" : "default";
  manifest["t_min"] = cfg.t_min;
  manifest["l1_rel_tol"] = cfg.l1_rel_tol;
  manifest["tail_tol"] = cfg.tail_tol;
  manifest["enabled_checks"] = cfg.checks.empty() ? runtime_check_names() : cfg.checks;
  manifest["gn"] = {{"constant", gn.constant}, {"argmax", gn.argmax}, {"corpus_size", gn.ratios.size()}};
  manifest["time"] = {{"dt", dt}, {"planned_steps", nsteps}, {"t_final", cfg.t_final}, {"diag_every", cfg.diag_every}};
  manifest["threads"] = thread_count();
  manifest["snapshots"] = json::array();

  try {
    fs::create_directories(res.run_dir / "snapshots");
    write_json(res.run_dir / "manifest.json", manifest);
    if (cfg.write_profile) write_profile_csv(profile, res.run_dir / "profile");

    log << cfg.name << ": grid " << grid.n_xi() << " x " << grid.n_t() << "^" << grid.torus_dirs() << ", dt "
        << fmt(dt) << ", " << nsteps << " steps, alpha " << fmt(alpha) << ", tol_residual " << fmt(tol_residual)
        << '\n';

    DiagnosticsCsvWriter csv(res.run_dir / "diagnostics.csv", tol_residual);
    RunSetup rs;
    rs.profile = &profile;
    rs.u0 = u0;
    rs.t_final = cfg.t_final;
    rs.dt = dt;
    rs.diag_every = cfg.diag_every;
    rs.snapshot_times = cfg.snapshot_times;
    rs.alpha = alpha;
    rs.stepper = so;

    double next_report = 0.1 * cfg.t_final;
    RunObserver obs;
    obs.on_record = [&](const DiagRecord& r, const SimState&) {
      csv.append(r);
      if (r.t >= next_report - 1e-12) {
        csv.flush();
        log << "  t " << std::setw(8) << fmt(r.t) << "  l2 " << fmt(r.l2_dist) << "  X " << fmt(r.X) << '\n';
        while (next_report <= r.t + 1e-12) next_report += 0.1 * cfg.t_final;
      }
    };
    obs.on_snapshot = [&](const SimState& s) {
      const std::size_t k = manifest["snapshots"].size();
      char stem[32];
      std::snprintf(stem, sizeof stem, "snap_%03zu", k);
      const json meta = {{"t", s.t}, {"X", s.X}, {"Xdot", s.Xdot}, {"step", s.step_index}};
      write_snapshot(s.u, res.run_dir / "snapshots" / stem, meta);
      json entry = meta;
      entry["file"] = std::string("snapshots/") + stem;
      manifest["snapshots"].push_back(entry);
    };

    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = run(rs, obs);
    csv.flush();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    manifest["status"] = traj.aborted ? "aborted" : "completed";
    if (traj.aborted) manifest["abort_message"] = traj.abort_message;
    manifest["time"]["steps"] = traj.steps;
    manifest["wall_seconds"] = secs;
    write_json(res.run_dir / "manifest.json", manifest);

    res.summary = summarize_run_dir(res.run_dir);
    write_json(res.run_dir / "summary.json", res.summary);
    write_plot_data(res.run_dir / "plot", traj.records);
    print_summary(res.summary, log);

    if (traj.aborted) {
      res.exit_code = kExitNumerical;
      res.message = "numerical abort: " + traj.abort_message;
      return res;
    }
    const auto failed = failed_checks(res.summary);
    if (!failed.empty()) {
      res.exit_code = kExitCheckFailed;
      res.message = "failed checks:";
      for (const auto& f : failed) res.message += " " + f;
    }
  } catch (const IoError& e) {
    res.exit_code = kExitIo;
    res.message = e.what();
  } catch (const fs::filesystem_error& e) {
    res.exit_code = kExitIo;
    res.message = e.what();
  }
  return res;
}

int cmd_run(const fs::path& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const RunOutcome r = execute_run(cfg, opts, out);
  if (!r.message.empty()) err << r.message << '\n';
  if (!r.run_dir.empty()) out << "run directory: " << r.run_dir.string() << '\n';
  return r.exit_code;
}

int cmd_verify_lemmas(const fs::path& report_path, const LemmaSuiteOptions& opts, std::ostream& out,
                      std::ostream& err) {
  LemmaSuiteReport rep;
  try {
    rep = run_lemma_suite(opts);
  } catch (const ConfigError& e) {
    err << "nothing to verify: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
    write_json(report_path, rep.to_json());
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  std::size_t asserted = 0;
  for (const auto& e : rep.entries) asserted += e.asserted ? 1 : 0;
  out << rep.entries.size() << " entries (" << asserted << " asserted), empirical GN constant " << fmt(rep.gn.constant)
      << " at " << rep.gn.argmax << "\nreport: " << report_path.string() << '\n';
  if (!rep.pass()) {
    for (const auto& f : rep.failures()) err << "FAILED " << f << '\n';
    return kExitCheckFailed;
  }
  out << "all lemma checks pass\n";
  return kExitOk;
}

int cmd_report(const fs::path& run_dir, std::optional<double> t_min, std::ostream& out, std::ostream& err) {
  try {
    const json summary = summarize_run_dir(run_dir, t_min);
    write_json(run_dir / "summary.json", summary);
    write_plot_data(run_dir / "plot", read_diagnostics_csv(run_dir / "diagnostics.csv"));
    print_summary(summary, out);
  } catch (const IoError& e) {
    err << "report failed: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "report failed: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace shocklab
