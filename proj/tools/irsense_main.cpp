// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: echo synthesis, single-shot estimation,
// Monte-Carlo RMSE sweeps, analytic complexity tables and a quick
// invariant self-test. All stochastic commands are seeded explicitly.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "irsense/irsense.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace irsense;

namespace {

constexpr double kDegToRad = kPi / 180.0;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value pairs
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output_dir;
  bool output_dir_given = false;
};

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig run;
  if (!opts.config_path.empty()) run = load_run_config(opts.config_path);
  for (const std::string& pair : opts.overrides) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos)
      throw config_error("--set", "expected key=value, got '" + pair + "'");
    apply_config_key(run, pair.substr(0, eq), pair.substr(eq + 1));
  }
  if (opts.seed_given) {
    run.seed = opts.seed;
    run.montecarlo.base_seed = opts.seed;
    run.base_seed_set = true;
  }
  if (opts.output_dir_given) run.output_dir = opts.output_dir;
  if (const char* env = std::getenv("IRSENSE_OUTPUT_DIR")) run.output_dir = env;
  run.montecarlo.system.derive();
  return run;
}

std::uint64_t require_seed(const RunConfig& run, const char* command) {
  if (run.seed) return *run.seed;
  if (run.base_seed_set) return run.montecarlo.base_seed;
  throw config_error("seed", std::string("required for stochastic command '") +
                                 command + "' (pass --seed or set it in the config)");
}

json system_to_json(const SystemConfig& sys) {
  json j;
  j["n_x"] = sys.n_x;
  j["n_y"] = sys.n_y;
  j["d_x"] = sys.d_x;
  j["d_y"] = sys.d_y;
  j["carrier_freq"] = sys.carrier_freq;
  j["wavelength"] = sys.wavelength;
  j["delta_f"] = sys.delta_f;
  j["t_sym"] = sys.t_sym;
  j["n_c"] = sys.n_c;
  j["q"] = sys.q;
  j["l"] = sys.l;
  j["p_t"] = sys.p_t;
  j["g1"] = sys.g1;
  j["g2"] = sys.g2;
  j["d1"] = sys.d1;
  j["d2"] = sys.d2;
  j["sigma_rcs"] = sys.sigma_rcs;
  j["radiation_exponent"] = sys.radiation_exponent;
  return j;
}

SystemConfig system_from_json(const json& j) {
  SystemConfig sys;
  sys.n_x = j.at("n_x");
  sys.n_y = j.at("n_y");
  sys.d_x = j.at("d_x");
  sys.d_y = j.at("d_y");
  sys.carrier_freq = j.at("carrier_freq");
  sys.wavelength = j.at("wavelength");
  sys.delta_f = j.at("delta_f");
  sys.t_sym = j.at("t_sym");
  sys.n_c = j.at("n_c");
  sys.q = j.at("q");
  sys.l = j.at("l");
  sys.p_t = j.at("p_t");
  sys.g1 = j.at("g1");
  sys.g2 = j.at("g2");
  sys.d1 = j.at("d1");
  sys.d2 = j.at("d2");
  sys.sigma_rcs = j.at("sigma_rcs");
  sys.radiation_exponent = j.at("radiation_exponent");
  return sys;
}

json truth_to_json(const TargetTruth& truth) {
  json j;
  j["tau"] = truth.tau;
  j["nu"] = truth.nu;
  j["theta_az"] = truth.theta_az;
  j["theta_el"] = truth.theta_el;
  j["phi_az"] = truth.phi_az;
  j["phi_el"] = truth.phi_el;
  j["alpha_re"] = truth.alpha.real();
  j["alpha_im"] = truth.alpha.imag();
  return j;
}

TargetTruth truth_from_json(const json& j) {
  TargetTruth truth;
  truth.tau = j.at("tau");
  truth.nu = j.at("nu");
  truth.theta_az = j.at("theta_az");
  truth.theta_el = j.at("theta_el");
  truth.phi_az = j.at("phi_az");
  truth.phi_el = j.at("phi_el");
  truth.alpha = cplx(j.at("alpha_re"), j.at("alpha_im"));
  return truth;
}

json grids_to_json(const GridParams& g) {
  json j;
  j["r_tau"] = g.r_tau;
  j["r_nu"] = g.r_nu;
  j["r_az"] = g.r_az;
  j["r_el"] = g.r_el;
  j["tau_max"] = g.tau_max;
  j["nu_max"] = g.nu_max;
  return j;
}

GridParams grids_from_json(const json& j) {
  GridParams g;
  g.r_tau = j.at("r_tau");
  g.r_nu = j.at("r_nu");
  g.r_az = j.at("r_az");
  g.r_el = j.at("r_el");
  g.tau_max = j.at("tau_max");
  g.nu_max = j.at("nu_max");
  return g;
}

json estimate_to_json(const Estimate& est) {
  json j;
  j["tau_hat"] = est.tau_hat;
  j["nu_hat"] = est.nu_hat;
  j["theta_az_hat"] = est.theta_az_hat;
  j["theta_el_hat"] = est.theta_el_hat;
  j["tau_peak"] = est.tau_peak;
  j["nu_peak"] = est.nu_peak;
  j["angle_peak"] = est.angle_peak;
  j["tau_index"] = est.tau_index;
  j["nu_index"] = est.nu_index;
  j["az_index"] = est.az_index;
  j["el_index"] = est.el_index;
  j["skipped_angle_candidates"] = est.skipped_angle_candidates;
  j["angle_search_flat"] = est.angle_search_flat;
  return j;
}

/// Truth values supplied on the command line; angles arrive in degrees and
/// are stored in radians.
struct TruthOverrides {
  double tau = 0, nu = 0;
  double theta_az_deg = 0, theta_el_deg = 0, phi_az_deg = 0, phi_el_deg = 0;
  bool has_tau = false, has_nu = false;
  bool has_theta_az = false, has_theta_el = false, has_phi_az = false,
       has_phi_el = false;

  void apply(TargetTruth& truth, const SystemConfig& cfg) const {
    if (has_tau) truth.tau = tau;
    if (has_nu) truth.nu = nu;
    if (has_theta_az) truth.theta_az = theta_az_deg * kDegToRad;
    if (has_theta_el) truth.theta_el = theta_el_deg * kDegToRad;
    if (has_phi_az) truth.phi_az = phi_az_deg * kDegToRad;
    if (has_phi_el) truth.phi_el = phi_el_deg * kDegToRad;
    // Keep the drawn phase but refresh the link-budget magnitude, which
    // depends on the elevations.
    truth.alpha = std::polar(gain_alpha_magnitude(cfg, truth.phi_el, truth.theta_el),
                             std::arg(truth.alpha));
  }
};

struct Synthesized {
  TargetTruth truth;
  Tensor3 tensor;
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

Synthesized synthesize_from_run(const RunConfig& run, const std::string& snr_text,
                                bool on_grid, const TruthOverrides& overrides,
                                const char* command) {
  Synthesized out;
  out.seed = require_seed(run, command);
  out.snr_db = irsense::detail::parse_double("snr", snr_text);
  SystemConfig cfg = run.montecarlo.system;
  cfg.validate();
  const GridSpec grids = make_grids(cfg, run.montecarlo.grids);
  const IrsProfile profile = irs_dft_profile(cfg.n(), cfg.l, cfg.q);
  std::mt19937_64 engine(out.seed);
  long rejected = 0;
  const double nu_truth_max = run.montecarlo.grids.nu_max > 0.0
                                  ? run.montecarlo.grids.nu_max
                                  : 1.0 / (2.0 * cfg.q * cfg.t_sym);
  out.truth = draw_truth(engine, cfg, grids, nu_truth_max, on_grid, rejected);
  overrides.apply(out.truth, cfg);
  const Tensor3 clean = synthesize_echo(cfg, out.truth, profile);
  out.tensor = add_awgn(clean, out.snr_db, engine()).tensor;
  return out;
}

int cmd_synth(const RunConfig& run, const std::string& out_path,
              const std::string& snr_text, bool on_grid,
              const TruthOverrides& overrides) {
  const Synthesized s = synthesize_from_run(run, snr_text, on_grid, overrides, "synth");
  fs::path path = out_path.empty() ? fs::path(run.output_dir) / "echo.irt"
                                   : fs::path(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_tensor(s.tensor, path);

  json sidecar;
  sidecar["seed"] = s.seed;
  sidecar["snr_db"] = std::isinf(s.snr_db) ? json("inf") : json(s.snr_db);
  sidecar["config_hash"] = config_hash(run.montecarlo);
  sidecar["truth"] = truth_to_json(s.truth);
  sidecar["system"] = system_to_json(run.montecarlo.system);
  sidecar["grids"] = grids_to_json(run.montecarlo.grids);
  const fs::path sidecar_path = path.string() + ".json";
  std::ofstream os(sidecar_path);
  os << sidecar.dump(2) << '\n';
  std::cout << "wrote " << path.string() << " and " << sidecar_path.string() << "\n";
  return 0;
}

int cmd_estimate(const RunConfig& run, const std::string& in_path,
                 const std::string& snr_text, bool on_grid,
                 const std::string& estimator, const TruthOverrides& overrides) {
  SystemConfig cfg = run.montecarlo.system;
  GridParams grid_params = run.montecarlo.grids;
  Tensor3 y;
  TargetTruth truth;
  json output;

  if (!in_path.empty()) {
    y = read_tensor(fs::path(in_path));
    const fs::path sidecar_path = in_path + ".json";
    std::ifstream is(sidecar_path);
    if (!is)
      throw std::runtime_error("estimate: missing sidecar " + sidecar_path.string() +
                               " (needed for the system config and known angles)");
    const json sidecar = json::parse(is);
    cfg = system_from_json(sidecar.at("system"));
    grid_params = grids_from_json(sidecar.at("grids"));
    truth = truth_from_json(sidecar.at("truth"));
    output["seed"] = sidecar.at("seed");
    output["snr_db"] = sidecar.at("snr_db");
  } else {
    const Synthesized s =
        synthesize_from_run(run, snr_text, on_grid, overrides, "estimate");
    y = s.tensor;
    truth = s.truth;
    output["seed"] = s.seed;
    output["snr_db"] = std::isinf(s.snr_db) ? json("inf") : json(s.snr_db);
  }

  cfg.validate();
  if (y.n1() != cfg.n_c || y.n2() != cfg.q || y.n3() != cfg.l)
    throw std::runtime_error("estimate: tensor dims do not match the system config");
  const GridSpec grids = make_grids(cfg, grid_params);
  const IrsProfile profile = irs_dft_profile(cfg.n(), cfg.l, cfg.q);
  const AngleCandidateTable table = make_angle_table(grids, cfg);
  const AnglePair phi = truth.phi();

  output["config_hash"] = config_hash(run.montecarlo);
  output["truth"] = truth_to_json(truth);
  output["estimates"] = json::object();
  if (estimator == "hosvd" || estimator == "both")
    output["estimates"]["hosvd"] =
        estimate_to_json(hosvd_estimate(y, cfg, profile, phi, grids, table));
  if (estimator == "baseline" || estimator == "both")
    output["estimates"]["baseline"] =
        estimate_to_json(baseline_estimate(y, cfg, profile, phi, grids, table));
  std::cout << output.dump(2) << "\n";
  return 0;
}

int cmd_sweep(RunConfig run) {
  if (run.seed) run.montecarlo.base_seed = *run.seed;
  else if (!run.base_seed_set)
    throw config_error("seed",
                       "required for stochastic command 'sweep' (pass --seed or "
                       "set base_seed in the config)");
  run.validate();
  const RmseReport report = run_sweep(run.montecarlo, run.output_dir);
  std::cout << "config_hash " << report.config_hash << "\n";
  std::cout << "cells " << report.cells.size() << " (+"
            << report.angle_combined.size() << " combined angle rows)\n";
  std::cout << "wrote " << (fs::path(run.output_dir) / "rmse.csv").string()
            << " and " << (fs::path(run.output_dir) / "rmse.json").string() << "\n";
  return 0;
}

int cmd_complexity(int nc, int q, int l, int rtau, int rnu, int rtheta,
                   const std::string& sweep_var, int from, int to, int step,
                   const std::string& out_path) {
  if (sweep_var.empty()) {
    const FlopReport rep = complexity_model(nc, q, l, rtau, rnu, rtheta);
    std::cout << "n_c=" << nc << " q=" << q << " l=" << l << " r_tau=" << rtau
              << " r_nu=" << rnu << " r_theta=" << rtheta << "\n";
    std::cout << "baseline " << rep.baseline_total << "\n";
    for (const auto& term : rep.baseline_terms)
      std::cout << "  " << term.name << " " << term.flops << "\n";
    std::cout << "proposed " << rep.proposed_total << "\n";
    for (const auto& term : rep.proposed_terms)
      std::cout << "  " << term.name << " " << term.flops << "\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", rep.ratio());
    std::cout << "ratio " << buf << "\n";
    return 0;
  }

  SweepVariable variable;
  if (sweep_var == "nc") variable = SweepVariable::subcarriers;
  else if (sweep_var == "grid") variable = SweepVariable::grid_points;
  else throw config_error("--sweep", "expected 'nc' or 'grid'");
  if (step < 1) throw config_error("--step", "must be >= 1");
  if (to < from) throw config_error("--to", "must be >= --from");
  std::vector<int> values;
  for (int v = from; v <= to; v += step) values.push_back(v);
  const auto reports = complexity_sweep(variable, values, nc, q, l, rtau, rnu, rtheta);
  if (out_path.empty() || out_path == "-") {
    write_flops_csv(variable, reports, std::cout);
  } else {
    fs::path path(out_path);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    write_flops_csv(variable, reports, os);
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

bool check(const char* name, bool ok, int& failures) {
  std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
  if (!ok) ++failures;
  return ok;
}

int cmd_selftest() {
  int failures = 0;
  std::mt19937_64 engine(12345);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_vec = [&](int n) {
    cvec v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(unit(engine), unit(engine));
    return v;
  };

  {
    bool ok = true;
    for (int rep = 0; rep < 25 && ok; ++rep) {
      Tensor3 t(3, 4, 5);
      for (Eigen::Index i = 0; i < t.size(); ++i)
        t.data()[i] = cplx(unit(engine), unit(engine));
      for (int mode = 1; mode <= 3; ++mode) {
        const cmat u = unfold(t, mode);
        const Tensor3 back = fold(u, mode, 3, 4, 5);
        ok = ok && (back.data() - t.data()).norm() == 0.0;
        ok = ok && std::abs(u.norm() - t.frobenius_norm()) <=
                       1e-12 * t.frobenius_norm();
      }
    }
    check("unfold/fold bijectivity and norm preservation", ok, failures);
  }
  {
    bool ok = true;
    for (int rep = 0; rep < 25 && ok; ++rep) {
      const cvec a = random_vec(4), b = random_vec(4);
      const cvec c = random_vec(5), d = random_vec(5);
      const cvec left = hadamard_vec(kron_vec(a, c), kron_vec(b, d));
      const cvec right = kron_vec(hadamard_vec(a, b), hadamard_vec(c, d));
      ok = (left - right).cwiseAbs().maxCoeff() <= 1e-12;
    }
    check("mixed Kronecker/Hadamard product identity", ok, failures);
  }
  {
    SystemConfig cfg = default_system_config();
    bool ok = true;
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    for (int rep = 0; rep < 25 && ok; ++rep) {
      const double nu = pos(engine) / (2.0 * cfg.q * cfg.t_sym);
      const cvec d_q = doppler_steering(nu, cfg.q, cfg.t_sym);
      const cvec d_l = doppler_steering(nu, cfg.l, cfg.q * cfg.t_sym);
      const cvec d = doppler_steering(nu, cfg.m(), cfg.t_sym);
      ok = (kron_vec(d_l, d_q) - d).cwiseAbs().maxCoeff() <= 1e-12;
    }
    check("Doppler factorization d = d_L kron d_Q", ok, failures);
  }
  {
    SystemConfig cfg = default_system_config();
    const IrsProfile profile = irs_dft_profile(cfg.n(), cfg.l, cfg.q);
    std::uniform_real_distribution<double> quad(0.0, kPi / 2.0);
    bool ok = true;
    for (int rep = 0; rep < 10 && ok; ++rep) {
      const AnglePair theta{quad(engine), quad(engine)};
      const AnglePair phi{quad(engine), quad(engine)};
      const cvec g_l = g_l_signature(theta, phi, profile, cfg);
      const cvec a = ura_steering(phi.az, phi.el, cfg.n_x, cfg.n_y, cfg.d_x,
                                  cfg.d_y, cfg.wavelength);
      const cvec p = ura_steering(theta.az, theta.el, cfg.n_x, cfg.n_y, cfg.d_x,
                                  cfg.d_y, cfg.wavelength);
      const cvec b = hadamard_vec(a, p);
      const cmat w = profile.expanded();
      const Eigen::RowVectorXcd bw = b.transpose() * w;
      const cvec per_symbol = hadamard_vec(bw.transpose(), bw.transpose());
      const cvec expanded = kron_vec(g_l, cvec::Ones(cfg.q));
      ok = (per_symbol - expanded).cwiseAbs().maxCoeff() <=
           1e-12 * expanded.cwiseAbs().maxCoeff();
    }
    check("repetition identity (per-symbol vs per-block signature)", ok, failures);
  }
  {
    const cvec a = random_vec(6), b = random_vec(4), c = random_vec(5);
    const Tensor3 t = outer3(a, b, c);
    const Rank1Factors f = hosvd_rank1(t);
    auto corr = [](const cvec& u, const cvec& x) {
      return std::abs(cplx(u.dot(x))) / x.norm();
    };
    const bool ok = corr(f.u1, a) >= 1.0 - 1e-9 && corr(f.u2, b) >= 1.0 - 1e-9 &&
                    corr(f.u3, c) >= 1.0 - 1e-9;
    check("rank-one HOSVD factor recovery", ok, failures);
  }
  {
    cmat m(16, 64);
    for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) = random_vec(16);
    const SingularPair s = dominant_left_singular(m);
    Eigen::SelfAdjointEigenSolver<cmat> es(cmat(m * m.adjoint()));
    const double sigma_ref = std::sqrt(es.eigenvalues().maxCoeff());
    const bool ok = std::abs(s.sigma - sigma_ref) <= 1e-10 * sigma_ref;
    check("dominant singular value vs full eigensolve", ok, failures);
  }
  {
    SystemConfig cfg = default_system_config();
    const IrsProfile profile = irs_dft_profile(cfg.n(), cfg.l, cfg.q);
    const GridSpec grids = make_grids(cfg);
    std::mt19937_64 draw_engine(7);
    long rejected = 0;
    const TargetTruth truth = draw_truth(
        draw_engine, cfg, grids, 1.0 / (2.0 * cfg.q * cfg.t_sym), true, rejected);
    const Tensor3 y = synthesize_echo(cfg, truth, profile);
    const Estimate h = hosvd_estimate(y, cfg, profile, truth.phi(), grids);
    const Estimate base = baseline_estimate(y, cfg, profile, truth.phi(), grids);
    const bool ok = h.tau_hat == truth.tau && h.nu_hat == truth.nu &&
                    h.theta_az_hat == truth.theta_az &&
                    h.theta_el_hat == truth.theta_el &&
                    base.tau_hat == truth.tau && base.nu_hat == truth.nu &&
                    base.theta_az_hat == truth.theta_az &&
                    base.theta_el_hat == truth.theta_el;
    check("noiseless on-grid exact recovery (both estimators)", ok, failures);
  }
  {
    const FlopReport q4 = complexity_model(16, 4, 16, 100, 100, 10000);
    const FlopReport q8 = complexity_model(16, 8, 8, 100, 100, 10000);
    const bool ok = q4.baseline_total == 24310000ull &&
                    q4.proposed_total == 1448872ull &&
                    q8.baseline_total == 24390000ull &&
                    q8.proposed_total == 2728872ull;
    check("complexity model reference points", ok, failures);
  }
  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS-assisted OFDM monostatic sensing: synthesis, estimation, "
               "Monte-Carlo sweeps and complexity tables"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--config", common.config_path, "flat key = value config file");
  app.add_option("--set", common.overrides,
                 "override a config key, e.g. --set trials=50 (repeatable)");
  auto* seed_opt = app.add_option("--seed", common.seed, "seed for stochastic commands");
  auto* outdir_opt = app.add_option("--output-dir", common.output_dir,
                                    "output directory (IRSENSE_OUTPUT_DIR overrides)");

  auto* synth =
      app.add_subcommand("synth", "synthesize one echo tensor and write it to disk");
  std::string synth_out, synth_snr = "inf";
  bool synth_on_grid = false;
  TruthOverrides synth_truth;
  synth->add_option("--out", synth_out,
                    "tensor output path (default <output_dir>/echo.irt)");
  synth->add_option("--snr", synth_snr, "SNR in dB, or 'inf' for noiseless");
  synth->add_flag("--on-grid", synth_on_grid, "draw the target on the search grids");
  auto* sy_tau = synth->add_option("--tau", synth_truth.tau, "target delay [s]");
  auto* sy_nu = synth->add_option("--nu", synth_truth.nu, "target Doppler [Hz]");
  auto* sy_taz = synth->add_option("--theta-az-deg", synth_truth.theta_az_deg,
                                   "departure azimuth [deg]");
  auto* sy_tel = synth->add_option("--theta-el-deg", synth_truth.theta_el_deg,
                                   "departure elevation [deg]");
  auto* sy_paz = synth->add_option("--phi-az-deg", synth_truth.phi_az_deg,
                                   "arrival azimuth [deg]");
  auto* sy_pel = synth->add_option("--phi-el-deg", synth_truth.phi_el_deg,
                                   "arrival elevation [deg]");

  auto* estimate = app.add_subcommand(
      "estimate", "estimate parameters from a tensor file or a fresh synthesis");
  std::string est_in, est_snr = "inf", est_which = "both";
  bool est_on_grid = false;
  TruthOverrides est_truth;
  estimate->add_option("--in", est_in,
                       "tensor file written by synth (with .json sidecar)");
  estimate->add_option("--snr", est_snr, "SNR in dB for fresh synthesis, or 'inf'");
  estimate->add_flag("--on-grid", est_on_grid, "draw the target on the search grids");
  estimate->add_option("--estimator", est_which, "hosvd, baseline or both")
      ->check(CLI::IsMember({"hosvd", "baseline", "both"}));
  auto* es_tau = estimate->add_option("--tau", est_truth.tau, "target delay [s]");
  auto* es_nu = estimate->add_option("--nu", est_truth.nu, "target Doppler [Hz]");
  auto* es_taz = estimate->add_option("--theta-az-deg", est_truth.theta_az_deg,
                                      "departure azimuth [deg]");
  auto* es_tel = estimate->add_option("--theta-el-deg", est_truth.theta_el_deg,
                                      "departure elevation [deg]");
  auto* es_paz = estimate->add_option("--phi-az-deg", est_truth.phi_az_deg,
                                      "arrival azimuth [deg]");
  auto* es_pel = estimate->add_option("--phi-el-deg", est_truth.phi_el_deg,
                                      "arrival elevation [deg]");

  auto* sweep = app.add_subcommand(
      "sweep", "Monte-Carlo RMSE sweep, writes rmse.csv and rmse.json");
  int sweep_trials = 0;
  std::vector<double> sweep_snr;
  std::vector<int> sweep_q;
  std::string sweep_estimators;
  auto* sw_trials = sweep->add_option("--trials", sweep_trials,
                                      "trials per (snr, q) cell");
  sweep->add_option("--snr", sweep_snr, "SNR grid in dB (repeatable)");
  sweep->add_option("--q", sweep_q, "block sizes (repeatable; each must divide M)");
  sweep->add_option("--estimators", sweep_estimators, "hosvd, baseline or both");

  auto* complexity =
      app.add_subcommand("complexity", "analytic flop counts for both pipelines");
  int cx_nc = 16, cx_q = 8, cx_l = 8, cx_rtau = 100, cx_rnu = 100, cx_rtheta = 10000;
  std::string cx_sweep, cx_out;
  int cx_from = 16, cx_to = 256, cx_step = 16;
  complexity->add_option("--nc", cx_nc, "number of subcarriers");
  complexity->add_option("--q", cx_q, "block size");
  complexity->add_option("--l", cx_l, "number of blocks");
  complexity->add_option("--rtau", cx_rtau, "delay grid size");
  complexity->add_option("--rnu", cx_rnu, "Doppler grid size");
  complexity->add_option("--rtheta", cx_rtheta, "angle grid size");
  complexity->add_option("--sweep", cx_sweep, "sweep variable: nc or grid");
  complexity->add_option("--from", cx_from, "sweep start");
  complexity->add_option("--to", cx_to, "sweep end (inclusive)");
  complexity->add_option("--step", cx_step, "sweep step");
  complexity->add_option("--out", cx_out, "CSV path ('-' for stdout)");

  auto* selftest = app.add_subcommand("selftest", "run the built-in invariant suite");

  // Global options (--seed, --config, ...) may follow the subcommand name.
  for (CLI::App* sub : {synth, estimate, sweep, complexity, selftest})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  common.seed_given = seed_opt->count() > 0;
  common.output_dir_given = outdir_opt->count() > 0;
  synth_truth.has_tau = sy_tau->count() > 0;
  synth_truth.has_nu = sy_nu->count() > 0;
  synth_truth.has_theta_az = sy_taz->count() > 0;
  synth_truth.has_theta_el = sy_tel->count() > 0;
  synth_truth.has_phi_az = sy_paz->count() > 0;
  synth_truth.has_phi_el = sy_pel->count() > 0;
  est_truth.has_tau = es_tau->count() > 0;
  est_truth.has_nu = es_nu->count() > 0;
  est_truth.has_theta_az = es_taz->count() > 0;
  est_truth.has_theta_el = es_tel->count() > 0;
  est_truth.has_phi_az = es_paz->count() > 0;
  est_truth.has_phi_el = es_pel->count() > 0;

  try {
    RunConfig run = resolve_config(common);
    if (app.got_subcommand("selftest")) return cmd_selftest();
    if (app.got_subcommand(synth))
      return cmd_synth(run, synth_out, synth_snr, synth_on_grid, synth_truth);
    if (app.got_subcommand(estimate))
      return cmd_estimate(run, est_in, est_snr, est_on_grid, est_which, est_truth);
    if (app.got_subcommand(sweep)) {
      if (sw_trials->count() > 0) run.montecarlo.trials = sweep_trials;
      if (!sweep_snr.empty()) run.montecarlo.snr_grid_db = sweep_snr;
      if (!sweep_q.empty()) run.montecarlo.q_values = sweep_q;
      if (!sweep_estimators.empty())
        apply_config_key(run, "estimators", sweep_estimators);
      return cmd_sweep(run);
    }
    if (app.got_subcommand(complexity))
      return cmd_complexity(cx_nc, cx_q, cx_l, cx_rtau, cx_rnu, cx_rtheta, cx_sweep,
                            cx_from, cx_to, cx_step, cx_out);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
