// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "irsense/estimators.hpp"
#include "irsense/signal.hpp"
#include "irsense/system.hpp"

namespace irsense {

/// Sweep definition: trial count, SNR grid, block sizes and the shared
/// system/grid setup. The total symbol count M = system.q * system.l is held
/// fixed across q_values, so every listed q must divide M.
struct MonteCarloConfig {
  int trials = 200;
  std::vector<double> snr_grid_db{0.0, 10.0, 20.0};
  std::vector<int> q_values{4, 8};
  std::uint64_t base_seed = 1;
  SystemConfig system = default_system_config();
  GridParams grids;
  bool run_hosvd = true;
  bool run_baseline = true;
  bool on_grid_truth = false;  ///< draw truths on the grids (exactness checks)

  void validate() const {
    if (trials < 1) throw config_error("trials", "must be >= 1");
    if (snr_grid_db.empty()) throw config_error("snr_grid_db", "must be nonempty");
    if (q_values.empty()) throw config_error("q_values", "must be nonempty");
    if (!run_hosvd && !run_baseline)
      throw config_error("estimators", "at least one estimator must be enabled");
    system.validate();
    grids.validate();
    const int m = system.m();
    for (int qv : q_values) {
      if (qv < 1) throw config_error("q_values", "entries must be >= 1");
      if (m % qv != 0)
        throw config_error("q_values",
                           "every block size must divide the symbol count M");
      if (m / qv > system.n())
        throw config_error("q_values",
                           "block count M/q exceeds the IRS size (profile "
                           "truncation impossible)");
    }
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic per-trial seed. Intentionally independent of the block
/// size: runs at different q share truths and noise draws, so block-size
/// comparisons are paired.
inline std::uint64_t trial_seed(std::uint64_t base_seed, double snr_db,
                                int trial_index) {
  std::uint64_t h = detail::splitmix64(base_seed);
  h = detail::splitmix64(h ^ std::bit_cast<std::uint64_t>(snr_db));
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(trial_index));
  return h;
}

/// sqrt(mean(|x - x̂|² / |x|²)) over trials.
inline double normalized_rmse(const std::vector<double>& estimates,
                              const std::vector<double>& truths) {
  if (estimates.size() != truths.size() || estimates.empty())
    throw std::invalid_argument("normalized_rmse: need equal nonempty lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == 0.0)
      throw std::invalid_argument("normalized_rmse: zero truth value");
    const double e = (estimates[i] - truths[i]) / truths[i];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(truths.size()));
}

/// Vector form for the angle pair: sqrt(mean(‖θ - θ̂‖² / ‖θ‖²)).
inline double normalized_rmse_pair(const std::vector<double>& az_est,
                                   const std::vector<double>& el_est,
                                   const std::vector<double>& az_truth,
                                   const std::vector<double>& el_truth) {
  if (az_est.size() != az_truth.size() || el_est.size() != el_truth.size() ||
      az_est.size() != el_est.size() || az_est.empty())
    throw std::invalid_argument("normalized_rmse_pair: need equal nonempty lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < az_est.size(); ++i) {
    const double norm_sq = az_truth[i] * az_truth[i] + el_truth[i] * el_truth[i];
    if (norm_sq == 0.0)
      throw std::invalid_argument("normalized_rmse_pair: zero truth vector");
    const double ea = az_est[i] - az_truth[i];
    const double ee = el_est[i] - el_truth[i];
    acc += (ea * ea + ee * ee) / norm_sq;
  }
  return std::sqrt(acc / static_cast<double>(az_est.size()));
}

namespace detail {

/// Per-block-size context shared by all trials of a sweep cell.
struct SweepContext {
  SystemConfig cfg;
  GridSpec grids;
  IrsProfile profile;
  AngleCandidateTable table;
  double nu_truth_max = 0.0;
};

inline SweepContext make_sweep_context(const MonteCarloConfig& mc, int q) {
  SweepContext ctx;
  ctx.cfg = mc.system;
  ctx.cfg.q = q;
  ctx.cfg.l = mc.system.m() / q;
  ctx.cfg.validate();
  ctx.grids = make_grids(ctx.cfg, mc.grids);
  ctx.profile = irs_dft_profile(ctx.cfg.n(), ctx.cfg.l, ctx.cfg.q);
  ctx.table = make_angle_table(ctx.grids, ctx.cfg);
  // Doppler truths are drawn from the range of the largest configured block
  // size so every q in the sweep sees the same target distribution.
  const int q_max = *std::max_element(mc.q_values.begin(), mc.q_values.end());
  ctx.nu_truth_max = mc.grids.nu_max > 0.0
                         ? mc.grids.nu_max
                         : 1.0 / (2.0 * q_max * ctx.cfg.t_sym);
  return ctx;
}

/// Lower bound on estimated-parameter truth draws as a fraction of their
/// span. The normalized error metric divides by the truth, so draws
/// arbitrarily close to zero would give the metric unbounded weights and
/// sample RMSE values dominated by single trials.
inline constexpr double kTruthLowerFraction = 0.1;

inline void parallel_for(int count, const std::function<void(int)>& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = static_cast<int>(
      std::min<unsigned>(hw ? hw : 1u, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// Draws one target realization. Continuous draws keep every estimated
/// parameter (delay, Doppler, both departure angles) at least 10% of its
/// span away from zero (see kTruthLowerFraction); the arrival angles are
/// uniform over the full quadrant with exact zeros rejected and redrawn.
/// On-grid draws pick grid indices directly; the elevation index skips the
/// first grid point, where the azimuth is not identifiable.
inline TargetTruth draw_truth(std::mt19937_64& engine, const SystemConfig& cfg,
                              const GridSpec& grids, double nu_truth_max,
                              bool on_grid, long& rejected_draws) {
  TargetTruth truth;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = detail::kTruthLowerFraction;
  auto draw_bounded = [&](double span) {
    return (lo + (1.0 - lo) * unit(engine)) * span;
  };
  if (on_grid) {
    std::uniform_int_distribution<int> tau_idx(
        0, static_cast<int>(grids.tau_grid.size()) - 1);
    std::uniform_int_distribution<int> nu_idx(
        0, static_cast<int>(grids.nu_grid.size()) - 1);
    std::uniform_int_distribution<int> az_idx(
        0, static_cast<int>(grids.az_grid.size()) - 1);
    std::uniform_int_distribution<int> el_idx(
        grids.el_grid.size() > 1 ? 1 : 0,
        static_cast<int>(grids.el_grid.size()) - 1);
    truth.tau = grids.tau_grid[tau_idx(engine)];
    truth.nu = grids.nu_grid[nu_idx(engine)];
    truth.theta_az = grids.az_grid[az_idx(engine)];
    truth.theta_el = grids.el_grid[el_idx(engine)];
  } else {
    truth.tau = draw_bounded(grids.tau_grid.back());
    truth.nu = draw_bounded(nu_truth_max);
    truth.theta_az = draw_bounded(kPi / 2.0);
    truth.theta_el = draw_bounded(kPi / 2.0);
  }
  auto draw_angle = [&] {
    double v = unit(engine) * kPi / 2.0;
    while (v == 0.0) {
      ++rejected_draws;
      v = unit(engine) * kPi / 2.0;
    }
    return v;
  };
  truth.phi_az = draw_angle();
  truth.phi_el = draw_angle();
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  truth.alpha = std::polar(gain_alpha_magnitude(cfg, truth.phi_el, truth.theta_el),
                           phase(engine));
  return truth;
}

struct TrialOutput {
  TargetTruth truth;
  std::optional<Estimate> hosvd;
  std::optional<Estimate> baseline;
  long rejected_draws = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline TrialOutput run_trial_impl(const MonteCarloConfig& mc,
                                  const SweepContext& ctx, double snr_db,
                                  int trial_index) {
  TrialOutput out;
  out.seed = trial_seed(mc.base_seed, snr_db, trial_index);
  std::mt19937_64 engine(out.seed);
  out.truth = draw_truth(engine, ctx.cfg, ctx.grids, ctx.nu_truth_max,
                         mc.on_grid_truth, out.rejected_draws);
  const Tensor3 clean = synthesize_echo(ctx.cfg, out.truth, ctx.profile);
  const std::uint64_t noise_seed = engine();
  const Tensor3 y = add_awgn(clean, snr_db, noise_seed).tensor;
  const AnglePair phi = out.truth.phi();
  if (mc.run_hosvd)
    out.hosvd = hosvd_estimate(y, ctx.cfg, ctx.profile, phi, ctx.grids, ctx.table);
  if (mc.run_baseline)
    out.baseline =
        baseline_estimate(y, ctx.cfg, ctx.profile, phi, ctx.grids, ctx.table);
  return out;
}

}  // namespace detail

/// One seeded realization: drawn truth, synthesized echo, calibrated noise
/// and every enabled estimator, all deterministic in (config, snr, q, index).
inline TrialOutput run_trial(const MonteCarloConfig& mc, double snr_db, int q,
                             int trial_index) {
  mc.validate();
  if (std::find(mc.q_values.begin(), mc.q_values.end(), q) == mc.q_values.end())
    throw std::invalid_argument("run_trial: q is not in q_values");
  return detail::run_trial_impl(mc, detail::make_sweep_context(mc, q), snr_db,
                                trial_index);
}

struct RmseCell {
  std::string estimator;
  std::string parameter;
  double snr_db = 0.0;
  int q = 0;
  int trials = 0;
  double rmse = 0.0;
};

struct RmseReport {
  /// One cell per (estimator, parameter, snr, q) with
  /// parameter in {tau, nu, theta_az, theta_el}.
  std::vector<RmseCell> cells;
  /// Combined angle curve per (estimator, snr, q): vector-normalized RMSE
  /// over the azimuth/elevation pair, reported as parameter "theta".
  std::vector<RmseCell> angle_combined;
  std::string config_hash;
  std::uint64_t base_seed = 0;
  long rejected_draws = 0;
};

/// Canonical flat key=value dump of a sweep configuration; the FNV-1a hash
/// of this string identifies a run in every persisted artifact.
inline std::string canonical_description(const MonteCarloConfig& mc) {
  std::string s;
  char buf[64];
  auto add = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, v);
    s += buf;
  };
  auto add_int = [&](const char* key, long long v) {
    std::snprintf(buf, sizeof(buf), "%s=%lld\n", key, v);
    s += buf;
  };
  add_int("trials", mc.trials);
  s += "snr_grid_db=";
  for (std::size_t i = 0; i < mc.snr_grid_db.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i ? ",%.17g" : "%.17g", mc.snr_grid_db[i]);
    s += buf;
  }
  s += "\nq_values=";
  for (std::size_t i = 0; i < mc.q_values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i ? ",%d" : "%d", mc.q_values[i]);
    s += buf;
  }
  s += '\n';
  add_int("base_seed", static_cast<long long>(mc.base_seed));
  add_int("run_hosvd", mc.run_hosvd);
  add_int("run_baseline", mc.run_baseline);
  add_int("on_grid_truth", mc.on_grid_truth);
  add_int("n_x", mc.system.n_x);
  add_int("n_y", mc.system.n_y);
  add("d_x", mc.system.d_x);
  add("d_y", mc.system.d_y);
  add("carrier_freq", mc.system.carrier_freq);
  add("wavelength", mc.system.wavelength);
  add("delta_f", mc.system.delta_f);
  add("t_sym", mc.system.t_sym);
  add_int("n_c", mc.system.n_c);
  add_int("q", mc.system.q);
  add_int("l", mc.system.l);
  add("p_t", mc.system.p_t);
  add("g1", mc.system.g1);
  add("g2", mc.system.g2);
  add("d1", mc.system.d1);
  add("d2", mc.system.d2);
  add("sigma_rcs", mc.system.sigma_rcs);
  add("radiation_exponent", mc.system.radiation_exponent);
  add_int("r_tau", mc.grids.r_tau);
  add_int("r_nu", mc.grids.r_nu);
  add_int("r_az", mc.grids.r_az);
  add_int("r_el", mc.grids.r_el);
  add("tau_max", mc.grids.tau_max);
  add("nu_max", mc.grids.nu_max);
  return s;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const MonteCarloConfig& mc) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_description(mc))));
  return buf;
}

inline void write_rmse_csv(const RmseReport& report, std::ostream& os) {
  os << "# config_hash=" << report.config_hash << " base_seed=" << report.base_seed
     << "\n";
  os << "estimator,parameter,snr_db,q,trials,rmse\n";
  char buf[64];
  auto emit = [&](const RmseCell& c) {
    os << c.estimator << ',' << c.parameter << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", c.snr_db);
    os << buf << ',' << c.q << ',' << c.trials << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", c.rmse);
    os << buf << '\n';
  };
  for (const auto& c : report.cells) emit(c);
  for (const auto& c : report.angle_combined) emit(c);
}

inline void write_rmse_json(const RmseReport& report, std::ostream& os) {
  nlohmann::json j;
  j["config_hash"] = report.config_hash;
  j["base_seed"] = report.base_seed;
  j["rejected_draws"] = report.rejected_draws;
  auto cell_to_json = [](const RmseCell& c) {
    nlohmann::json e;
    e["estimator"] = c.estimator;
    e["parameter"] = c.parameter;
    e["snr_db"] = c.snr_db;
    e["q"] = c.q;
    e["trials"] = c.trials;
    e["rmse"] = c.rmse;
    return e;
  };
  j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) j["cells"].push_back(cell_to_json(c));
  j["angle_combined"] = nlohmann::json::array();
  for (const auto& c : report.angle_combined)
    j["angle_combined"].push_back(cell_to_json(c));
  os << j.dump(2) << '\n';
}

namespace detail {

inline int parameter_rank(const std::string& p) {
  if (p == "tau") return 0;
  if (p == "nu") return 1;
  if (p == "theta_az") return 2;
  return 3;
}

/// Fills the report cell by cell so a mid-sweep failure leaves the completed
/// cells behind. On success the cells are sorted into the canonical
/// (estimator, parameter, snr, q) order.
inline void run_sweep_into(const MonteCarloConfig& mc, RmseReport& report) {
  mc.validate();
  report.base_seed = mc.base_seed;
  report.config_hash = config_hash(mc);

  const char* est_names[] = {"hosvd", "baseline"};
  for (std::size_t q_i = 0; q_i < mc.q_values.size(); ++q_i) {
    const SweepContext ctx = make_sweep_context(mc, mc.q_values[q_i]);
    for (std::size_t snr_i = 0; snr_i < mc.snr_grid_db.size(); ++snr_i) {
      const double snr_db = mc.snr_grid_db[snr_i];
      std::vector<TrialOutput> results(mc.trials);
      parallel_for(mc.trials, [&](int trial) {
        results[trial] = run_trial_impl(mc, ctx, snr_db, trial);
      });
      for (const TrialOutput& r : results) report.rejected_draws += r.rejected_draws;

      for (int est = 0; est < 2; ++est) {
        if (est == 0 && !mc.run_hosvd) continue;
        if (est == 1 && !mc.run_baseline) continue;
        std::vector<double> tau_e, tau_t, nu_e, nu_t, az_e, az_t, el_e, el_t;
        for (const TrialOutput& r : results) {
          const Estimate& e = est == 0 ? *r.hosvd : *r.baseline;
          tau_e.push_back(e.tau_hat);
          tau_t.push_back(r.truth.tau);
          nu_e.push_back(e.nu_hat);
          nu_t.push_back(r.truth.nu);
          az_e.push_back(e.theta_az_hat);
          az_t.push_back(r.truth.theta_az);
          el_e.push_back(e.theta_el_hat);
          el_t.push_back(r.truth.theta_el);
        }
        RmseCell base;
        base.estimator = est_names[est];
        base.snr_db = snr_db;
        base.q = mc.q_values[q_i];
        base.trials = mc.trials;

        RmseCell cell = base;
        cell.parameter = "tau";
        cell.rmse = normalized_rmse(tau_e, tau_t);
        report.cells.push_back(cell);
        cell = base;
        cell.parameter = "nu";
        cell.rmse = normalized_rmse(nu_e, nu_t);
        report.cells.push_back(cell);
        cell = base;
        cell.parameter = "theta_az";
        cell.rmse = normalized_rmse(az_e, az_t);
        report.cells.push_back(cell);
        cell = base;
        cell.parameter = "theta_el";
        cell.rmse = normalized_rmse(el_e, el_t);
        report.cells.push_back(cell);
        cell = base;
        cell.parameter = "theta";
        cell.rmse = normalized_rmse_pair(az_e, el_e, az_t, el_t);
        report.angle_combined.push_back(cell);
      }
    }
  }

  auto canonical = [&](const RmseCell& c) {
    const int est = c.estimator == "hosvd" ? 0 : 1;
    const auto snr_i = static_cast<int>(
        std::find(mc.snr_grid_db.begin(), mc.snr_grid_db.end(), c.snr_db) -
        mc.snr_grid_db.begin());
    const auto q_i = static_cast<int>(
        std::find(mc.q_values.begin(), mc.q_values.end(), c.q) -
        mc.q_values.begin());
    return std::make_tuple(est, parameter_rank(c.parameter), snr_i, q_i);
  };
  std::stable_sort(report.cells.begin(), report.cells.end(),
                   [&](const RmseCell& a, const RmseCell& b) {
                     return canonical(a) < canonical(b);
                   });
  std::stable_sort(report.angle_combined.begin(), report.angle_combined.end(),
                   [&](const RmseCell& a, const RmseCell& b) {
                     return canonical(a) < canonical(b);
                   });
}

}  // namespace detail

/// Full Cartesian sweep (estimator x parameter x snr x q). Trials run in
/// parallel keyed by index; aggregation is a fixed-order reduction so the
/// report (and its CSV/JSON serialization) is byte-deterministic.
inline RmseReport run_sweep(const MonteCarloConfig& mc) {
  RmseReport report;
  detail::run_sweep_into(mc, report);
  return report;
}

/// As run_sweep, also persisting rmse.csv and rmse.json under out_dir. If a
/// cell fails mid-sweep, the completed cells are still written before the
/// error propagates.
inline RmseReport run_sweep(const MonteCarloConfig& mc,
                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  RmseReport report;
  auto persist = [&] {
    std::ofstream csv(out_dir / "rmse.csv");
    write_rmse_csv(report, csv);
    std::ofstream json(out_dir / "rmse.json");
    write_rmse_json(report, json);
  };
  try {
    detail::run_sweep_into(mc, report);
  } catch (...) {
    persist();
    throw;
  }
  persist();
  return report;
}

}  // namespace irsense
