// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "irsense/flops.hpp"
#include "irsense/montecarlo.hpp"
#include "test_helpers.hpp"

using namespace irsense;

TEST_CASE("normalized_rmse elementary values and the duplicate-formula oracle") {
  REQUIRE(normalized_rmse({2.0, 3.0, 4.0}, {2.0, 3.0, 4.0}) == 0.0);
  REQUIRE_THAT(normalized_rmse({1.0}, {2.0}),
               Catch::Matchers::WithinRel(0.5, 1e-15));

  std::mt19937_64 engine(51);
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  std::vector<double> est(64), truth(64);
  for (std::size_t i = 0; i < est.size(); ++i) {
    truth[i] = unit(engine);
    est[i] = truth[i] + 0.1 * unit(engine);
  }
  // Independently coded mean/sqrt oracle.
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double rel = (est[i] - truth[i]) / truth[i];
    acc += rel * rel;
  }
  REQUIRE_THAT(normalized_rmse(est, truth),
               Catch::Matchers::WithinRel(std::sqrt(acc / est.size()), 1e-12));

  REQUIRE_THROWS_AS(normalized_rmse({1.0}, {0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(normalized_rmse({1.0, 2.0}, {1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(normalized_rmse({}, {}), std::invalid_argument);
}

TEST_CASE("normalized_rmse_pair on hand-computed values") {
  // One trial: truth (3,4), estimate (3,5): ||e||/||x|| = 1/5.
  REQUIRE_THAT(normalized_rmse_pair({3.0}, {5.0}, {3.0}, {4.0}),
               Catch::Matchers::WithinRel(0.2, 1e-15));
  REQUIRE_THROWS_AS(normalized_rmse_pair({1.0}, {1.0}, {0.0}, {0.0}),
                    std::invalid_argument);
}

TEST_CASE("normalized_rmse converges for synthetic Gaussian errors") {
  // x = 1, e ~ N(0, s^2): the estimator converges to s within 3 sigma of
  // its sampling distribution (s / sqrt(2 n) by the delta method).
  const double s = 0.37;
  const int n = 10000;
  std::mt19937_64 engine(52);
  std::normal_distribution<double> gauss(0.0, s);
  std::vector<double> est(n), truth(n, 1.0);
  for (int i = 0; i < n; ++i) est[i] = 1.0 + gauss(engine);
  const double rmse = normalized_rmse(est, truth);
  REQUIRE_THAT(rmse, Catch::Matchers::WithinAbs(s, 3.0 * s / std::sqrt(2.0 * n)));
}

TEST_CASE("trial seeds are deterministic, distinct and block-size independent") {
  REQUIRE(trial_seed(1, 10.0, 3) == trial_seed(1, 10.0, 3));
  REQUIRE(trial_seed(1, 10.0, 3) != trial_seed(1, 10.0, 4));
  REQUIRE(trial_seed(1, 10.0, 3) != trial_seed(2, 10.0, 3));
  REQUIRE(trial_seed(1, 10.0, 3) != trial_seed(1, 20.0, 3));
}

TEST_CASE("run_trial is bit-deterministic") {
  MonteCarloConfig mc;
  mc.trials = 1;
  mc.snr_grid_db = {10.0};
  mc.q_values = {8};
  mc.base_seed = 7;
  const TrialOutput a = run_trial(mc, 10.0, 8, 0);
  const TrialOutput b = run_trial(mc, 10.0, 8, 0);
  REQUIRE(a.truth.tau == b.truth.tau);
  REQUIRE(a.truth.alpha == b.truth.alpha);
  REQUIRE(a.hosvd->tau_hat == b.hosvd->tau_hat);
  REQUIRE(a.hosvd->nu_hat == b.hosvd->nu_hat);
  REQUIRE(a.baseline->theta_az_hat == b.baseline->theta_az_hat);
  REQUIRE(a.baseline->theta_el_hat == b.baseline->theta_el_hat);

  const TrialOutput c = run_trial(mc, 10.0, 8, 1);
  REQUIRE(a.truth.tau != c.truth.tau);

  REQUIRE_THROWS_AS(run_trial(mc, 10.0, 5, 0), std::invalid_argument);
}

TEST_CASE("run_trial with infinite SNR and on-grid truth is error free") {
  MonteCarloConfig mc;
  mc.trials = 1;
  mc.snr_grid_db = {std::numeric_limits<double>::infinity()};
  mc.q_values = {4, 8};
  mc.base_seed = 3;
  mc.on_grid_truth = true;
  for (int q : {4, 8}) {
    for (int trial = 0; trial < 5; ++trial) {
      const TrialOutput out =
          run_trial(mc, std::numeric_limits<double>::infinity(), q, trial);
      for (const auto& est : {out.hosvd, out.baseline}) {
        REQUIRE(est->tau_hat == out.truth.tau);
        REQUIRE(est->nu_hat == out.truth.nu);
        REQUIRE(est->theta_az_hat == out.truth.theta_az);
        REQUIRE(est->theta_el_hat == out.truth.theta_el);
      }
    }
  }
}

TEST_CASE("larger blocks improve Doppler estimation at matched trials") {
  MonteCarloConfig mc;
  mc.trials = 200;
  mc.snr_grid_db = {10.0};
  mc.q_values = {4, 8};
  mc.base_seed = 11;
  mc.run_baseline = false;
  std::vector<double> est4, truth4, est8, truth8;
  for (int trial = 0; trial < mc.trials; ++trial) {
    const TrialOutput t4 = run_trial(mc, 10.0, 4, trial);
    const TrialOutput t8 = run_trial(mc, 10.0, 8, trial);
    // Same trial seed, hence the same drawn target for both block sizes.
    REQUIRE(t4.truth.nu == t8.truth.nu);
    est4.push_back(t4.hosvd->nu_hat);
    truth4.push_back(t4.truth.nu);
    est8.push_back(t8.hosvd->nu_hat);
    truth8.push_back(t8.truth.nu);
  }
  REQUIRE(normalized_rmse(est8, truth8) <= normalized_rmse(est4, truth4));
}

TEST_CASE("run_sweep produces the full cell grid") {
  MonteCarloConfig mc;
  mc.trials = 1;
  mc.snr_grid_db = {10.0};
  mc.q_values = {8};
  mc.base_seed = 5;
  const RmseReport report = run_sweep(mc);
  REQUIRE(report.cells.size() == 8);  // 2 estimators x 4 parameters
  REQUIRE(report.angle_combined.size() == 2);
  REQUIRE(report.config_hash == config_hash(mc));
  for (const RmseCell& cell : report.cells) {
    REQUIRE(cell.trials == 1);
    REQUIRE(cell.rmse >= 0.0);
  }
  // Canonical order: estimator-major, then parameter.
  REQUIRE(report.cells.front().estimator == "hosvd");
  REQUIRE(report.cells.front().parameter == "tau");
  REQUIRE(report.cells.back().estimator == "baseline");
  REQUIRE(report.cells.back().parameter == "theta_el");
}

TEST_CASE("run_sweep delay RMSE decreases with SNR") {
  MonteCarloConfig mc;
  mc.trials = 200;
  mc.snr_grid_db = {0.0, 10.0, 20.0};
  mc.q_values = {8};
  mc.base_seed = 21;
  mc.run_baseline = false;
  const RmseReport report = run_sweep(mc);
  std::vector<double> tau_rmse;
  for (const RmseCell& cell : report.cells)
    if (cell.parameter == "tau") tau_rmse.push_back(cell.rmse);
  REQUIRE(tau_rmse.size() == 3);
  // Non-increasing up to 2x statistical slack between adjacent SNR points.
  REQUIRE(tau_rmse[1] <= 2.0 * tau_rmse[0]);
  REQUIRE(tau_rmse[2] <= 2.0 * tau_rmse[1]);
  // And the 20 dB point is clearly better than the 0 dB point and already
  // below the 1e-1 level expected in the quantization-limited regime.
  REQUIRE(tau_rmse[2] <= tau_rmse[0]);
  REQUIRE(tau_rmse[2] < 0.1);
}

TEST_CASE("run_sweep is deterministic down to the serialized bytes") {
  MonteCarloConfig mc;
  mc.trials = 3;
  mc.snr_grid_db = {0.0, 10.0};
  mc.q_values = {4, 8};
  mc.base_seed = 9;
  const RmseReport a = run_sweep(mc);
  const RmseReport b = run_sweep(mc);
  std::ostringstream csv_a, csv_b, json_a, json_b;
  write_rmse_csv(a, csv_a);
  write_rmse_csv(b, csv_b);
  write_rmse_json(a, json_a);
  write_rmse_json(b, json_b);
  REQUIRE(csv_a.str() == csv_b.str());
  REQUIRE(json_a.str() == json_b.str());
}

TEST_CASE("config hash distinguishes configs and ignores nothing relevant") {
  MonteCarloConfig a;
  MonteCarloConfig b;
  REQUIRE(config_hash(a) == config_hash(b));
  b.trials += 1;
  REQUIRE(config_hash(a) != config_hash(b));
  MonteCarloConfig c;
  c.system.d2 *= 1.5;
  REQUIRE(config_hash(a) != config_hash(c));
}

TEST_CASE("monte carlo config validation names the offending key") {
  MonteCarloConfig mc;
  mc.q_values = {7};  // does not divide M = 64
  try {
    mc.validate();
    FAIL("expected config_error");
  } catch (const config_error& e) {
    REQUIRE(e.key() == "q_values");
  }

  MonteCarloConfig no_est;
  no_est.run_hosvd = false;
  no_est.run_baseline = false;
  REQUIRE_THROWS_AS(no_est.validate(), config_error);

  MonteCarloConfig big_l;
  big_l.q_values = {1};  // l = 64 > N = 16: profile truncation impossible
  REQUIRE_THROWS_AS(big_l.validate(), config_error);
}

TEST_CASE("complexity_model reproduces the derived reference totals") {
  const FlopReport q4 = complexity_model(16, 4, 16, 100, 100, 10000);
  REQUIRE(q4.baseline_total == 24310000ull);
  REQUIRE(q4.proposed_total == 1448872ull);

  const FlopReport q8 = complexity_model(16, 8, 8, 100, 100, 10000);
  REQUIRE(q8.baseline_total == 24390000ull);
  REQUIRE(q8.proposed_total == 2728872ull);
  REQUIRE_THAT(q8.ratio(), Catch::Matchers::WithinAbs(8.94, 0.005));

  const FlopReport ones = complexity_model(1, 1, 1, 1, 1, 1);
  REQUIRE(ones.baseline_total == 4ull);
  REQUIRE(ones.proposed_total == 7ull);

  REQUIRE_THROWS_AS(complexity_model(0, 1, 1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("flop report breakdown sums to the totals") {
  const FlopReport rep = complexity_model(32, 8, 8, 100, 100, 10000);
  std::uint64_t base = 0, prop = 0;
  for (const FlopTerm& t : rep.baseline_terms) base += t.flops;
  for (const FlopTerm& t : rep.proposed_terms) prop += t.flops;
  REQUIRE(base == rep.baseline_total);
  REQUIRE(prop == rep.proposed_total);
  REQUIRE(rep.baseline_terms.size() == 2);
  REQUIRE(rep.proposed_terms.size() == 4);
}

TEST_CASE("complexity_sweep over subcarriers keeps the ratio in range") {
  std::vector<int> values;
  for (int nc = 16; nc <= 256; nc += 16) values.push_back(nc);
  const auto reports =
      complexity_sweep(SweepVariable::subcarriers, values, 16, 8, 8, 100, 100, 10000);
  REQUIRE(reports.size() == values.size());
  for (const FlopReport& r : reports) {
    REQUIRE(r.ratio() >= 8.0);
    REQUIRE(r.ratio() <= 12.0);
  }
  // A single-point sweep reduces to the model itself.
  const auto single =
      complexity_sweep(SweepVariable::subcarriers, {16}, 16, 8, 8, 100, 100, 10000);
  REQUIRE(single[0].baseline_total ==
          complexity_model(16, 8, 8, 100, 100, 10000).baseline_total);
}

TEST_CASE("complexity_sweep over grid points grows the baseline-to-proposed ratio") {
  const auto reports = complexity_sweep(SweepVariable::grid_points,
                                        {50, 100, 200, 400}, 16, 8, 8, 0, 0, 0);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    REQUIRE(reports[i].r_tau == reports[i].r_nu);
    REQUIRE(reports[i].r_theta == reports[i].r_tau * reports[i].r_tau);
    if (i > 0) REQUIRE(reports[i].ratio() > reports[i - 1].ratio());
  }
  REQUIRE_THROWS_AS(complexity_sweep(SweepVariable::grid_points, {}, 16, 8, 8, 0, 0, 0),
                    std::invalid_argument);
}

TEST_CASE("flops CSV has the documented columns") {
  const auto reports =
      complexity_sweep(SweepVariable::subcarriers, {16, 32}, 16, 8, 8, 100, 100, 10000);
  std::ostringstream os;
  write_flops_csv(SweepVariable::subcarriers, reports, os);
  const std::string text = os.str();
  REQUIRE(text.find("# q=8 l=8 r_tau=100 r_nu=100 r_theta=10000\n") == 0);
  REQUIRE(text.find("n_c,baseline_flops,proposed_flops,ratio\n") != std::string::npos);
  REQUIRE(text.find("16,24390000,2728872,8.937759") != std::string::npos);
}
