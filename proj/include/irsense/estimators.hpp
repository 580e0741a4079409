// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "irsense/hosvd.hpp"
#include "irsense/signal.hpp"
#include "irsense/steering.hpp"
#include "irsense/system.hpp"
#include "irsense/tensor.hpp"

namespace irsense {

/// Grid sizes and optional range overrides; zero ranges mean "derive from
/// the system config" (tau_max = 0.8/Δf, nu_max = 1/(2 q T_s), both chosen
/// to stay inside the unambiguous span of the delay and Doppler signatures).
struct GridParams {
  int r_tau = 100;
  int r_nu = 100;
  int r_az = 100;
  int r_el = 100;
  double tau_max = 0.0;
  double nu_max = 0.0;

  void validate() const {
    if (r_tau < 1) throw config_error("r_tau", "must be >= 1");
    if (r_nu < 1) throw config_error("r_nu", "must be >= 1");
    if (r_az < 1) throw config_error("r_az", "must be >= 1");
    if (r_el < 1) throw config_error("r_el", "must be >= 1");
    if (tau_max < 0.0) throw config_error("tau_max", "must be >= 0");
    if (nu_max < 0.0) throw config_error("nu_max", "must be >= 0");
  }
};

/// Realized search grids. The angle grid is the Cartesian product of the
/// azimuth and elevation axes; flat candidate index is elevation-major:
/// flat = i_el * r_az + i_az.
struct GridSpec {
  std::vector<double> tau_grid;
  std::vector<double> nu_grid;
  std::vector<double> az_grid;
  std::vector<double> el_grid;

  std::size_t r_theta() const noexcept { return az_grid.size() * el_grid.size(); }

  void validate() const {
    auto check = [](const char* key, const std::vector<double>& g) {
      if (g.empty()) throw config_error(key, "grid must be nonempty");
      for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1]))
          throw config_error(key, "grid must be strictly increasing");
    };
    check("tau_grid", tau_grid);
    check("nu_grid", nu_grid);
    check("az_grid", az_grid);
    check("el_grid", el_grid);
  }
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo + step * i;
  out.back() = hi;
  return out;
}

}  // namespace detail

inline GridSpec make_grids(const SystemConfig& cfg, const GridParams& params = {}) {
  params.validate();
  const double tau_max = params.tau_max > 0.0 ? params.tau_max : 0.8 / cfg.delta_f;
  const double nu_max =
      params.nu_max > 0.0 ? params.nu_max : 1.0 / (2.0 * cfg.q * cfg.t_sym);
  GridSpec grids;
  grids.tau_grid = detail::linspace(0.0, tau_max, params.r_tau);
  grids.nu_grid = detail::linspace(0.0, nu_max, params.r_nu);
  grids.az_grid = detail::linspace(0.0, kPi / 2.0, params.r_az);
  grids.el_grid = detail::linspace(0.0, kPi / 2.0, params.r_el);
  grids.validate();
  return grids;
}

struct PeakSearchResult {
  double value = 0.0;  ///< grid value at the peak
  double peak = 0.0;   ///< peak score
  int index = 0;       ///< grid index of the peak (lowest index on ties)
};

/// argmax over the delay grid of |c(τ)^H ĉ|² / ‖ĉ‖².
inline PeakSearchResult delay_peak_search(const cvec& c_hat, const GridSpec& grids,
                                          double delta_f) {
  const double norm_sq = c_hat.squaredNorm();
  PeakSearchResult best;
  best.peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grids.tau_grid.size(); ++i) {
    const cvec c = delay_steering(grids.tau_grid[i], static_cast<int>(c_hat.size()),
                                  delta_f);
    const double score = std::norm(cplx(c.dot(c_hat))) / norm_sq;
    if (score > best.peak) {
      best.peak = score;
      best.index = static_cast<int>(i);
    }
  }
  best.value = grids.tau_grid[best.index];
  return best;
}

/// argmax over the Doppler grid of |d_Q(ν)^H d̂|² / ‖d̂‖²; step is the
/// sample spacing of d̂ (the symbol duration for within-block vectors).
inline PeakSearchResult doppler_peak_search(const cvec& d_hat, const GridSpec& grids,
                                            double step) {
  const double norm_sq = d_hat.squaredNorm();
  PeakSearchResult best;
  best.peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grids.nu_grid.size(); ++i) {
    const cvec d = doppler_steering(grids.nu_grid[i],
                                    static_cast<int>(d_hat.size()), step);
    const double score = std::norm(cplx(d.dot(d_hat))) / norm_sq;
    if (score > best.peak) {
      best.peak = score;
      best.index = static_cast<int>(i);
    }
  }
  best.value = grids.nu_grid[best.index];
  return best;
}

/// Strip the block-level Doppler from the third tensor factor:
/// out[l] = β̂[l] * conj(d_L(ν̂)[l]). Division by a unit-modulus entry is
/// multiplication by its conjugate.
inline cvec derive_g_from_beta(const cvec& beta_hat, double nu_hat,
                               const SystemConfig& cfg) {
  if (beta_hat.size() != cfg.l)
    throw std::invalid_argument("derive_g_from_beta: length must equal the block count");
  const cvec d_l = doppler_steering(nu_hat, cfg.l, cfg.q * cfg.t_sym);
  return hadamard_vec(beta_hat, d_l.conjugate());
}

/// Departure steering vectors p(θ) for every angle-grid candidate, stacked
/// as columns in elevation-major order. Depends only on the grid and array
/// geometry, so it can be built once and reused across trials.
struct AngleCandidateTable {
  cmat p;  ///< N x (r_az * r_el); column i_el*r_az + i_az
  int r_az = 0;
  int r_el = 0;
};

inline AngleCandidateTable make_angle_table(const GridSpec& grids,
                                            const SystemConfig& cfg) {
  AngleCandidateTable table;
  table.r_az = static_cast<int>(grids.az_grid.size());
  table.r_el = static_cast<int>(grids.el_grid.size());
  table.p.resize(cfg.n(), static_cast<Eigen::Index>(table.r_az) * table.r_el);
  for (int ie = 0; ie < table.r_el; ++ie)
    for (int ia = 0; ia < table.r_az; ++ia)
      table.p.col(static_cast<Eigen::Index>(ie) * table.r_az + ia) =
          ura_steering(grids.az_grid[ia], grids.el_grid[ie], cfg.n_x, cfg.n_y,
                       cfg.d_x, cfg.d_y, cfg.wavelength);
  return table;
}

struct AngleSearchResult {
  double az = 0.0;
  double el = 0.0;
  double peak = 0.0;
  int az_index = 0;
  int el_index = 0;
  int flat_index = 0;   ///< elevation-major flat index
  int skipped = 0;      ///< candidates with a zero-norm signature
  bool flat = false;    ///< score was identical across all candidates
};

/// Two-dimensional angle search: for each grid candidate θ the model
/// signature g_L(θ) is built from the profile and the known arrival angles,
/// and the score is |c(τ̂)^H [Y]_(1) ((g_L(θ) ⊙ d_L(ν̂)) ⊗ d_Q(ν̂))^*|² / ‖g_L(θ)‖².
/// Ties resolve to the lowest elevation-major flat index.
inline AngleSearchResult angle_search(const Tensor3& y, double tau_hat,
                                      double nu_hat, const IrsProfile& profile,
                                      AnglePair phi, const GridSpec& grids,
                                      const SystemConfig& cfg,
                                      const AngleCandidateTable& table) {
  if (y.n1() != cfg.n_c || y.n2() != cfg.q || y.n3() != cfg.l)
    throw std::invalid_argument("angle_search: tensor dims do not match config");

  // Candidate signatures: row r of g holds g_L(θ_r)^T. Folding the known
  // arrival steering into the profile keeps the per-candidate work at one
  // row-times-matrix product.
  const cvec a_phi = ura_steering(phi.az, phi.el, cfg.n_x, cfg.n_y, cfg.d_x,
                                  cfg.d_y, cfg.wavelength);
  const cmat folded = a_phi.asDiagonal() * profile.w_l;  // N x L
  const cmat inner = table.p.transpose() * folded;       // Rθ x L
  const cmat g = inner.array().square().matrix();

  // Reduce the data once: s[l] = (c(τ̂)^H [Y]_(1))_l · d_Q(ν̂)^* · conj(d_L(ν̂)[l]),
  // after which each candidate score is a length-L inner product.
  const cvec c_hat = delay_steering(tau_hat, cfg.n_c, cfg.delta_f);
  const Eigen::RowVectorXcd row = c_hat.adjoint() * unfold(y, 1);
  const cvec d_q = doppler_steering(nu_hat, cfg.q, cfg.t_sym);
  const cvec d_l = doppler_steering(nu_hat, cfg.l, cfg.q * cfg.t_sym);
  cvec s(cfg.l);
  for (int blk = 0; blk < cfg.l; ++blk)
    s[blk] = (row.segment(static_cast<Eigen::Index>(blk) * cfg.q, cfg.q) *
              d_q.conjugate())(0) *
             std::conj(d_l[blk]);

  const rvec num = (g.conjugate() * s).cwiseAbs2();
  const rvec den = g.cwiseAbs2().rowwise().sum();

  AngleSearchResult best;
  best.peak = -std::numeric_limits<double>::infinity();
  double min_score = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < num.size(); ++r) {
    if (den[r] == 0.0) {
      ++best.skipped;
      continue;
    }
    const double score = num[r] / den[r];
    min_score = std::min(min_score, score);
    if (score > best.peak) {
      best.peak = score;
      best.flat_index = static_cast<int>(r);
    }
  }
  if (best.peak == -std::numeric_limits<double>::infinity())
    throw degenerate_input_error("angle_search: every candidate signature is zero");
  best.el_index = best.flat_index / table.r_az;
  best.az_index = best.flat_index % table.r_az;
  best.az = grids.az_grid[best.az_index];
  best.el = grids.el_grid[best.el_index];
  best.flat = (min_score == best.peak);
  return best;
}

inline AngleSearchResult angle_search(const Tensor3& y, double tau_hat,
                                      double nu_hat, const IrsProfile& profile,
                                      AnglePair phi, const GridSpec& grids,
                                      const SystemConfig& cfg) {
  return angle_search(y, tau_hat, nu_hat, profile, phi, grids, cfg,
                      make_angle_table(grids, cfg));
}

/// Estimator output: grid-resolved parameters plus peak metadata. For the
/// coupled baseline the delay and Doppler peaks are the shared joint peak.
struct Estimate {
  double tau_hat = 0.0;
  double nu_hat = 0.0;
  double theta_az_hat = 0.0;
  double theta_el_hat = 0.0;
  double tau_peak = 0.0;
  double nu_peak = 0.0;
  double angle_peak = 0.0;
  int tau_index = 0;
  int nu_index = 0;
  int az_index = 0;
  int el_index = 0;
  int skipped_angle_candidates = 0;
  bool angle_search_flat = false;
  cvec g_l_diagnostic;  ///< data-derived per-block signature (decoupled path only)
};

namespace detail {

inline void apply_angle(Estimate& est, const AngleSearchResult& angle) {
  est.theta_az_hat = angle.az;
  est.theta_el_hat = angle.el;
  est.angle_peak = angle.peak;
  est.az_index = angle.az_index;
  est.el_index = angle.el_index;
  est.skipped_angle_candidates = angle.skipped;
  est.angle_search_flat = angle.flat;
}

}  // namespace detail

/// Decoupled pipeline: rank-one HOSVD factor extraction, then independent
/// one-dimensional delay and Doppler searches on the first two factors,
/// then the two-dimensional angle search on the original tensor.
inline Estimate hosvd_estimate(const Tensor3& y, const SystemConfig& cfg,
                               const IrsProfile& profile, AnglePair phi,
                               const GridSpec& grids,
                               const AngleCandidateTable& table) {
  const Rank1Factors factors = hosvd_rank1(y);
  const PeakSearchResult delay = delay_peak_search(factors.u1, grids, cfg.delta_f);
  const PeakSearchResult doppler = doppler_peak_search(factors.u2, grids, cfg.t_sym);

  Estimate est;
  est.tau_hat = delay.value;
  est.tau_peak = delay.peak;
  est.tau_index = delay.index;
  est.nu_hat = doppler.value;
  est.nu_peak = doppler.peak;
  est.nu_index = doppler.index;
  est.g_l_diagnostic = derive_g_from_beta(factors.u3, doppler.value, cfg);

  detail::apply_angle(est, angle_search(y, delay.value, doppler.value, profile,
                                        phi, grids, cfg, table));
  return est;
}

inline Estimate hosvd_estimate(const Tensor3& y, const SystemConfig& cfg,
                               const IrsProfile& profile, AnglePair phi,
                               const GridSpec& grids) {
  return hosvd_estimate(y, cfg, profile, phi, grids, make_angle_table(grids, cfg));
}

/// Coupled baseline: joint delay-Doppler grid search maximizing the
/// block-summed matched-filter energy Σ_l |c(τ)^H (Y_l d_Q(ν)^*)|², followed
/// by the same angle search. The naive per-candidate evaluation of the joint
/// statistic costs (2 N_c Q + N_c - 1) flops per block, which is what the
/// analytic complexity model in flops.hpp counts.
inline Estimate baseline_estimate(const Tensor3& y, const SystemConfig& cfg,
                                  const IrsProfile& profile, AnglePair phi,
                                  const GridSpec& grids,
                                  const AngleCandidateTable& table) {
  if (y.frobenius_norm() == 0.0)
    throw degenerate_input_error("baseline_estimate: zero tensor");
  if (y.n1() != cfg.n_c || y.n2() != cfg.q || y.n3() != cfg.l)
    throw std::invalid_argument("baseline_estimate: tensor dims do not match config");

  const int r_tau = static_cast<int>(grids.tau_grid.size());
  const int r_nu = static_cast<int>(grids.nu_grid.size());
  cmat c_tab(cfg.n_c, r_tau);
  for (int i = 0; i < r_tau; ++i)
    c_tab.col(i) = delay_steering(grids.tau_grid[i], cfg.n_c, cfg.delta_f);
  const cmat a = c_tab.adjoint() * unfold(y, 1);  // r_tau x (Q L)

  Eigen::MatrixXd stat(r_tau, r_nu);
  for (int iv = 0; iv < r_nu; ++iv) {
    const cvec d_conj =
        doppler_steering(grids.nu_grid[iv], cfg.q, cfg.t_sym).conjugate();
    rvec acc = rvec::Zero(r_tau);
    for (int blk = 0; blk < cfg.l; ++blk)
      acc += (a.middleCols(static_cast<Eigen::Index>(blk) * cfg.q, cfg.q) * d_conj)
                 .cwiseAbs2();
    stat.col(iv) = acc;
  }

  // Delay-major scan; strict comparison keeps the lowest flat index on ties.
  Estimate est;
  double peak = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < r_tau; ++it)
    for (int iv = 0; iv < r_nu; ++iv)
      if (stat(it, iv) > peak) {
        peak = stat(it, iv);
        est.tau_index = it;
        est.nu_index = iv;
      }
  est.tau_hat = grids.tau_grid[est.tau_index];
  est.nu_hat = grids.nu_grid[est.nu_index];
  est.tau_peak = peak;
  est.nu_peak = peak;

  detail::apply_angle(est, angle_search(y, est.tau_hat, est.nu_hat, profile, phi,
                                        grids, cfg, table));
  return est;
}

inline Estimate baseline_estimate(const Tensor3& y, const SystemConfig& cfg,
                                  const IrsProfile& profile, AnglePair phi,
                                  const GridSpec& grids) {
  return baseline_estimate(y, cfg, profile, phi, grids, make_angle_table(grids, cfg));
}

}  // namespace irsense
