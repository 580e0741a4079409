// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <random>

#include "irsense/steering.hpp"
#include "irsense/system.hpp"
#include "irsense/tensor.hpp"
#include "irsense/types.hpp"

namespace irsense {

/// IRS phase-shift schedule: one unit-modulus column per block, each held
/// for q consecutive OFDM symbols.
struct IrsProfile {
  cmat w_l;   ///< N x L, one phase-shift pattern per block
  int q = 1;  ///< repetition factor (symbols per block)

  int n() const noexcept { return static_cast<int>(w_l.rows()); }
  int l() const noexcept { return static_cast<int>(w_l.cols()); }

  /// Per-symbol expansion W = w_l ⊗ 1_q^T, dims N x (q*L).
  cmat expanded() const {
    cmat w(w_l.rows(), w_l.cols() * q);
    for (Eigen::Index col = 0; col < w_l.cols(); ++col)
      for (int rep = 0; rep < q; ++rep) w.col(col * q + rep) = w_l.col(col);
    return w;
  }

  void validate() const {
    if (w_l.rows() < 1 || w_l.cols() < 1)
      throw config_error("w_l", "profile must be nonempty");
    if (q < 1) throw config_error("q", "repetition factor must be >= 1");
    for (Eigen::Index j = 0; j < w_l.cols(); ++j)
      for (Eigen::Index i = 0; i < w_l.rows(); ++i)
        if (std::abs(std::abs(w_l(i, j)) - 1.0) > 1e-12)
          throw config_error("w_l", "profile entries must have unit modulus");
  }
};

/// First l columns of the size-n DFT matrix: w_l(p, c) = exp(-j2π p c / n).
/// Columns are mutually orthogonal; requires l <= n.
inline IrsProfile irs_dft_profile(int n, int l, int q = 1) {
  if (n < 1) throw std::invalid_argument("irs_dft_profile: n must be >= 1");
  if (l < 1 || l > n)
    throw std::invalid_argument("irs_dft_profile: need 1 <= l <= n");
  IrsProfile profile;
  profile.q = q;
  profile.w_l.resize(n, l);
  for (int c = 0; c < l; ++c)
    for (int p = 0; p < n; ++p)
      profile.w_l(p, c) =
          std::polar(1.0, -2.0 * kPi * static_cast<double>(p) * c / n);
  return profile;
}

/// Magnitude of the two-hop complex path gain: radar-equation budget over
/// BS-IRS-target-IRS-BS with element pattern F^2(x) = cos(x)^e.
inline double gain_alpha_magnitude(const SystemConfig& cfg, double phi_el,
                                   double theta_el) {
  const double f1_sq = std::pow(std::cos(phi_el), cfg.radiation_exponent);
  const double f2_sq = std::pow(std::cos(theta_el), cfg.radiation_exponent);
  const double num = cfg.p_t * cfg.g1 * cfg.g1 * cfg.g2 * cfg.g2 * f1_sq *
                     f2_sq * cfg.d_x * cfg.d_x * cfg.d_y * cfg.d_y *
                     cfg.wavelength * cfg.wavelength * cfg.sigma_rcs;
  const double four_pi = 4.0 * kPi;
  const double den = std::pow(four_pi, 5) * std::pow(cfg.d1, 4) * std::pow(cfg.d2, 4);
  return std::sqrt(num / den);
}

/// Complex path gain: deterministic magnitude from the link budget, phase
/// drawn uniformly in [0, 2π) from the seed.
inline cplx gain_alpha(const SystemConfig& cfg, double phi_el, double theta_el,
                       std::uint64_t rng_seed) {
  std::mt19937_64 engine(rng_seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  return std::polar(gain_alpha_magnitude(cfg, phi_el, theta_el), phase(engine));
}

/// Per-block angular signature g_L with entries (b^T w_l)^2, where
/// b = a(phi) ⊙ p(theta) combines the arrival and departure steering
/// vectors of the IRS.
inline cvec g_l_signature(AnglePair theta, AnglePair phi,
                          const IrsProfile& profile, const SystemConfig& cfg) {
  if (profile.n() != cfg.n() || profile.l() != cfg.l)
    throw std::invalid_argument("g_l_signature: profile dims do not match config");
  const cvec a = ura_steering(phi.az, phi.el, cfg.n_x, cfg.n_y, cfg.d_x,
                              cfg.d_y, cfg.wavelength);
  const cvec p = ura_steering(theta.az, theta.el, cfg.n_x, cfg.n_y, cfg.d_x,
                              cfg.d_y, cfg.wavelength);
  const cvec b = hadamard_vec(a, p);
  cvec out(profile.l());
  for (int blk = 0; blk < profile.l(); ++blk) {
    const cplx inner = b.transpose() * profile.w_l.col(blk);
    out[blk] = inner * inner;
  }
  return out;
}

/// Noiseless echo tensor c(τ) ∘ d_Q(ν) ∘ β with β = α (g_L ⊙ d_L(ν)).
/// Its mode-1 unfolding reproduces the per-sample frequency-domain echo
/// of the repeated-profile link with unit symbols.
inline Tensor3 synthesize_echo(const SystemConfig& cfg, const TargetTruth& truth,
                               const IrsProfile& profile) {
  truth.validate(cfg.delta_f);
  if (profile.q != cfg.q)
    throw std::invalid_argument("synthesize_echo: profile repetition factor mismatch");
  const cvec c = delay_steering(truth.tau, cfg.n_c, cfg.delta_f);
  const cvec d_q = doppler_steering(truth.nu, cfg.q, cfg.t_sym);
  const cvec d_l = doppler_steering(truth.nu, cfg.l, cfg.q * cfg.t_sym);
  const cvec g = g_l_signature(truth.theta(), truth.phi(), profile, cfg);
  const cvec beta = truth.alpha * hadamard_vec(g, d_l);
  return outer3(c, d_q, beta);
}

struct NoisyEcho {
  Tensor3 tensor;
  double sigma2 = 0.0;  ///< per-entry complex noise variance
};

/// Adds circularly symmetric complex white Gaussian noise calibrated so the
/// ratio of signal Frobenius energy to expected noise energy equals the
/// requested SNR. An infinite snr_db returns the input unchanged.
inline NoisyEcho add_awgn(const Tensor3& t, double snr_db, std::uint64_t rng_seed) {
  NoisyEcho out{t, 0.0};
  if (std::isinf(snr_db) && snr_db > 0) return out;
  if (std::isnan(snr_db) || std::isinf(snr_db))
    throw std::invalid_argument("add_awgn: snr_db must be finite or +inf");
  const double energy = t.frobenius_norm() * t.frobenius_norm();
  if (energy == 0.0)
    throw degenerate_input_error("add_awgn: zero signal with finite SNR");
  out.sigma2 = energy / (std::pow(10.0, snr_db / 10.0) *
                         static_cast<double>(t.size()));
  std::mt19937_64 engine(rng_seed);
  std::normal_distribution<double> component(0.0, std::sqrt(out.sigma2 / 2.0));
  cvec& data = out.tensor.data();
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double re = component(engine);
    const double im = component(engine);
    data[i] += cplx(re, im);
  }
  return out;
}

}  // namespace irsense
