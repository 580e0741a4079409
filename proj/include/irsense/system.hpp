// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "irsense/types.hpp"

namespace irsense {

/// Physical and waveform constants of the IRS-assisted OFDM link.
///
/// wavelength and t_sym are derived quantities (c/carrier_freq and
/// 1/delta_f); validate() enforces consistency to 1e-9 relative so that
/// configs loaded from files cannot silently disagree.
struct SystemConfig {
  int n_x = 4;  ///< IRS elements along x
  int n_y = 4;  ///< IRS elements along y
  double d_x = 0.0;  ///< element spacing x [m]
  double d_y = 0.0;  ///< element spacing y [m]
  double carrier_freq = 28e9;     ///< [Hz]
  double wavelength = 0.0;        ///< [m], = c / carrier_freq
  double delta_f = 120e3;         ///< subcarrier spacing [Hz]
  double t_sym = 0.0;             ///< symbol duration [s], = 1 / delta_f
  int n_c = 16;                   ///< subcarriers
  int q = 8;                      ///< symbols per IRS block
  int l = 8;                      ///< IRS blocks (M = q*l symbols)
  double p_t = 1.0;               ///< transmit power [W]
  double g1 = 1.0;                ///< transmit antenna gain (linear)
  double g2 = 1.0;                ///< receive antenna gain (linear)
  double d1 = 10.0;               ///< BS-IRS distance [m]
  double d2 = 5.0;                ///< IRS-target distance [m]
  double sigma_rcs = 2.0;         ///< target radar cross section [m^2]
  double radiation_exponent = 0.0;  ///< element pattern F^2(x) = cos(x)^e

  int n() const noexcept { return n_x * n_y; }
  int m() const noexcept { return q * l; }

  /// Fill wavelength, t_sym and half-wavelength spacings when left at zero.
  void derive() {
    if (wavelength == 0.0) wavelength = kSpeedOfLight / carrier_freq;
    if (t_sym == 0.0) t_sym = 1.0 / delta_f;
    if (d_x == 0.0) d_x = wavelength / 2.0;
    if (d_y == 0.0) d_y = wavelength / 2.0;
  }

  void validate() const {
    auto positive = [](const char* key, double v) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw config_error(key, "must be positive and finite");
    };
    if (n_x < 1) throw config_error("n_x", "must be >= 1");
    if (n_y < 1) throw config_error("n_y", "must be >= 1");
    if (n_c < 1) throw config_error("n_c", "must be >= 1");
    if (q < 1) throw config_error("q", "must be >= 1");
    if (l < 1) throw config_error("l", "must be >= 1");
    positive("d_x", d_x);
    positive("d_y", d_y);
    positive("carrier_freq", carrier_freq);
    positive("wavelength", wavelength);
    positive("delta_f", delta_f);
    positive("t_sym", t_sym);
    positive("p_t", p_t);
    positive("g1", g1);
    positive("g2", g2);
    positive("d1", d1);
    positive("d2", d2);
    positive("sigma_rcs", sigma_rcs);
    if (radiation_exponent < 0.0)
      throw config_error("radiation_exponent", "must be nonnegative");
    const double lambda_ref = kSpeedOfLight / carrier_freq;
    if (std::abs(wavelength - lambda_ref) > 1e-9 * lambda_ref)
      throw config_error("wavelength", "inconsistent with carrier_freq");
    const double t_ref = 1.0 / delta_f;
    if (std::abs(t_sym - t_ref) > 1e-9 * t_ref)
      throw config_error("t_sym", "inconsistent with delta_f");
  }
};

/// 28 GHz / 120 kHz mmWave setup with a 4x4 half-wavelength IRS, 16
/// subcarriers and 64 OFDM symbols (q=8 blocks of 8 by default).
inline SystemConfig default_system_config() {
  SystemConfig cfg;
  cfg.derive();
  cfg.validate();
  return cfg;
}

/// Ground-truth target parameters plus the known BS-IRS arrival angles.
struct TargetTruth {
  double tau = 0.0;       ///< delay [s]
  double nu = 0.0;        ///< Doppler [Hz]
  double theta_az = 0.0;  ///< IRS->target departure azimuth [rad]
  double theta_el = 0.0;  ///< IRS->target departure elevation [rad]
  double phi_az = 0.0;    ///< BS->IRS arrival azimuth [rad], known at receiver
  double phi_el = 0.0;    ///< BS->IRS arrival elevation [rad], known at receiver
  cplx alpha{1.0, 0.0};   ///< complex path gain

  AnglePair theta() const noexcept { return {theta_az, theta_el}; }
  AnglePair phi() const noexcept { return {phi_az, phi_el}; }

  void validate(double delta_f) const {
    auto in_quadrant = [](const char* key, double v) {
      if (!(v >= 0.0 && v <= kPi / 2.0))
        throw config_error(key, "must lie in [0, pi/2]");
    };
    in_quadrant("theta_az", theta_az);
    in_quadrant("theta_el", theta_el);
    in_quadrant("phi_az", phi_az);
    in_quadrant("phi_el", phi_el);
    if (!(tau >= 0.0 && tau < 1.0 / delta_f))
      throw config_error("tau", "must lie in [0, 1/delta_f)");
    if (!(std::abs(alpha) > 0.0)) throw config_error("alpha", "must be nonzero");
  }
};

}  // namespace irsense
