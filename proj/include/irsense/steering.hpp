// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "irsense/tensor.hpp"
#include "irsense/types.hpp"

namespace irsense {

/// Uniform rectangular array steering vector, length n_x*n_y.
///
/// Kronecker product h ⊗ v of a horizontal factor with per-element phase
/// 2π(d_x/λ)(m-1)·sin(el)cos(az) and a vertical factor with phase
/// 2π(d_y/λ)(n-1)·cos(el). Every entry has unit modulus and the first
/// entry is always 1.
inline cvec ura_steering(double az, double el, int n_x, int n_y, double d_x,
                         double d_y, double wavelength) {
  if (n_x < 1 || n_y < 1)
    throw std::invalid_argument("ura_steering: array dimensions must be >= 1");
  const double step_h = 2.0 * kPi * (d_x / wavelength) * std::sin(el) * std::cos(az);
  const double step_v = 2.0 * kPi * (d_y / wavelength) * std::cos(el);
  cvec h(n_x), v(n_y);
  for (int m = 0; m < n_x; ++m) h[m] = std::polar(1.0, step_h * m);
  for (int n = 0; n < n_y; ++n) v[n] = std::polar(1.0, step_v * n);
  return kron_vec(h, v);
}

/// Frequency-domain delay signature across subcarriers:
/// out[n] = exp(-j 2π (n-1) Δf τ).
inline cvec delay_steering(double tau, int n_c, double delta_f) {
  if (n_c < 1) throw std::invalid_argument("delay_steering: n_c must be >= 1");
  cvec out(n_c);
  for (int n = 0; n < n_c; ++n)
    out[n] = std::polar(1.0, -2.0 * kPi * n * delta_f * tau);
  return out;
}

/// Time-domain Doppler signature: out[k] = exp(j 2π ν (k-1) step).
///
/// With step = T_s and length Q this is the within-block vector d_Q; with
/// step = Q·T_s and length L it is the across-block vector d_L, and
/// d = d_L ⊗ d_Q holds exactly.
inline cvec doppler_steering(double nu, int length, double step) {
  if (length < 1)
    throw std::invalid_argument("doppler_steering: length must be >= 1");
  if (!(step > 0.0))
    throw std::invalid_argument("doppler_steering: step must be positive");
  cvec out(length);
  for (int k = 0; k < length; ++k)
    out[k] = std::polar(1.0, 2.0 * kPi * nu * k * step);
  return out;
}

}  // namespace irsense
