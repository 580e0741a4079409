// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace irsense {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Thrown when an input is valid in type but meaningless in value for the
/// requested operation (all-zero matrix/tensor, zero signal with finite SNR).
class degenerate_input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration value violating an invariant. Carries the offending key so
/// front ends can point at the exact field.
class config_error : public std::runtime_error {
 public:
  config_error(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Azimuth/elevation pair in radians.
struct AnglePair {
  double az = 0.0;
  double el = 0.0;
};

}  // namespace irsense
