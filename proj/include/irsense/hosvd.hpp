// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "irsense/tensor.hpp"
#include "irsense/types.hpp"

namespace irsense {

namespace detail {

/// Rotate the vector so its largest-magnitude entry is real and nonnegative.
/// Ties on magnitude resolve to the lowest index.
inline void normalize_phase(cvec& u) {
  Eigen::Index pivot = 0;
  double best = std::abs(u[0]);
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    const double mag = std::abs(u[i]);
    if (mag > best) {
      best = mag;
      pivot = i;
    }
  }
  if (best > 0.0) u *= std::conj(u[pivot]) / best;
}

}  // namespace detail

struct SingularPair {
  cvec u;        ///< unit-norm dominant left singular vector
  double sigma;  ///< largest singular value
};

/// Dominant left singular vector and singular value of a complex matrix.
///
/// Power iteration on the Gram matrix of the smaller side, started from the
/// normalized maximum-norm column. Converges when successive Rayleigh
/// quotients agree to 1e-12 relative; after 500 iterations it falls back to
/// a full Hermitian eigendecomposition of the Gram matrix. The returned
/// vector is phase-normalized so its largest-magnitude entry is real and
/// nonnegative, which makes the result deterministic.
inline SingularPair dominant_left_singular(const cmat& m) {
  if (m.norm() == 0.0)
    throw degenerate_input_error("dominant_left_singular: all-zero matrix");

  const bool transposed = m.rows() > m.cols();
  const cmat a = transposed ? cmat(m.adjoint()) : m;
  const cmat gram = a * a.adjoint();  // small side x small side, Hermitian PSD

  // Start vector: max-norm column of a (lowest index on ties).
  Eigen::Index start = 0;
  double best = a.col(0).norm();
  for (Eigen::Index j = 1; j < a.cols(); ++j) {
    const double n = a.col(j).norm();
    if (n > best) {
      best = n;
      start = j;
    }
  }
  cvec x = a.col(start).normalized();

  constexpr int kMaxIterations = 500;
  constexpr double kRelTol = 1e-12;
  double rayleigh = 0.0;
  bool converged = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    cvec y = gram * x;
    const double next = std::real(x.dot(y));  // x^H (G x), real for Hermitian G
    x = y.normalized();
    if (it > 0 && std::abs(next - rayleigh) < kRelTol * std::abs(next)) {
      rayleigh = next;
      converged = true;
      break;
    }
    rayleigh = next;
  }
  if (!converged) {
    Eigen::SelfAdjointEigenSolver<cmat> es(gram);
    const Eigen::Index last = gram.rows() - 1;  // eigenvalues ascending
    x = es.eigenvectors().col(last);
    rayleigh = es.eigenvalues()[last];
  }

  SingularPair out;
  out.sigma = std::sqrt(std::max(rayleigh, 0.0));
  if (transposed) {
    // x approximates the dominant right singular vector of m.
    out.u = (m * x).normalized();
  } else {
    out.u = x;
  }
  detail::normalize_phase(out.u);
  return out;
}

/// Mode factors of the best rank-one multilinear approximation.
struct Rank1Factors {
  cvec u1, u2, u3;
  double sigma;  ///< dominant singular value of the mode-1 unfolding
};

/// Rank-one higher-order SVD: the dominant left singular vector of each of
/// the three mode unfoldings, each phase-normalized as in
/// dominant_left_singular.
inline Rank1Factors hosvd_rank1(const Tensor3& t) {
  if (t.frobenius_norm() == 0.0)
    throw degenerate_input_error("hosvd_rank1: zero tensor");
  Rank1Factors f;
  const SingularPair s1 = dominant_left_singular(unfold(t, 1));
  f.u1 = s1.u;
  f.sigma = s1.sigma;
  f.u2 = dominant_left_singular(unfold(t, 2)).u;
  f.u3 = dominant_left_singular(unfold(t, 3)).u;
  return f;
}

}  // namespace irsense
