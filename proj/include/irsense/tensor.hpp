// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "irsense/types.hpp"

namespace irsense {

/// Dense complex third-order tensor with a fixed unfolding convention.
///
/// Entries are stored flat with the first index fastest, so the flat offset
/// of (i, j, k) is i + n1*(j + n2*k). The three mode unfoldings are
///
///   mode 1: out(i, k*n2 + j) = t(i, j, k)   [n1 x n2*n3]
///   mode 2: out(j, k*n1 + i) = t(i, j, k)   [n2 x n1*n3]
///   mode 3: out(k, j*n1 + i) = t(i, j, k)   [n3 x n1*n2]
///
/// so that for a rank-one tensor a∘b∘c the unfoldings are exactly
/// a(c⊗b)^T, b(c⊗a)^T and c(b⊗a)^T.
class Tensor3 {
 public:
  Tensor3() = default;

  Tensor3(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3)
      : n1_(n1), n2_(n2), n3_(n3), data_(cvec::Zero(n1 * n2 * n3)) {
    if (n1 < 1 || n2 < 1 || n3 < 1)
      throw std::invalid_argument("Tensor3: dimensions must be positive");
  }

  Eigen::Index n1() const noexcept { return n1_; }
  Eigen::Index n2() const noexcept { return n2_; }
  Eigen::Index n3() const noexcept { return n3_; }
  Eigen::Index size() const noexcept { return data_.size(); }

  cplx& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return data_[i + n1_ * (j + n2_ * k)];
  }
  cplx operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return data_[i + n1_ * (j + n2_ * k)];
  }

  /// Flat storage, first index fastest.
  const cvec& data() const noexcept { return data_; }
  cvec& data() noexcept { return data_; }

  double frobenius_norm() const { return data_.norm(); }

  Tensor3 operator*(cplx scale) const {
    Tensor3 out = *this;
    out.data_ *= scale;
    return out;
  }

  Tensor3 operator+(const Tensor3& other) const {
    if (n1_ != other.n1_ || n2_ != other.n2_ || n3_ != other.n3_)
      throw std::invalid_argument("Tensor3: dimension mismatch in addition");
    Tensor3 out = *this;
    out.data_ += other.data_;
    return out;
  }

 private:
  Eigen::Index n1_ = 0, n2_ = 0, n3_ = 0;
  cvec data_;
};

/// Mode-n unfolding with the index maps documented on Tensor3.
inline cmat unfold(const Tensor3& t, int mode) {
  const Eigen::Index n1 = t.n1(), n2 = t.n2(), n3 = t.n3();
  switch (mode) {
    case 1: {
      // Flat storage already is the mode-1 layout.
      return Eigen::Map<const cmat>(t.data().data(), n1, n2 * n3);
    }
    case 2: {
      cmat out(n2, n1 * n3);
      for (Eigen::Index k = 0; k < n3; ++k)
        for (Eigen::Index j = 0; j < n2; ++j)
          for (Eigen::Index i = 0; i < n1; ++i) out(j, k * n1 + i) = t(i, j, k);
      return out;
    }
    case 3: {
      return Eigen::Map<const cmat>(t.data().data(), n1 * n2, n3).transpose();
    }
    default:
      throw std::invalid_argument("unfold: mode must be 1, 2 or 3");
  }
}

/// Inverse of unfold: rebuilds the tensor from its mode-n unfolding.
inline Tensor3 fold(const cmat& m, int mode, Eigen::Index n1, Eigen::Index n2,
                    Eigen::Index n3) {
  Tensor3 t(n1, n2, n3);
  switch (mode) {
    case 1:
      if (m.rows() != n1 || m.cols() != n2 * n3)
        throw std::invalid_argument("fold: shape mismatch for mode 1");
      for (Eigen::Index k = 0; k < n3; ++k)
        for (Eigen::Index j = 0; j < n2; ++j)
          for (Eigen::Index i = 0; i < n1; ++i) t(i, j, k) = m(i, k * n2 + j);
      return t;
    case 2:
      if (m.rows() != n2 || m.cols() != n1 * n3)
        throw std::invalid_argument("fold: shape mismatch for mode 2");
      for (Eigen::Index k = 0; k < n3; ++k)
        for (Eigen::Index j = 0; j < n2; ++j)
          for (Eigen::Index i = 0; i < n1; ++i) t(i, j, k) = m(j, k * n1 + i);
      return t;
    case 3:
      if (m.rows() != n3 || m.cols() != n1 * n2)
        throw std::invalid_argument("fold: shape mismatch for mode 3");
      for (Eigen::Index k = 0; k < n3; ++k)
        for (Eigen::Index j = 0; j < n2; ++j)
          for (Eigen::Index i = 0; i < n1; ++i) t(i, j, k) = m(k, j * n1 + i);
      return t;
    default:
      throw std::invalid_argument("fold: mode must be 1, 2 or 3");
  }
}

/// Rank-one tensor a∘b∘c with entries out(i,j,k) = a[i]*b[j]*c[k].
inline Tensor3 outer3(const cvec& a, const cvec& b, const cvec& c) {
  Tensor3 t(a.size(), b.size(), c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k)
    for (Eigen::Index j = 0; j < b.size(); ++j)
      for (Eigen::Index i = 0; i < a.size(); ++i) t(i, j, k) = a[i] * b[j] * c[k];
  return t;
}

/// Kronecker product of vectors: out[i*len(b) + j] = a[i]*b[j].
inline cvec kron_vec(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

/// Element-wise (Hadamard) product; lengths must match.
inline cvec hadamard_vec(const cvec& a, const cvec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("hadamard_vec: length mismatch");
  return a.cwiseProduct(b);
}

}  // namespace irsense
