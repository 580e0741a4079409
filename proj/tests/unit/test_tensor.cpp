// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "irsense/hosvd.hpp"
#include "irsense/tensor.hpp"
#include "test_helpers.hpp"

using namespace irsense;
using test_helpers::normalized_correlation;
using test_helpers::random_cmat;
using test_helpers::random_cvec;
using test_helpers::random_tensor;

TEST_CASE("unfold index maps on a hand-enumerated 2x2x2 tensor") {
  // t(i,j,k) = i + 2 (j-1) + 4 (k-1) with 1-based indices.
  Tensor3 t(2, 2, 2);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) t(i, j, k) = cplx(i + 1 + 2 * j + 4 * k, 0);

  const cmat m1 = unfold(t, 1);
  REQUIRE(m1.rows() == 2);
  REQUIRE(m1.cols() == 4);
  const double expected1[2][4] = {{1, 3, 5, 7}, {2, 4, 6, 8}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) REQUIRE(m1(r, c).real() == expected1[r][c]);

  // mode 2: out(j, k*n1 + i) = t(i,j,k)
  const cmat m2 = unfold(t, 2);
  const double expected2[2][4] = {{1, 2, 5, 6}, {3, 4, 7, 8}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) REQUIRE(m2(r, c).real() == expected2[r][c]);

  // mode 3: out(k, j*n1 + i) = t(i,j,k)
  const cmat m3 = unfold(t, 3);
  const double expected3[2][4] = {{1, 2, 3, 4}, {5, 6, 7, 8}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) REQUIRE(m3(r, c).real() == expected3[r][c]);
}

TEST_CASE("unfold rejects invalid modes") {
  Tensor3 t(2, 2, 2);
  REQUIRE_THROWS_AS(unfold(t, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(unfold(t, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(fold(cmat::Zero(2, 4), 5, 2, 2, 2), std::invalid_argument);
}

TEST_CASE("fold inverts unfold exactly for every mode") {
  std::mt19937_64 engine(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Tensor3 t = random_tensor(engine, 3, 5, 4);
    for (int mode = 1; mode <= 3; ++mode) {
      const Tensor3 back = fold(unfold(t, mode), mode, 3, 5, 4);
      REQUIRE((back.data() - t.data()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("unfoldings preserve the Frobenius norm") {
  std::mt19937_64 engine(12);
  for (int rep = 0; rep < 20; ++rep) {
    const Tensor3 t = random_tensor(engine, 4, 3, 6);
    for (int mode = 1; mode <= 3; ++mode)
      REQUIRE_THAT(unfold(t, mode).norm(),
                   Catch::Matchers::WithinRel(t.frobenius_norm(), 1e-12));
  }
}

TEST_CASE("rank-one unfolding identities") {
  std::mt19937_64 engine(13);
  const cvec a = random_cvec(engine, 4);
  const cvec b = random_cvec(engine, 3);
  const cvec c = random_cvec(engine, 5);
  const Tensor3 t = outer3(a, b, c);

  const cmat m1 = a * kron_vec(c, b).transpose();
  const cmat m2 = b * kron_vec(c, a).transpose();
  const cmat m3 = c * kron_vec(b, a).transpose();
  REQUIRE((unfold(t, 1) - m1).cwiseAbs().maxCoeff() <= 1e-14);
  REQUIRE((unfold(t, 2) - m2).cwiseAbs().maxCoeff() <= 1e-14);
  REQUIRE((unfold(t, 3) - m3).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("outer3 basics") {
  const cvec one = cvec::Ones(1);
  const Tensor3 unit = outer3(one, one, one);
  REQUIRE(unit.size() == 1);
  REQUIRE(unit(0, 0, 0) == cplx(1, 0));

  cvec e2(2);
  e2 << cplx(1, 0), cplx(0, 0);
  const Tensor3 spike = outer3(e2, one, one);
  REQUIRE(spike(0, 0, 0) == cplx(1, 0));
  REQUIRE(spike(1, 0, 0) == cplx(0, 0));

  std::mt19937_64 engine(14);
  const cvec a = random_cvec(engine, 6), b = random_cvec(engine, 2),
             c = random_cvec(engine, 7);
  REQUIRE_THAT(outer3(a, b, c).frobenius_norm(),
               Catch::Matchers::WithinRel(a.norm() * b.norm() * c.norm(), 1e-12));
}

TEST_CASE("kron_vec basics and the mixed-product identity") {
  REQUIRE(kron_vec(cvec::Ones(2), cvec::Ones(3)).isOnes());

  std::mt19937_64 engine(15);
  const cvec a = random_cvec(engine, 5);
  REQUIRE((kron_vec(a, cvec::Ones(1)) - a).cwiseAbs().maxCoeff() == 0.0);

  for (int rep = 0; rep < 50; ++rep) {
    const cvec x = random_cvec(engine, 4), y = random_cvec(engine, 4);
    const cvec u = random_cvec(engine, 3), v = random_cvec(engine, 3);
    const cvec lhs = hadamard_vec(kron_vec(x, u), kron_vec(y, v));
    const cvec rhs = kron_vec(hadamard_vec(x, y), hadamard_vec(u, v));
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("hadamard_vec basics") {
  std::mt19937_64 engine(16);
  const cvec a = random_cvec(engine, 8);
  REQUIRE((hadamard_vec(a, cvec::Ones(8)) - a).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE_THROWS_AS(hadamard_vec(a, cvec::Ones(7)), std::invalid_argument);
}

TEST_CASE("dominant_left_singular on a diagonal matrix") {
  cmat m = cmat::Zero(2, 2);
  m(0, 0) = cplx(3, 0);
  m(1, 1) = cplx(1, 0);
  const SingularPair s = dominant_left_singular(m);
  REQUIRE_THAT(s.sigma, Catch::Matchers::WithinRel(3.0, 1e-12));
  REQUIRE_THAT(std::abs(s.u[0]), Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE(s.u[0].real() > 0.0);  // phase normalization
  REQUIRE_THAT(std::abs(s.u[1]), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("dominant_left_singular on a rank-one matrix") {
  std::mt19937_64 engine(17);
  const cvec x = random_cvec(engine, 6);
  const cvec y = random_cvec(engine, 9);
  const cmat m = x * y.adjoint();
  const SingularPair s = dominant_left_singular(m);
  REQUIRE_THAT(s.sigma, Catch::Matchers::WithinRel(x.norm() * y.norm(), 1e-10));
  REQUIRE_THAT(normalized_correlation(s.u, x),
               Catch::Matchers::WithinAbs(1.0, 1e-10));
  REQUIRE_THAT(s.u.norm(), Catch::Matchers::WithinRel(1.0, 1e-12));
}

TEST_CASE("dominant singular value agrees with a full Gram eigensolve") {
  std::mt19937_64 engine(18);
  for (int rep = 0; rep < 10; ++rep) {
    const cmat m = random_cmat(engine, 16, 64);
    const SingularPair s = dominant_left_singular(m);
    // Independent oracle: full Hermitian eigendecomposition of m m^H.
    Eigen::SelfAdjointEigenSolver<cmat> es(cmat(m * m.adjoint()));
    const double sigma_ref = std::sqrt(es.eigenvalues().maxCoeff());
    REQUIRE_THAT(s.sigma, Catch::Matchers::WithinRel(sigma_ref, 1e-10));
    // The tall orientation exercises the transposed code path.
    const SingularPair st = dominant_left_singular(cmat(m.adjoint()));
    Eigen::SelfAdjointEigenSolver<cmat> es2(cmat(m.adjoint() * m));
    REQUIRE_THAT(st.sigma,
                 Catch::Matchers::WithinRel(std::sqrt(es2.eigenvalues().maxCoeff()),
                                            1e-10));
  }
}

TEST_CASE("dominant_left_singular rejects the zero matrix") {
  REQUIRE_THROWS_AS(dominant_left_singular(cmat::Zero(3, 4)),
                    degenerate_input_error);
}

TEST_CASE("hosvd_rank1 recovers exact rank-one factors") {
  std::mt19937_64 engine(19);
  for (int rep = 0; rep < 10; ++rep) {
    const cvec a = random_cvec(engine, 8);
    const cvec b = random_cvec(engine, 5);
    const cvec c = random_cvec(engine, 6);
    const Rank1Factors f = hosvd_rank1(outer3(a, b, c));
    REQUIRE(normalized_correlation(f.u1, a) >= 1.0 - 1e-9);
    REQUIRE(normalized_correlation(f.u2, b) >= 1.0 - 1e-9);
    REQUIRE(normalized_correlation(f.u3, c) >= 1.0 - 1e-9);
    REQUIRE_THAT(f.sigma,
                 Catch::Matchers::WithinRel(a.norm() * b.norm() * c.norm(), 1e-9));
  }
}

TEST_CASE("hosvd_rank1 factor fidelity under mild noise") {
  // Rank-one tensor plus noise at 40 dB: factor correlations stay >= 0.999.
  std::mt19937_64 engine(20);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const cvec a = random_cvec(engine, 16);
    const cvec b = random_cvec(engine, 8);
    const cvec c = random_cvec(engine, 8);
    Tensor3 t = outer3(a, b, c);
    const double sigma =
        t.frobenius_norm() /
        std::sqrt(std::pow(10.0, 40.0 / 10.0) * static_cast<double>(t.size()));
    for (Eigen::Index i = 0; i < t.size(); ++i)
      t.data()[i] += sigma / std::sqrt(2.0) * cplx(gauss(engine), gauss(engine));
    const Rank1Factors f = hosvd_rank1(t);
    REQUIRE(normalized_correlation(f.u1, a) >= 0.999);
    REQUIRE(normalized_correlation(f.u2, b) >= 0.999);
    REQUIRE(normalized_correlation(f.u3, c) >= 0.999);
  }
}

TEST_CASE("hosvd_rank1 trivial and degenerate cases") {
  Tensor3 t(1, 1, 1);
  t(0, 0, 0) = cplx(5, 0);
  const Rank1Factors f = hosvd_rank1(t);
  REQUIRE(f.u1[0] == cplx(1, 0));
  REQUIRE(f.u2[0] == cplx(1, 0));
  REQUIRE(f.u3[0] == cplx(1, 0));
  REQUIRE_THAT(f.sigma, Catch::Matchers::WithinRel(5.0, 1e-12));

  REQUIRE_THROWS_AS(hosvd_rank1(Tensor3(2, 3, 4)), degenerate_input_error);
}

TEST_CASE("hosvd_rank1 is equivariant under complex scaling") {
  std::mt19937_64 engine(21);
  const Tensor3 t = outer3(random_cvec(engine, 6), random_cvec(engine, 4),
                           random_cvec(engine, 5));
  const Rank1Factors ref = hosvd_rank1(t);
  for (double phase : {0.3, 1.9, 4.4}) {
    const cplx gamma = std::polar(2.7, phase);
    const Rank1Factors scaled = hosvd_rank1(t * gamma);
    REQUIRE((scaled.u1 - ref.u1).cwiseAbs().maxCoeff() <= 1e-9);
    REQUIRE((scaled.u2 - ref.u2).cwiseAbs().maxCoeff() <= 1e-9);
    REQUIRE((scaled.u3 - ref.u3).cwiseAbs().maxCoeff() <= 1e-9);
  }
}
