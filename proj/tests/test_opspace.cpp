#include "lbt/opspace.hpp"
#include "lbt/lindblad.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace lbt;
using namespace lbt::testing;

TEST_CASE("vectorize/devectorize round trip and column stacking") {
  Rng rng(101);
  const Mat A = random_matrix(4, 4, rng);
  CHECK(max_abs_diff(devectorize(vectorize(A)), A) == doctest::Approx(0.0));
  // column stacking: entry (i,j) lands at flat index j*N + i
  const Vec v = vectorize(A);
  CHECK(v[2 * 4 + 3] == A(3, 2));
}

TEST_CASE("sandwich superoperator realizes A -> L A R") {
  Rng rng(102);
  for (int rep = 0; rep < 20; ++rep) {
    const int N = 2 + rep % 4;
    const Mat L = random_matrix(N, N, rng), R = random_matrix(N, N, rng),
              A = random_matrix(N, N, rng);
    const Mat via = devectorize(Vec(sandwich_superop(L, R) * vectorize(A)));
    CHECK(max_abs_diff(via, L * A * R) < 1e-12 * (L * A * R).norm() + 1e-13);
  }
}

TEST_CASE("hs inner product equals trace form and vector dot") {
  Rng rng(103);
  const Mat A = random_matrix(5, 5, rng), B = random_matrix(5, 5, rng);
  const Complex direct = (A.adjoint() * B).trace();
  CHECK(std::abs(hs_inner(A, B) - direct) < 1e-12);
  CHECK(std::abs(vectorize(A).dot(vectorize(B)) - direct) < 1e-12);
  CHECK(hs_norm(A) == doctest::Approx(std::sqrt(hs_inner(A, A).real())));
}

TEST_CASE("commutator superoperator acts as -i[H, .]") {
  Rng rng(104);
  const Mat H = random_hermitian(4, rng), A = random_matrix(4, 4, rng);
  const Mat via = superop_apply(commutator_superop(H), A);
  const Mat direct = Complex(0, -1) * (H * A - A * H);
  CHECK(max_abs_diff(via, direct) < 1e-12);
}

TEST_CASE("superop adjoint moves across the inner product") {
  Rng rng(105);
  const SuperMat S = random_matrix(9, 9, rng);
  const Mat A = random_matrix(3, 3, rng), B = random_matrix(3, 3, rng);
  const Complex lhs = hs_inner(A, superop_apply(S, B));
  const Complex rhs = hs_inner(superop_apply(superop_adjoint(S), A), B);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("hermitian basis: orthonormal, Hermitian, identity first") {
  for (int N : {2, 3, 5}) {
    const HermitianBasis basis = hermitian_basis(N);
    REQUIRE(int(basis.elements.size()) == N * N);
    CHECK(max_abs_diff(basis.elements[0],
                       Mat::Identity(N, N) / std::sqrt(double(N))) < 1e-14);
    for (size_t k = 0; k < basis.elements.size(); ++k) {
      CHECK(max_abs_diff(basis.elements[k], basis.elements[k].adjoint()) < 1e-14);
      if (k > 0) CHECK(std::abs(basis.elements[k].trace()) < 1e-13);
      for (size_t l = 0; l < basis.elements.size(); ++l) {
        const Complex g = hs_inner(basis.elements[k], basis.elements[l]);
        CHECK(std::abs(g - (k == l ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("Hermiticity-preserving maps are real in a Hermitian basis") {
  Rng rng(106);
  const LindbladModel m = random_unique_model(3, rng);
  const HermitianBasis basis = hermitian_basis(3);
  const BasisMatrix bm = superop_in_hermitian_basis(build_generator(m), basis);
  CHECK(bm.real);
  CHECK(bm.max_imag < 1e-10);
}

TEST_CASE("commutator generators are exactly the antisymmetric ones") {
  Rng rng(107);
  const HermitianBasis basis = hermitian_basis(3);
  const Mat H = random_hermitian(3, rng);
  CHECK(is_unitary_generator(commutator_superop(H), basis));

  LindbladModel m;
  m.jumps.push_back({random_matrix(3, 3, rng), 1.0});
  CHECK_FALSE(is_unitary_generator(build_generator(m), basis));

  // non-Hermiticity-preserving map must throw
  const SuperMat bad = random_matrix(9, 9, rng);
  CHECK_THROWS(is_unitary_generator(bad, basis));
}

TEST_CASE("is_antisymmetric") {
  Eigen::MatrixXd M(2, 2);
  M << 0, 1, -1, 0;
  CHECK(is_antisymmetric(M));
  M(0, 0) = 1e-3;
  CHECK_FALSE(is_antisymmetric(M));
}
