#include "lbt/corners.hpp"
#include "lbt/models.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace lbt;
using namespace lbt::testing;

namespace {

CornerProjectors spectral_corners(const SuperMat& L) {
  const Spectrum spec = spectrum(L);
  return nondecaying_projector(L, spec, spec.default_zero_tol());
}

}  // namespace

TEST_CASE("four-level model: nondecaying projector is the DFS block") {
  const LindbladModel m = four_level(1.0);
  const SuperMat L = build_generator(m);
  const CornerProjectors cp = spectral_corners(L);
  REQUIRE(cp.rank == 2);
  Mat expected = Mat::Zero(4, 4);
  expected(0, 0) = expected(1, 1) = 1.0;
  CHECK(max_abs_diff(cp.P, expected) < 1e-9);
}

TEST_CASE("corner projections partition every operator (partition of identity)") {
  Rng rng(301);
  for (int rep = 0; rep < 10; ++rep) {
    const DfsModel dm = random_dfs_model(5, 2, 2, rng);
    const CornerProjectors cp = spectral_corners(build_generator(dm.model));
    const SuperMat sum = cp.super_proj(Corner::UL) + cp.super_proj(Corner::UR) +
                         cp.super_proj(Corner::LL) + cp.super_proj(Corner::LR);
    CHECK((sum - SuperMat::Identity(25, 25)).cwiseAbs().maxCoeff() < 1e-12);
    // corners are orthogonal projections at the operator level
    const Mat A = random_matrix(5, 5, rng);
    const Mat back = cp.project(A, Corner::UL) + cp.project(A, Corner::UR) +
                     cp.project(A, Corner::LL) + cp.project(A, Corner::LR);
    CHECK(max_abs_diff(back, A) < 1e-12);
  }
}

TEST_CASE("corner bases are orthonormal and span their blocks") {
  Rng rng(302);
  const DfsModel dm = random_dfs_model(4, 2, 1, rng);
  const CornerProjectors cp = spectral_corners(build_generator(dm.model));
  for (Corner c : {Corner::UL, Corner::UR, Corner::LL, Corner::LR}) {
    const Eigen::MatrixXcd B = cp.corner_basis(c);
    CHECK((B.adjoint() * B - Eigen::MatrixXcd::Identity(B.cols(), B.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    // projector reproduced by the basis
    CHECK((B * B.adjoint() - cp.super_proj(c)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("jump confinement and Hamiltonian corner structure hold") {
  Rng rng(303);
  for (int rep = 0; rep < 10; ++rep) {
    const DfsModel dm = random_dfs_model(5, 2, 2, rng);
    const CornerProjectors cp = spectral_corners(build_generator(dm.model));
    const Prop1Report rep1 = validate_proposition1(dm.model, cp);
    CHECK(rep1.ok(1e-9));
    for (double r : rep1.jump_residuals) CHECK(r < 1e-9);
    CHECK(rep1.hamiltonian_residual < 1e-9);
  }
}

TEST_CASE("generator is block upper triangular over (UL, coherences, LR)") {
  Rng rng(304);
  for (int rep = 0; rep < 5; ++rep) {
    const DfsModel dm = random_dfs_model(5, 2, 2, rng);
    const SuperMat L = build_generator(dm.model);
    const CornerProjectors cp = spectral_corners(L);
    const BlockDecomposition dec = decompose_generator(L, cp, dm.model, true);
    CHECK(dec.triangularity_residual < 1e-9 * std::max(1.0, L.norm()));
    CHECK(dec.crosscheck_residual < 1e-8 * std::max(1.0, L.norm()));
  }
}

TEST_CASE("closed-form block action matches the superoperator route") {
  Rng rng(305);
  const DfsModel dm = random_dfs_model(4, 2, 2, rng);
  const SuperMat L = build_generator(dm.model);
  const CornerProjectors cp = spectral_corners(L);
  const Mat A = random_matrix(4, 4, rng);
  for (Corner x : {Corner::UL, Corner::UR, Corner::LL, Corner::LR})
    for (Corner y : {Corner::UL, Corner::UR, Corner::LL, Corner::LR}) {
      const Mat Ay = cp.project(A, y);
      const Mat direct = block_action(dm.model, cp, Ay, x, y);
      const Mat via = cp.project(superop_apply(L, Ay), x);
      CHECK(max_abs_diff(direct, via) < 1e-9 * std::max(1.0, L.norm()));
    }
}

TEST_CASE("jump-annihilated fast path agrees with the spectral projector") {
  Rng rng(306);
  const DfsModel dm = random_dfs_model(6, 2, 2, rng);
  const MaybeCorners mc = jump_annihilated_corners(dm.model);
  REQUIRE(mc.ok);
  const CornerProjectors cp = spectral_corners(build_generator(dm.model));
  CHECK(max_abs_diff(mc.cp.P, cp.P) < 1e-8);
  CHECK(mc.cp.rank == cp.rank);
  // planted subspace recovered
  CHECK(max_abs_diff(mc.cp.P, dm.Up * dm.Up.adjoint()) < 1e-8);
}

TEST_CASE("fast path declines models with a Hamiltonian or leaky jumps") {
  Rng rng(307);
  DfsModel dm = random_dfs_model(4, 2, 1, rng);
  dm.model.hamiltonian = random_hermitian(4, rng);
  CHECK_FALSE(jump_annihilated_corners(dm.model).ok);
  CHECK_FALSE(jump_annihilated_corners(random_unique_model(3, rng)).ok);
}

TEST_CASE("coherence compression reproduces the coherence-block spectrum") {
  const LindbladModel m = two_photon(1.2, 16);
  const SuperMat L = build_generator(m);
  const CornerProjectors cp = spectral_corners(L);
  const BlockDecomposition dec = decompose_generator(L, cp, m, false);
  const Eigen::VectorXcd a = eigenvalues_only(dec.L_coh);
  const Eigen::VectorXcd b = eigenvalues_only(coherence_compression(m, cp));
  REQUIRE(a.size() == b.size());
  Eigen::VectorXcd as = a, bs = b;
  auto key = [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(as.data(), as.data() + as.size(), key);
  std::sort(bs.data(), bs.data() + bs.size(), key);
  CHECK((as - bs).cwiseAbs().maxCoeff() < 1e-7 * std::max(1.0, L.norm()));
}

TEST_CASE("effective gap: coherence gap dominates the full gap (two-photon)") {
  for (double alpha : {0.8, 2.0}) {
    const LindbladModel m = two_photon(alpha, 24);
    const SuperMat L = build_generator(m);
    const Spectrum spec = spectrum(L);
    const double zt = spec.default_zero_tol();
    const CornerProjectors cp = nondecaying_projector(L, spec, zt);
    const BlockDecomposition dec = decompose_generator(L, cp, m, false);
    const EffectiveGapReport g = effective_dissipative_gap(dec, zt);
    const double dg = dissipative_gap(spec, zt);
    CHECK(g.coherence_min_re >= dg - 1e-9);
    // parent-Hamiltonian excitation gap matches the coherence gap
    const ParentHamiltonian ph = parent_hamiltonian(m, zt);
    CHECK(ph.jump_annihilation_holds);
    CHECK(std::abs(ph.excitation_gap - g.coherence_min_re) <
          0.02 * g.coherence_min_re);
  }
}

TEST_CASE("parent Hamiltonian assembles (1/2) sum kappa F^dag F") {
  Rng rng(308);
  LindbladModel m;
  const Mat F1 = random_matrix(4, 4, rng), F2 = random_matrix(4, 4, rng);
  m.jumps.push_back({F1, 0.7});
  m.jumps.push_back({F2, 1.9});
  const ParentHamiltonian ph = parent_hamiltonian(m);
  const Mat direct = 0.5 * (0.7 * F1.adjoint() * F1 + 1.9 * F2.adjoint() * F2);
  CHECK(max_abs_diff(ph.H_edg, direct) < 1e-12);
  CHECK_FALSE(ph.jump_annihilation_holds);  // generic jumps leave no kernel
}
