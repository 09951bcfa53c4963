#include "lbt/asymptotics.hpp"
#include "lbt/models.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace lbt;
using namespace lbt::testing;

namespace {

struct Pipeline {
  SuperMat L;
  Spectrum spec;
  double zt = 0.0;
  CornerProjectors cp;
  AsymptoticSpace s;
};

Pipeline run_pipeline(const LindbladModel& m) {
  Pipeline p;
  p.L = build_generator(m);
  p.spec = spectrum(p.L);
  p.zt = p.spec.default_zero_tol();
  p.cp = nondecaying_projector(p.L, p.spec, p.zt);
  p.s = asymptotic_space(p.L, p.spec, p.cp, p.zt);
  return p;
}

}  // namespace

TEST_CASE("four-level model: conserved coherence weight 1/(1+2a^2)") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const Pipeline p = run_pipeline(four_level(alpha));
    REQUIRE(p.s.size() == 4);
    CHECK(p.s.steady());
    const double w = 1.0 / (1.0 + 2.0 * alpha * alpha);
    // the asymptotic projection transfers |e2><e3| coherence with weight w
    Mat r = Mat::Zero(4, 4);
    r(2, 3) = 1.0;
    const Mat out = p.s.apply_pinf(r);
    CHECK(std::abs(out(0, 1) - w) < 1e-8);
    // populations transfer with weight 1
    Mat r2 = Mat::Zero(4, 4);
    r2(2, 2) = 1.0;
    CHECK(std::abs(p.s.apply_pinf(r2)(0, 0) - 1.0) < 1e-8);
  }
}

TEST_CASE("rotating four-level model: complex tail denominators 1 +/- i beta") {
  for (double beta : {0.5, 1.0}) {
    const Pipeline p = run_pipeline(four_level(0.0, beta));
    REQUIRE(p.s.size() == 4);
    CHECK_FALSE(p.s.steady());
    bool found_plus = false, found_minus = false;
    for (int mu = 0; mu < 4; ++mu) {
      if (std::abs(p.s.frequencies[size_t(mu)]) < 1e-9) continue;
      Mat Jul = p.s.J_ul(mu);
      // normalize so the single UL entry is 1
      int bi = 0, bj = 0;
      double best = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (std::abs(Jul(i, j)) > best) {
            best = std::abs(Jul(i, j));
            bi = i;
            bj = j;
          }
      const Mat J = p.s.J[size_t(mu)] / Jul(bi, bj);
      if (bi == 0 && bj == 1) {
        // tail on |e2><e3| with denominator 1 + i beta
        CHECK(std::abs(J(2, 3) - 1.0 / Complex(1.0, beta)) < 1e-8);
        found_plus = true;
      } else if (bi == 1 && bj == 0) {
        CHECK(std::abs(J(3, 2) - 1.0 / Complex(1.0, -beta)) < 1e-8);
        found_minus = true;
      }
    }
    CHECK(found_plus);
    CHECK(found_minus);
  }
}

TEST_CASE("biorthogonality of eigenmatrices and conserved quantities") {
  Rng rng(401);
  for (int rep = 0; rep < 8; ++rep) {
    const Pipeline p = run_pipeline(random_dfs_model(5, 2, 2, rng).model);
    for (int mu = 0; mu < p.s.size(); ++mu)
      for (int nu = 0; nu < p.s.size(); ++nu) {
        const Complex g = hs_inner(p.s.J[size_t(mu)], p.s.Psi[size_t(nu)]);
        CHECK(std::abs(g - (mu == nu ? 1.0 : 0.0)) < 1e-9);
      }
  }
}

TEST_CASE("conserved quantities are left fixed points") {
  Rng rng(402);
  const Pipeline p = run_pipeline(random_dfs_model(5, 2, 1, rng).model);
  for (int mu = 0; mu < p.s.size(); ++mu) {
    const Vec lhs = p.L.adjoint() * vectorize(p.s.J[size_t(mu)]);
    const Vec rhs = Complex(0, -p.s.frequencies[size_t(mu)]) * vectorize(p.s.J[size_t(mu)]);
    CHECK((lhs - rhs).norm() < 1e-7 * std::max(1.0, p.L.norm()));
  }
}

TEST_CASE("asymptotic projection is idempotent and matches its dense form") {
  Rng rng(403);
  const Pipeline p = run_pipeline(random_dfs_model(4, 2, 2, rng).model);
  const SuperMat Pinf = p.s.Pinf();
  CHECK((Pinf * Pinf - Pinf).norm() < 1e-8);
  const Mat A = random_matrix(4, 4, rng);
  CHECK(max_abs_diff(p.s.apply_pinf(A), superop_apply(Pinf, A)) < 1e-10);
  const SuperMat Pp = p.s.Ppsi();
  CHECK((Pp * Pp - Pp).norm() < 1e-8);
  CHECK(max_abs_diff(p.s.apply_ppsi(A), superop_apply(Pp, A)) < 1e-10);
  // P_psi = P_inf restricted to the UL corner
  CHECK((Pp - Pinf * p.cp.super_proj(Corner::UL)).norm() < 1e-8);
}

TEST_CASE("DFS fast path agrees with the spectral asymptotic space") {
  Rng rng(404);
  const DfsModel dm = random_dfs_model(5, 2, 2, rng);
  const Pipeline p = run_pipeline(dm.model);
  const MaybeCorners mc = jump_annihilated_corners(dm.model);
  REQUIRE(mc.ok);
  const AsymptoticSpace fast = dfs_asymptotic_space(mc.cp);
  CHECK(fast.size() == p.s.size());
  const Mat A = random_matrix(5, 5, rng);
  CHECK(max_abs_diff(fast.apply_ppsi(A), p.s.apply_ppsi(A)) < 1e-8);
}

TEST_CASE("conserved quantities from the corner route match the spectral ones") {
  Rng rng(405);
  const DfsModel dm = random_dfs_model(5, 2, 2, rng);
  const Pipeline p = run_pipeline(dm.model);
  const BlockDecomposition dec = decompose_generator(p.L, p.cp, dm.model, false);
  std::vector<Mat> J_ul;
  std::vector<Complex> lambdas;
  for (int mu = 0; mu < p.s.size(); ++mu) {
    J_ul.push_back(p.s.J_ul(mu));
    lambdas.push_back(Complex(0, p.s.frequencies[size_t(mu)]));
  }
  const std::vector<Mat> J2 = conserved_from_prop2(p.L, dec, J_ul, lambdas);
  for (int mu = 0; mu < p.s.size(); ++mu)
    CHECK(max_abs_diff(J2[size_t(mu)], p.s.J[size_t(mu)]) < 1e-7);
}

TEST_CASE("infinite-time map equals long-time propagation") {
  Rng rng(406);
  for (const LindbladModel& m :
       {four_level(1.0), thermal_qubit(1.0, 0.3), random_dfs_model(4, 2, 2, rng).model}) {
    const Pipeline p = run_pipeline(m);
    const Mat rho0 = random_density(m.dim(), rng);
    const double T = 60.0;
    const Mat direct = propagate(p.L, rho0, T);
    const Mat via = asymptotic_state(p.s, rho0, T);
    CHECK(max_abs_diff(direct, via) < 1e-7);
  }
}

TEST_CASE("Drazin inverse identities") {
  Rng rng(407);
  for (int rep = 0; rep < 5; ++rep) {
    const LindbladModel m = rep % 2 ? random_unique_model(3, rng)
                                    : random_dfs_model(4, 2, 2, rng).model;
    const Pipeline p = run_pipeline(m);
    if (!p.s.steady()) continue;
    const SuperMat D = drazin_inverse(p.L, p.s);
    const SuperMat Q = p.s.Qinf();
    CHECK((p.L * D - Q).norm() < 1e-8 * std::max(1.0, p.L.norm()));
    CHECK((D * p.L - Q).norm() < 1e-8 * std::max(1.0, p.L.norm()));
    CHECK((D * p.s.Pinf()).norm() < 1e-8);
    CHECK((p.s.Pinf() * D).norm() < 1e-8);
  }
}

TEST_CASE("channel embedding: extract(embed) is the identity on channels") {
  Rng rng(408);
  for (int rep = 0; rep < 5; ++rep) {
    const int d_in = 2 + rep % 2, d_out = 2 + (rep / 2) % 2;
    const std::vector<Mat> kraus = random_channel(d_in, d_out, 2, rng);
    const LindbladModel m = embed_channel(kraus, 1.0);
    const Eigen::MatrixXcd C = extract_channel(m, d_in, d_out);
    for (int i = 0; i < d_in; ++i)
      for (int j = 0; j < d_in; ++j) {
        Mat rho = Mat::Zero(d_in, d_in);
        rho(i, j) = 1.0;
        const Mat direct = apply_kraus(kraus, rho);
        const Mat via = devectorize(Vec(C * vectorize(rho)));
        CHECK(max_abs_diff(direct, via) < 1e-9);
      }
  }
}

TEST_CASE("channel embedding rejects non-trace-preserving Kraus sets") {
  Rng rng(409);
  std::vector<Mat> bad = {random_matrix(2, 2, rng)};
  CHECK_THROWS(embed_channel(bad, 1.0));
}

TEST_CASE("noiseless-subsystem structure validates against the spectral P_psi") {
  Rng rng(410);
  const NsModel nm = random_ns_model(2, 2, 2, rng);
  const Pipeline p = run_pipeline(nm.model);
  REQUIRE(p.s.size() == 4);  // d^2 modes
  const NSReport rep = validate_ns_structure(p.s, nm.ns);
  CHECK(rep.embedding_residual < 1e-8);
  CHECK(rep.ppsi_deviation < 1e-7);
  CHECK(rep.j_form_deviation < 1e-7);
}

TEST_CASE("four-level model is a DFS: trivial auxiliary factor validates") {
  const Pipeline p = run_pipeline(four_level(1.0));
  NSStructure ns;
  ns.dfs_dim = 2;
  ns.aux_dim = 1;
  ns.embedding = Mat::Identity(4, 4).leftCols(2);
  ns.aux_state = Mat::Identity(1, 1);
  const NSReport rep = validate_ns_structure(p.s, ns);
  CHECK(rep.embedding_residual < 1e-9);
  CHECK(rep.ppsi_deviation < 1e-7);
  CHECK(rep.j_form_deviation < 1e-7);
}
