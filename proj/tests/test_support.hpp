// Shared test fixtures: deterministic random models (DFS, noiseless
// subsystem, unique steady state), random channels, and matrix helpers.
#pragma once

#include "lbt/asymptotics.hpp"
#include "lbt/models.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <random>

namespace lbt::testing {

using Rng = std::mt19937;

inline Mat random_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = Complex(g(rng), g(rng));
  return M;
}

inline Mat random_hermitian(int n, Rng& rng) {
  const Mat M = random_matrix(n, n, rng);
  return (M + M.adjoint()) / 2.0;
}

inline Mat random_density(int n, Rng& rng) {
  const Mat M = random_matrix(n, n, rng);
  Mat rho = M * M.adjoint();
  rho /= rho.trace();
  return rho;
}

// Haar-ish random isometry: QR of a Gaussian matrix (rows >= cols).
inline Mat random_isometry(int rows, int cols, Rng& rng) {
  const Mat M = random_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Mat> qr(M);
  return Mat(qr.householderQ()).leftCols(cols);
}

// DFS model: jumps annihilate a random d-dimensional subspace; H = 0.
// As(H) is the full d^2-dimensional UL block.
struct DfsModel {
  LindbladModel model;
  Mat Up;  // N x d basis of the preserved subspace
};

inline DfsModel random_dfs_model(int N, int d, int n_jumps, Rng& rng) {
  const Mat U = random_isometry(N, N, rng);
  DfsModel out;
  out.Up = U.leftCols(d);
  const Mat Uq = U.rightCols(N - d);
  for (int l = 0; l < n_jumps; ++l) {
    // F = M Uq^dag annihilates range(Up); rows may hit the whole space.
    out.model.jumps.push_back({random_matrix(N, N - d, rng) * Uq.adjoint(), 1.0});
  }
  return out;
}

// Noiseless subsystem: N = d * d_ax + n_extra. On the block the jumps act as
// I_d (x) B with B from an auxiliary Lindbladian with a unique full-rank
// steady state; extra levels decay into the block.
struct NsModel {
  LindbladModel model;
  NSStructure ns;  // embedding and the analytically known aux steady state
};

inline NsModel random_ns_model(int d, int d_ax, int n_extra, Rng& rng) {
  const int nb = d * d_ax;
  const int N = nb + n_extra;
  const Mat W = random_isometry(N, N, rng);
  const Mat U = W.leftCols(nb);
  const Mat Ue = W.rightCols(n_extra);

  // Auxiliary jumps: one generic Gaussian jump plus its adjoint partner at a
  // different rate -> unique full-rank aux steady state (generically).
  std::vector<std::pair<Mat, double>> aux;
  const Mat B = random_matrix(d_ax, d_ax, rng);
  aux.push_back({B, 1.0});
  aux.push_back({B.adjoint(), 0.35});

  NsModel out;
  const Mat Id = Mat::Identity(d, d);
  for (const auto& [B_ax, rate] : aux) {
    Mat lift = Mat::Zero(N, N);
    lift += U * Eigen::kroneckerProduct(Id, B_ax).eval() * U.adjoint();
    out.model.jumps.push_back({lift, rate});
  }
  if (n_extra > 0)
    out.model.jumps.push_back({random_matrix(N, n_extra, rng) * Ue.adjoint(), 1.0});

  // Aux steady state by direct solve of the d_ax^2-dim kernel.
  LindbladModel aux_model;
  for (const auto& [B_ax, rate] : aux) aux_model.jumps.push_back({B_ax, rate});
  const SuperMat La = build_generator(aux_model);
  Eigen::JacobiSVD<SuperMat> svd(La, Eigen::ComputeFullV);
  Mat sigma = devectorize(svd.matrixV().col(d_ax * d_ax - 1));
  sigma /= sigma.trace();  // fixes the arbitrary phase; steady states are traceful
  sigma = (sigma + sigma.adjoint()) / 2.0;

  out.ns.embedding = U;
  out.ns.aux_state = sigma;
  out.ns.dfs_dim = d;
  out.ns.aux_dim = d_ax;
  return out;
}

// Generic dissipative model with (generically) a unique faithful steady state.
inline LindbladModel random_unique_model(int N, Rng& rng) {
  LindbladModel m;
  m.hamiltonian = random_hermitian(N, rng);
  m.jumps.push_back({random_matrix(N, N, rng), 1.0});
  m.jumps.push_back({random_matrix(N, N, rng), 0.6});
  return m;
}

// Random trace-preserving channel: QR of stacked Gaussian blocks.
inline std::vector<Mat> random_channel(int d_in, int d_out, int n_kraus, Rng& rng) {
  const Mat V = random_isometry(n_kraus * d_out, d_in, rng);
  std::vector<Mat> kraus;
  for (int k = 0; k < n_kraus; ++k)
    kraus.push_back(V.middleRows(k * d_out, d_out));
  return kraus;
}

inline double max_abs_diff(const Mat& A, const Mat& B) {
  return (A - B).cwiseAbs().maxCoeff();
}

}  // namespace lbt::testing
