// Lindbladian construction and spectral analysis.
//
//   L(rho) = -i[H, rho] + 1/2 sum_l kappa_l (2 F_l rho F_l^dag
//            - F_l^dag F_l rho - rho F_l^dag F_l)
//
// built as a dense N^2 x N^2 matrix acting on column-stacked operators.
#pragma once

#include "lbt/opspace.hpp"

#include <limits>
#include <vector>

namespace lbt {

struct JumpOperator {
  Mat op;             // F_l
  double rate = 1.0;  // kappa_l > 0
};

struct LindbladModel {
  Mat hamiltonian;  // Hermitian; may be zero-sized for "no Hamiltonian"
  std::vector<JumpOperator> jumps;

  int dim() const;
  // Throws if H is non-Hermitian, a rate is <= 0, or dims disagree.
  void validate(double tol = 1e-12) const;
};

SuperMat build_generator(const LindbladModel& m);

// Heisenberg picture: L^dag(A) = i[H,A] + 1/2 sum kappa (2 F^dag A F - {F^dag F, A}).
SuperMat build_adjoint_generator(const LindbladModel& m);

// H -> H - (i/2) sum kappa (conj(g) F - g F^dag), F -> F + g I; leaves the
// generator invariant. g_l = -Tr{F_l}/N makes every jump traceless.
LindbladModel gauge_transform(const LindbladModel& m, const std::vector<Complex>& g);

// e^{tL} rho0 via scaling-and-squaring matrix exponential.
Mat propagate(const SuperMat& L, const Mat& rho0, double t);

struct Spectrum {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right;  // columns: right eigenvectors, unit norm
  Eigen::MatrixXcd left;   // columns: left eigenvectors, left^dag * right = I
  bool diagonalizable = true;
  double condition_estimate = 1.0;  // condition of the right-eigenvector matrix
  double max_residual = 0.0;        // max_i |L r_i - lambda_i r_i|

  // Eigenvalue-classification threshold: 1e-8 * max(1, spectral radius).
  double default_zero_tol() const;
};

// Full spectral data with biorthonormal left/right eigenvectors (left vectors
// from the inverse of the right-eigenvector matrix).
Spectrum spectrum(const SuperMat& L);

// min |Re lambda| over eigenvalues with |Re lambda| > zero_tol; +inf if none.
double dissipative_gap(const Spectrum& spec, double zero_tol);
double dissipative_gap(const Eigen::VectorXcd& eigenvalues, double zero_tol);

// Eigenvalues only (no vectors). Falls back to a real Schur decomposition
// when the matrix is real within tol, which is ~10x faster.
Eigen::VectorXcd eigenvalues_only(const Eigen::MatrixXcd& M, double real_tol = 1e-14);

// Eigenvalues of a superoperator that is block diagonal over sectors of a
// graded Hilbert-space basis (e.g. photon-number parity): basis state i has
// integer grade g[i], and the operator-space sector of |i><j| is labeled
// (g[i], g[j]). Requires the grading to commute with the superoperator;
// the off-sector residual is checked against tol and a violation throws.
// When the superoperator matrix is real, the (a,b) and (b,a) sectors have
// conjugate spectra and only one of each pair is diagonalized.
Eigen::VectorXcd graded_sector_eigenvalues(const SuperMat& L, const std::vector<int>& grades,
                                           double tol = 1e-9);

}  // namespace lbt
