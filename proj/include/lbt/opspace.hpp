// Hilbert-Schmidt operator-space arithmetic: vectorization (double-kets),
// inner products, Hermitian operator bases, superoperator construction.
//
// Conventions, fixed project-wide:
//   * vectorize() uses column stacking, so the superoperator realizing
//     A -> L*A*R is kron(R^T, L) acting on |A>>.
//   * <<A|B>> = Tr{A^dag B} = vectorize(A)^dag . vectorize(B).
//   * hermitian_basis(N) lists the normalized identity first, then the
//     off-diagonal symmetric/antisymmetric pairs, then diagonal traceless
//     elements.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace lbt {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;   // operator on the N-dim Hilbert space
using Vec = Eigen::VectorXcd;   // operator ket, length N^2
using SuperMat = Eigen::MatrixXcd;  // superoperator, N^2 x N^2

constexpr double kDefaultTol = 1e-10;

// |A>> under column stacking; exact round trip with devectorize.
template <typename Derived>
Eigen::VectorXcd vectorize(const Eigen::MatrixBase<Derived>& A) {
  Eigen::MatrixXcd M = A;
  return Eigen::Map<const Eigen::VectorXcd>(M.data(), M.size());
}

Mat devectorize(const Vec& v);

// <<A|B>> = Tr{A^dag B}.
template <typename DA, typename DB>
Complex hs_inner(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("hs_inner: dimension mismatch");
  return (A.adjoint() * B).trace();
}

template <typename Derived>
double hs_norm(const Eigen::MatrixBase<Derived>& A) {
  return A.norm();  // Frobenius norm = sqrt(<<A|A>>)
}

// (A + A^dag)/2.
Mat hermitize(const Mat& A);

// Matrix of the map A -> L*A*R.
SuperMat sandwich_superop(const Mat& L, const Mat& R);

// Matrix of the map A -> -i[H, A].
SuperMat commutator_superop(const Mat& H);

// <<A|S(B)>> = <<adjoint(S)(A)|B>>; equals the conjugate transpose.
SuperMat superop_adjoint(const SuperMat& S);

// Apply a superoperator to an operator (devectorize(S * |A>>)).
Mat superop_apply(const SuperMat& S, const Mat& A);

struct HermitianBasis {
  int dim = 0;                 // Hilbert-space dimension N
  std::vector<Mat> elements;   // N^2 Hermitian matrices, orthonormal
};

// Orthonormal Hermitian basis: I/sqrt(N) first, then (E_kl + E_lk)/sqrt(2)
// and i(E_kl - E_lk)/sqrt(2) for k < l, then diagonal traceless elements.
HermitianBasis hermitian_basis(int N);

struct BasisMatrix {
  Eigen::MatrixXcd coeffs;  // S_kl = <<G_k|S|G_l>>
  bool real = false;        // all imaginary parts below tol
  double max_imag = 0.0;
  Eigen::MatrixXd real_part() const { return coeffs.real(); }
};

// Matrix elements of S in a Hermitian operator basis. A Hermiticity-
// preserving S yields a real matrix; a Hamiltonian generator -i[H,.]
// additionally yields an antisymmetric one.
BasisMatrix superop_in_hermitian_basis(const SuperMat& S, const HermitianBasis& basis,
                                       double tol = kDefaultTol);

// True iff S is real and antisymmetric in the Hermitian basis, i.e. S is a
// commutator generator -i[H,.]. Throws if S is not Hermiticity-preserving.
bool is_unitary_generator(const SuperMat& S, const HermitianBasis& basis,
                          double tol = kDefaultTol);

// True iff the real square matrix M is antisymmetric within tol.
bool is_antisymmetric(const Eigen::MatrixXd& M, double tol = kDefaultTol);

// Orthonormal bases (right, left) of the k-dimensional null space of M.
// Tries the fast divide-and-conquer SVD first and verifies the result; on
// some structured inputs it mislabels null directions, in which case the
// (slow but reliable) Jacobi SVD is used instead.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> null_space_pair(const SuperMat& M,
                                                              Eigen::Index k);

}  // namespace lbt
