#include "lbt/opspace.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace lbt {

Mat devectorize(const Vec& v) {
  const auto n2 = v.size();
  const int N = static_cast<int>(std::lround(std::sqrt(double(n2))));
  if (Eigen::Index(N) * N != n2)
    throw std::invalid_argument("devectorize: length is not a perfect square");
  return Eigen::Map<const Mat>(v.data(), N, N);
}

Mat hermitize(const Mat& A) { return 0.5 * (A + A.adjoint()); }

SuperMat sandwich_superop(const Mat& L, const Mat& R) {
  if (L.rows() != L.cols() || R.rows() != R.cols() || L.rows() != R.rows())
    throw std::invalid_argument("sandwich_superop: dimension mismatch");
  // vec(L A R) = (R^T kron L) vec(A) under column stacking.
  return Eigen::kroneckerProduct(R.transpose(), L);
}

SuperMat commutator_superop(const Mat& H) {
  const int N = int(H.rows());
  const Mat I = Mat::Identity(N, N);
  return Complex(0, -1) * (sandwich_superop(H, I) - sandwich_superop(I, H));
}

SuperMat superop_adjoint(const SuperMat& S) { return S.adjoint(); }

Mat superop_apply(const SuperMat& S, const Mat& A) {
  return devectorize(S * vectorize(A));
}

HermitianBasis hermitian_basis(int N) {
  if (N < 1) throw std::invalid_argument("hermitian_basis: N must be >= 1");
  HermitianBasis b;
  b.dim = N;
  b.elements.reserve(size_t(N) * N);
  b.elements.push_back(Mat::Identity(N, N) / std::sqrt(double(N)));
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < N; ++k) {
    for (int l = k + 1; l < N; ++l) {
      Mat sym = Mat::Zero(N, N);
      sym(k, l) = r;
      sym(l, k) = r;
      b.elements.push_back(sym);
      Mat asym = Mat::Zero(N, N);
      asym(k, l) = Complex(0, r);
      asym(l, k) = Complex(0, -r);
      b.elements.push_back(asym);
    }
  }
  // Diagonal traceless elements diag(1,...,1,-m,0,...)/sqrt(m(m+1)).
  for (int m = 1; m < N; ++m) {
    Mat d = Mat::Zero(N, N);
    const double s = 1.0 / std::sqrt(double(m) * (m + 1));
    for (int j = 0; j < m; ++j) d(j, j) = s;
    d(m, m) = -double(m) * s;
    b.elements.push_back(d);
  }
  return b;
}

BasisMatrix superop_in_hermitian_basis(const SuperMat& S, const HermitianBasis& basis,
                                       double tol) {
  const int n = int(basis.elements.size());
  if (S.rows() != n || S.cols() != n)
    throw std::invalid_argument("superop_in_hermitian_basis: dimension mismatch");
  Eigen::MatrixXcd B(n, n);  // columns = vectorized basis elements
  for (int k = 0; k < n; ++k) B.col(k) = vectorize(basis.elements[size_t(k)]);
  BasisMatrix out;
  out.coeffs = B.adjoint() * S * B;
  out.max_imag = out.coeffs.imag().cwiseAbs().maxCoeff();
  out.real = out.max_imag < tol * std::max(1.0, out.coeffs.cwiseAbs().maxCoeff());
  return out;
}

bool is_antisymmetric(const Eigen::MatrixXd& M, double tol) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M + M.transpose()).cwiseAbs().maxCoeff() < tol * scale;
}

bool is_unitary_generator(const SuperMat& S, const HermitianBasis& basis, double tol) {
  const BasisMatrix bm = superop_in_hermitian_basis(S, basis, tol);
  if (!bm.real)
    throw std::invalid_argument(
        "is_unitary_generator: superoperator is not Hermiticity-preserving "
        "(matrix in Hermitian basis is not real)");
  return is_antisymmetric(bm.real_part(), tol);
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> null_space_pair(const SuperMat& M,
                                                              Eigen::Index k) {
  if (k <= 0 || k > M.rows())
    throw std::invalid_argument("null_space_pair: bad null-space dimension");
  const double scale = std::max(1.0, M.norm());
  {
    Eigen::BDCSVD<SuperMat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXcd R = svd.matrixV().rightCols(k);
    Eigen::MatrixXcd W = svd.matrixU().rightCols(k);
    const double resid = std::max((M * R).norm(), (M.adjoint() * W).norm());
    // Same order as the default spectral zero tolerance: catches the
    // catastrophic mislabeling (O(1) residual) without punishing models whose
    // cluster is only zero to working precision.
    if (resid < 1e-8 * scale) return {std::move(R), std::move(W)};
  }
  Eigen::JacobiSVD<SuperMat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixV().rightCols(k), svd.matrixU().rightCols(k)};
}

}  // namespace lbt
