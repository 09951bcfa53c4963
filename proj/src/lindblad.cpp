#include "lbt/lindblad.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>

namespace lbt {

int LindbladModel::dim() const {
  if (hamiltonian.size() > 0) return int(hamiltonian.rows());
  if (!jumps.empty()) return int(jumps.front().op.rows());
  return 0;
}

void LindbladModel::validate(double tol) const {
  const int N = dim();
  if (N == 0) throw std::invalid_argument("LindbladModel: empty model");
  if (hamiltonian.size() > 0) {
    if (hamiltonian.rows() != N || hamiltonian.cols() != N)
      throw std::invalid_argument("LindbladModel: Hamiltonian dimension mismatch");
    const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
    if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
      throw std::invalid_argument("LindbladModel: Hamiltonian not Hermitian");
  }
  for (const auto& j : jumps) {
    if (j.op.rows() != N || j.op.cols() != N)
      throw std::invalid_argument("LindbladModel: jump dimension mismatch");
    if (!(j.rate > 0)) throw std::invalid_argument("LindbladModel: rate must be > 0");
  }
}

SuperMat build_generator(const LindbladModel& m) {
  m.validate();
  const int N = m.dim();
  const Mat I = Mat::Identity(N, N);
  SuperMat L = SuperMat::Zero(N * N, N * N);
  if (m.hamiltonian.size() > 0) L += commutator_superop(m.hamiltonian);
  for (const auto& j : m.jumps) {
    const Mat FdF = j.op.adjoint() * j.op;
    L += j.rate * (sandwich_superop(j.op, j.op.adjoint()) -
                   0.5 * sandwich_superop(FdF, I) - 0.5 * sandwich_superop(I, FdF));
  }
  return L;
}

SuperMat build_adjoint_generator(const LindbladModel& m) {
  m.validate();
  const int N = m.dim();
  const Mat I = Mat::Identity(N, N);
  SuperMat L = SuperMat::Zero(N * N, N * N);
  if (m.hamiltonian.size() > 0) L -= commutator_superop(m.hamiltonian);
  for (const auto& j : m.jumps) {
    const Mat FdF = j.op.adjoint() * j.op;
    L += j.rate * (sandwich_superop(j.op.adjoint(), j.op) -
                   0.5 * sandwich_superop(FdF, I) - 0.5 * sandwich_superop(I, FdF));
  }
  return L;
}

LindbladModel gauge_transform(const LindbladModel& m, const std::vector<Complex>& g) {
  if (g.size() != m.jumps.size())
    throw std::invalid_argument("gauge_transform: one g per jump required");
  const int N = m.dim();
  const Mat I = Mat::Identity(N, N);
  LindbladModel out = m;
  if (out.hamiltonian.size() == 0) out.hamiltonian = Mat::Zero(N, N);
  for (size_t l = 0; l < g.size(); ++l) {
    const Mat& F = m.jumps[l].op;
    out.hamiltonian -= Complex(0, 0.5) * m.jumps[l].rate *
                       (std::conj(g[l]) * F - g[l] * F.adjoint());
    out.jumps[l].op = F + g[l] * I;
  }
  return out;
}

Mat propagate(const SuperMat& L, const Mat& rho0, double t) {
  if (t < 0) throw std::invalid_argument("propagate: t must be >= 0");
  if (t == 0) return rho0;
  const SuperMat E = (t * L).exp();
  return superop_apply(E, rho0);
}

double Spectrum::default_zero_tol() const {
  double radius = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    radius = std::max(radius, std::abs(eigenvalues[i]));
  return 1e-8 * std::max(1.0, radius);
}

Spectrum spectrum(const SuperMat& L) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L, true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectrum: eigensolver failed to converge");
  Spectrum s;
  s.eigenvalues = es.eigenvalues();
  s.right = es.eigenvectors();  // unit-norm columns
  // Left eigenvectors from the inverse: rows of V^-1 are left eigenvectors,
  // already biorthonormal against the right set.
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(s.right);
  const Eigen::MatrixXcd Vinv = lu.solve(Eigen::MatrixXcd::Identity(L.rows(), L.cols()));
  s.left = Vinv.adjoint();
  // Condition estimate of V (infinity norms); flags near-defective spectra.
  const double vn = s.right.cwiseAbs().rowwise().sum().maxCoeff();
  const double vin = Vinv.cwiseAbs().rowwise().sum().maxCoeff();
  s.condition_estimate = vn * vin;
  s.diagonalizable = s.condition_estimate < 1e8;
  s.max_residual =
      (L * s.right - s.right * s.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff();
  return s;
}

double dissipative_gap(const Eigen::VectorXcd& eigenvalues, double zero_tol) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double re = std::abs(eigenvalues[i].real());
    if (re > zero_tol) gap = std::min(gap, re);
  }
  return gap;
}

double dissipative_gap(const Spectrum& spec, double zero_tol) {
  if (spec.eigenvalues.size() == 0) throw std::invalid_argument("dissipative_gap: empty spectrum");
  return dissipative_gap(spec.eigenvalues, zero_tol);
}

Eigen::VectorXcd eigenvalues_only(const Eigen::MatrixXcd& M, double real_tol) {
  if (M.rows() == 0) return {};
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (M.imag().cwiseAbs().maxCoeff() <= real_tol * scale) {
    const Eigen::MatrixXd R = M.real();
    Eigen::RealSchur<Eigen::MatrixXd> schur(R, false);
    if (schur.info() != Eigen::Success)
      throw std::runtime_error("eigenvalues_only: real Schur failed");
    const Eigen::MatrixXd& T = schur.matrixT();
    const Eigen::Index n = T.rows();
    Eigen::VectorXcd ev(n);
    Eigen::Index i = 0;
    while (i < n) {
      if (i + 1 < n && std::abs(T(i + 1, i)) > 0) {
        // 2x2 block: complex conjugate pair.
        const double a = T(i, i), b = T(i, i + 1), c = T(i + 1, i), d = T(i + 1, i + 1);
        const double re = 0.5 * (a + d);
        const double disc = 0.25 * (a - d) * (a - d) + b * c;
        const double im = std::sqrt(std::max(0.0, -disc));
        ev[i] = Complex(re, im);
        ev[i + 1] = Complex(re, -im);
        i += 2;
      } else {
        ev[i] = Complex(T(i, i), 0.0);
        ++i;
      }
    }
    return ev;
  }
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(M, false);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("eigenvalues_only: complex Schur failed");
  return schur.matrixT().diagonal();
}

Eigen::VectorXcd graded_sector_eigenvalues(const SuperMat& L, const std::vector<int>& grades,
                                           double tol) {
  const int N = int(grades.size());
  if (Eigen::Index(N) * N != L.rows())
    throw std::invalid_argument("graded_sector_eigenvalues: grading length mismatch");
  // Operator-space index (i,j) -> flat N*j + i (column stacking); sector (g_i, g_j).
  std::map<std::pair<int, int>, std::vector<Eigen::Index>> sectors;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      sectors[{grades[size_t(i)], grades[size_t(j)]}].push_back(Eigen::Index(N) * j + i);

  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  const bool is_real = L.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale;

  // Verify the grading is respected: off-sector columns must vanish.
  for (const auto& [label, idx] : sectors) {
    for (Eigen::Index c : idx) {
      double off = 0.0;
      for (Eigen::Index r = 0; r < L.rows(); ++r) off += std::abs(L(r, c));
      double in = 0.0;
      for (Eigen::Index r : idx) in += std::abs(L(r, c));
      if (off - in > tol * scale)
        throw std::invalid_argument(
            "graded_sector_eigenvalues: superoperator does not respect the grading");
    }
  }

  std::vector<Complex> out;
  out.reserve(size_t(L.rows()));
  for (const auto& [label, idx] : sectors) {
    if (is_real && label.first > label.second) continue;  // conjugate of (b,a) sector
    Eigen::MatrixXcd block(idx.size(), idx.size());
    for (size_t c = 0; c < idx.size(); ++c)
      for (size_t r = 0; r < idx.size(); ++r) block(Eigen::Index(r), Eigen::Index(c)) = L(idx[r], idx[c]);
    const Eigen::VectorXcd ev = eigenvalues_only(block);
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      out.push_back(ev[k]);
      if (is_real && label.first < label.second) out.push_back(std::conj(ev[k]));
    }
  }
  return Eigen::Map<const Eigen::VectorXcd>(out.data(), Eigen::Index(out.size()));
}

}  // namespace lbt
