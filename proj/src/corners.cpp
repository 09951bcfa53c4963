#include "lbt/corners.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <random>

namespace lbt {
namespace {

// Row/column projector selectors of a corner: UL = (P,P), UR = (P,Q),
// LL = (Q,P), LR = (Q,Q).
std::pair<bool, bool> corner_rc(Corner c) {
  switch (c) {
    case Corner::UL: return {true, true};
    case Corner::UR: return {true, false};
    case Corner::LL: return {false, true};
    case Corner::LR: return {false, false};
  }
  throw std::invalid_argument("invalid corner tag");
}

}  // namespace

Mat CornerProjectors::project(const Mat& A, Corner which) const {
  const auto [rp, cp] = corner_rc(which);
  return (rp ? P : Q) * A * (cp ? P : Q);
}

Eigen::MatrixXcd CornerProjectors::corner_basis(Corner which) const {
  const auto [rp, cp] = corner_rc(which);
  const Mat& R = rp ? Up : Uq;
  const Mat& C = cp ? Up : Uq;
  // vec(R e_ij C^dag) columns = kron(conj(C), R).
  return Eigen::kroneckerProduct(C.conjugate(), R);
}

SuperMat CornerProjectors::super_proj(Corner which) const {
  const auto [rp, cp] = corner_rc(which);
  return sandwich_superop(rp ? P : Q, cp ? P : Q);
}

SuperMat CornerProjectors::super_proj_offdiag() const {
  return super_proj(Corner::UR) + super_proj(Corner::LL);
}

SuperMat CornerProjectors::super_proj_complement() const {
  const Eigen::Index n = P.rows() * P.rows();
  return SuperMat::Identity(n, n) - super_proj(Corner::UL);
}

CornerProjectors corner_projectors(const Mat& Pin, double tol) {
  const int N = int(Pin.rows());
  const double herm = (Pin - Pin.adjoint()).cwiseAbs().maxCoeff();
  const double idem = (Pin * Pin - Pin).cwiseAbs().maxCoeff();
  if (herm > tol || idem > tol)
    throw std::invalid_argument("corner_projectors: P is not an orthogonal projector");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(Pin));
  CornerProjectors cp;
  int d = 0;
  for (int i = 0; i < N; ++i)
    if (es.eigenvalues()[i] > 0.5) ++d;
  cp.rank = d;
  cp.Up = es.eigenvectors().rightCols(d);          // eigenvalues ascending
  cp.Uq = es.eigenvectors().leftCols(N - d);
  cp.P = cp.Up * cp.Up.adjoint();
  cp.Q = Mat::Identity(N, N) - cp.P;
  return cp;
}

CornerProjectors nondecaying_projector(const SuperMat& L, const Spectrum& spec,
                                       double zero_tol, double rank_tol) {
  const Eigen::Index n2 = L.rows();
  const int N = int(std::lround(std::sqrt(double(n2))));
  std::vector<Eigen::Index> asym;
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
    if (std::abs(spec.eigenvalues[i].real()) < zero_tol) asym.push_back(i);
  if (asym.empty())
    throw std::runtime_error("nondecaying_projector: no asymptotic eigenvalue found");

  // Time-averaged image of the maximally mixed state: the steady (Delta = 0)
  // spectral projector applied to I/N. Built from SVD null-space bases of L;
  // raw eigenvector pairs can be nearly dependent inside the degenerate
  // cluster, which makes their biorthogonal projector numerically unusable.
  Eigen::Index k0 = 0;
  for (Eigen::Index i : asym)
    if (std::abs(spec.eigenvalues[i].imag()) < 10 * zero_tol) ++k0;
  if (k0 == 0)
    throw std::runtime_error("nondecaying_projector: no steady eigenvalue found");
  const Vec mixed = vectorize(Mat::Identity(N, N) / double(N));
  const auto [R0, W0] = null_space_pair(L, k0);
  const Vec img = R0 * Eigen::FullPivLU<Eigen::MatrixXcd>(W0.adjoint() * R0)
                           .solve(Eigen::VectorXcd(W0.adjoint() * mixed));
  Mat rho_bar = hermitize(devectorize(img));

  auto support = [&](const Mat& Hm) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Hm);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < N; ++i)
      if (std::abs(es.eigenvalues()[i]) > rank_tol * lmax) keep.push_back(i);
    Mat V(N, int(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) V.col(Eigen::Index(k)) = es.eigenvectors().col(keep[k]);
    return V;
  };

  Mat V = support(rho_bar);
  auto verify = [&](const Mat& P) {
    const Mat Q = Mat::Identity(N, N) - P;
    double worst = 0.0;
    for (Eigen::Index i : asym) {
      Mat Psi = devectorize(spec.right.col(i));
      Psi /= std::max(1e-300, Psi.norm());
      worst = std::max(worst, (Q * Psi * Q).norm() + (P * Psi * Q).norm() + (Q * Psi * P).norm());
    }
    return worst;
  };

  Mat P = V * (V.adjoint() * V).inverse() * V.adjoint();
  if (verify(P) > 1e-7) {
    // Enlarge with supports of Hermitized asymptotic eigenmatrices.
    Mat M = rho_bar;
    for (Eigen::Index i : asym) {
      const Mat Psi = devectorize(spec.right.col(i));
      M += Psi * Psi.adjoint() / std::max(1e-300, Psi.squaredNorm());
    }
    P = [&] {
      Mat W = support(M);
      return Mat(W * (W.adjoint() * W).inverse() * W.adjoint());
    }();
    if (verify(P) > 1e-7)
      throw std::runtime_error("nondecaying_projector: support verification failed");
  }
  return corner_projectors(hermitize(P), 1e-8);
}

MaybeCorners jump_annihilated_corners(const LindbladModel& m, double tol) {
  MaybeCorners out;
  const int N = m.dim();
  if (m.hamiltonian.size() > 0 && m.hamiltonian.cwiseAbs().maxCoeff() > 0) return out;
  Mat H_edg = Mat::Zero(N, N);
  for (const auto& j : m.jumps) H_edg += 0.5 * j.rate * (j.op.adjoint() * j.op);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(H_edg));
  const double lmax = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int d = 0;
  while (d < N && std::abs(es.eigenvalues()[d]) < tol * lmax) ++d;
  if (d == 0) return out;
  const Mat Up = es.eigenvectors().leftCols(d);
  for (const auto& j : m.jumps)
    if ((j.op * Up).cwiseAbs().maxCoeff() > tol * std::max(1.0, j.op.cwiseAbs().maxCoeff()))
      return out;
  CornerProjectors cp;
  cp.rank = d;
  cp.Up = Up;
  cp.Uq = es.eigenvectors().rightCols(N - d);
  cp.P = cp.Up * cp.Up.adjoint();
  cp.Q = Mat::Identity(N, N) - cp.P;
  out.ok = true;
  out.cp = std::move(cp);
  return out;
}

Mat block_action(const LindbladModel& m, const CornerProjectors& cp, const Mat& A_y,
                 Corner x, Corner y) {
  const int N = m.dim();
  const auto [rx, cx] = corner_rc(x);
  const auto [ry, cy] = corner_rc(y);
  const Mat& Rx = rx ? cp.P : cp.Q;
  const Mat& Cx = cx ? cp.P : cp.Q;
  const Mat& Ry = ry ? cp.P : cp.Q;
  const Mat& Cy = cy ? cp.P : cp.Q;
  const Mat A = Ry * A_y * Cy;  // ensure the probe lies in corner y

  Mat Atilde = Mat::Zero(N, N);
  if (m.hamiltonian.size() > 0) Atilde = m.hamiltonian;
  for (const auto& j : m.jumps)
    Atilde -= Complex(0, 0.5) * j.rate * (j.op.adjoint() * j.op);

  Mat out = Mat::Zero(N, N);
  for (const auto& j : m.jumps)
    out += j.rate * (Rx * j.op * Ry) * A * (Cy * j.op.adjoint() * Cx);
  if (cx == cy) out += Complex(0, -1) * (Rx * Atilde * Ry) * A;
  if (rx == ry) out += Complex(0, 1) * A * (Cy * Atilde.adjoint() * Cx);
  return out;
}

BlockDecomposition decompose_generator(const SuperMat& L, const CornerProjectors& cp,
                                       const LindbladModel& m, bool crosscheck) {
  BlockDecomposition d;
  d.cp = cp;
  const Eigen::MatrixXcd B_ul = cp.corner_basis(Corner::UL);
  const Eigen::MatrixXcd B_ur = cp.corner_basis(Corner::UR);
  const Eigen::MatrixXcd B_ll = cp.corner_basis(Corner::LL);
  const Eigen::MatrixXcd B_lr = cp.corner_basis(Corner::LR);
  Eigen::MatrixXcd B_coh(B_ur.rows(), B_ur.cols() + B_ll.cols());
  B_coh << B_ur, B_ll;
  d.B_ul = B_ul;
  d.B_coh = B_coh;
  d.B_lr = B_lr;

  const Eigen::MatrixXcd L_Bul = L * B_ul;
  const Eigen::MatrixXcd L_Bcoh = L * B_coh;
  const Eigen::MatrixXcd L_Blr = L * B_lr;

  d.L_ul = B_ul.adjoint() * L_Bul;
  d.L_coh = B_coh.adjoint() * L_Bcoh;
  d.L_lr = B_lr.adjoint() * L_Blr;
  d.C_ul_coh = B_ul.adjoint() * L_Bcoh;
  d.C_ul_lr = B_ul.adjoint() * L_Blr;
  d.C_coh_lr = B_coh.adjoint() * L_Blr;
  double tri = (B_coh.adjoint() * L_Bul).norm() + (B_lr.adjoint() * L_Bul).norm() +
               (B_lr.adjoint() * L_Bcoh).norm();
  d.triangularity_residual = tri;

  if (crosscheck) {
    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int N = m.dim();
    auto rand_mat = [&] {
      Mat A(N, N);
      for (int c = 0; c < N; ++c)
        for (int r = 0; r < N; ++r) A(r, c) = Complex(gauss(rng), gauss(rng));
      return A;
    };
    const std::array<Corner, 4> corners = {Corner::UL, Corner::UR, Corner::LL, Corner::LR};
    double worst = 0.0;
    for (Corner y : corners) {
      for (int probe = 0; probe < 3; ++probe) {
        const Mat A_y = cp.project(rand_mat(), y);
        const Mat LA = superop_apply(L, A_y);
        for (Corner x : corners) {
          const Mat via_super = cp.project(LA, x);
          const Mat via_formula = block_action(m, cp, A_y, x, y);
          worst = std::max(worst,
                           (via_super - via_formula).norm() / std::max(1.0, A_y.norm()));
        }
      }
    }
    d.crosscheck_residual = worst;
  }
  return d;
}

Eigen::MatrixXcd coherence_compression(const LindbladModel& m, const CornerProjectors& cp) {
  const int N = m.dim();
  const int d = cp.rank;
  const int q = N - d;
  const int nc = 2 * d * q;
  Eigen::MatrixXcd C(nc, nc);
  if (nc == 0) return C;

  Mat H = Mat::Zero(N, N);
  if (m.hamiltonian.size() > 0) H = m.hamiltonian;
  std::vector<Mat> G;  // F^dag F per jump
  for (const auto& j : m.jumps) G.push_back(j.op.adjoint() * j.op);

  auto apply_L = [&](const Mat& A) {
    Mat out = Complex(0, -1) * (H * A - A * H);
    for (size_t l = 0; l < m.jumps.size(); ++l) {
      const auto& j = m.jumps[l];
      out += j.rate * (j.op * A * j.op.adjoint() - 0.5 * (G[l] * A + A * G[l]));
    }
    return out;
  };

  // Basis order: UR elements Up_i Uq_j^dag (column-major over (i,j)), then
  // LL elements Uq_j Up_i^dag.
  int col = 0;
  auto fill = [&](const Mat& A) {
    const Mat LA = apply_L(A);
    const Mat c_ur = cp.Up.adjoint() * LA * cp.Uq;  // d x q
    const Mat c_ll = cp.Uq.adjoint() * LA * cp.Up;  // q x d
    C.col(col).head(d * q) = vectorize(c_ur);
    C.col(col).tail(d * q) = vectorize(c_ll);
    ++col;
  };
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < d; ++i) fill(cp.Up.col(i) * cp.Uq.col(j).adjoint());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < q; ++j) fill(cp.Uq.col(j) * cp.Up.col(i).adjoint());
  return C;
}

bool Prop1Report::ok(double tol) const {
  for (double r : jump_residuals)
    if (r > tol) return false;
  return hamiltonian_residual <= tol;
}

Prop1Report validate_proposition1(const LindbladModel& m, const CornerProjectors& cp) {
  Prop1Report rep;
  const int N = m.dim();
  Mat H = Mat::Zero(N, N);
  if (m.hamiltonian.size() > 0) H = m.hamiltonian;
  Mat constraint = cp.P * H * cp.Q;
  for (const auto& j : m.jumps) {
    rep.jump_residuals.push_back((cp.Q * j.op * cp.P).norm());
    constraint += Complex(0, 0.5) * j.rate * (cp.P * j.op.adjoint() * cp.P) *
                  (cp.P * j.op * cp.Q);
  }
  rep.hamiltonian_residual = constraint.norm();
  return rep;
}

namespace {
void track_minima(const Eigen::VectorXcd& ev, double zero_tol, double& min_re, double& min_abs) {
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double re = std::abs(ev[i].real());
    const double ab = std::abs(ev[i]);
    if (re > zero_tol) min_re = std::min(min_re, re);
    if (ab > zero_tol) min_abs = std::min(min_abs, ab);
  }
}
}  // namespace

EffectiveGapReport effective_dissipative_gap(const BlockDecomposition& d, double zero_tol) {
  EffectiveGapReport rep;
  const double inf = std::numeric_limits<double>::infinity();
  rep.coherence_min_re = rep.coherence_min_abs = inf;
  rep.complement_min_re = rep.complement_min_abs = inf;
  if (d.L_coh.rows() > 0) {
    const Eigen::VectorXcd ev = eigenvalues_only(d.L_coh);
    track_minima(ev, zero_tol, rep.coherence_min_re, rep.coherence_min_abs);
    track_minima(ev, zero_tol, rep.complement_min_re, rep.complement_min_abs);
  }
  if (d.L_lr.rows() > 0) {
    const Eigen::VectorXcd ev = eigenvalues_only(d.L_lr);
    track_minima(ev, zero_tol, rep.complement_min_re, rep.complement_min_abs);
  }
  return rep;
}

ParentHamiltonian parent_hamiltonian(const LindbladModel& m, double zero_tol) {
  const int N = m.dim();
  ParentHamiltonian ph;
  ph.H_edg = Mat::Zero(N, N);
  for (const auto& j : m.jumps) ph.H_edg += 0.5 * j.rate * (j.op.adjoint() * j.op);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(ph.H_edg));
  ph.eigenvalues = es.eigenvalues();
  const double lmax = std::max(1.0, ph.eigenvalues.cwiseAbs().maxCoeff());
  double gap = std::numeric_limits<double>::infinity();
  int kernel_dim = 0;
  for (int i = 0; i < N; ++i) {
    if (std::abs(ph.eigenvalues[i]) < zero_tol * lmax)
      ++kernel_dim;
    else
      gap = std::min(gap, std::abs(ph.eigenvalues[i]));
  }
  ph.excitation_gap = gap;
  const bool no_h = m.hamiltonian.size() == 0 || m.hamiltonian.cwiseAbs().maxCoeff() == 0;
  ph.jump_annihilation_holds = no_h && kernel_dim > 0;
  return ph;
}

}  // namespace lbt
