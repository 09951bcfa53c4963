#include "lbt/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lbt {

bool AsymptoticSpace::steady(double tol) const {
  for (double f : frequencies)
    if (std::abs(f) > tol) return false;
  return true;
}

Mat AsymptoticSpace::J_ul(int mu) const {
  return corners.P * J[size_t(mu)] * corners.P;
}

SuperMat AsymptoticSpace::Pinf() const {
  const Eigen::Index n2 = Eigen::Index(dim()) * dim();
  SuperMat out = SuperMat::Zero(n2, n2);
  for (int mu = 0; mu < size(); ++mu)
    out += vectorize(Psi[size_t(mu)]) * vectorize(J[size_t(mu)]).adjoint();
  return out;
}

SuperMat AsymptoticSpace::Ppsi() const {
  const Eigen::Index n2 = Eigen::Index(dim()) * dim();
  SuperMat out = SuperMat::Zero(n2, n2);
  for (int mu = 0; mu < size(); ++mu)
    out += vectorize(Psi[size_t(mu)]) * vectorize(J_ul(mu)).adjoint();
  return out;
}

SuperMat AsymptoticSpace::Qinf() const {
  const Eigen::Index n2 = Eigen::Index(dim()) * dim();
  return SuperMat::Identity(n2, n2) - Pinf();
}

Mat AsymptoticSpace::apply_pinf(const Mat& A) const {
  Mat out = Mat::Zero(dim(), dim());
  for (int mu = 0; mu < size(); ++mu) out += Psi[size_t(mu)] * hs_inner(J[size_t(mu)], A);
  return out;
}

Mat AsymptoticSpace::apply_ppsi(const Mat& A) const {
  Mat out = Mat::Zero(dim(), dim());
  for (int mu = 0; mu < size(); ++mu) out += Psi[size_t(mu)] * hs_inner(J_ul(mu), A);
  return out;
}

namespace {

// Gram-Schmidt over Hermitian candidates spanning the Delta = 0 cluster;
// the first candidate (the traceful time-averaged state) is kept first.
std::vector<Mat> hermitian_cluster_basis(const std::vector<Mat>& candidates, int want) {
  std::vector<Mat> basis;
  for (const Mat& c : candidates) {
    Mat v = c;
    for (const Mat& b : basis) v -= b * hs_inner(b, v).real();
    const double n = v.norm();
    if (n > 1e-8 * std::max(1.0, c.norm())) {
      basis.push_back(v / n);
      if (int(basis.size()) == want) break;
    }
  }
  if (int(basis.size()) != want)
    throw std::runtime_error("asymptotic_space: Hermitian basis construction failed");
  return basis;
}

}  // namespace

AsymptoticSpace asymptotic_space(const SuperMat& L, const Spectrum& spec,
                                 const CornerProjectors& cp, double zero_tol) {
  const int N = cp.dim();
  std::vector<Eigen::Index> asym;
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
    if (std::abs(spec.eigenvalues[i].real()) < zero_tol) asym.push_back(i);
  if (asym.empty()) throw std::runtime_error("asymptotic_space: empty asymptotic cluster");

  // Group by Delta = Im(lambda), clustering radius 10 * zero_tol.
  std::sort(asym.begin(), asym.end(), [&](Eigen::Index a, Eigen::Index b) {
    return spec.eigenvalues[a].imag() < spec.eigenvalues[b].imag();
  });
  std::vector<std::vector<Eigen::Index>> clusters;
  for (Eigen::Index i : asym) {
    if (!clusters.empty() &&
        std::abs(spec.eigenvalues[i].imag() -
                 spec.eigenvalues[clusters.back().back()].imag()) < 10 * zero_tol)
      clusters.back().push_back(i);
    else
      clusters.push_back({i});
  }

  auto cluster_delta = [&](const std::vector<Eigen::Index>& c) {
    double s = 0;
    for (Eigen::Index i : c) s += spec.eigenvalues[i].imag();
    return s / double(c.size());
  };

  AsymptoticSpace out;
  out.corners = cp;

  auto append_cluster = [&](double delta, const std::vector<Mat>& Psis,
                            const std::vector<Mat>& Js) {
    for (size_t k = 0; k < Psis.size(); ++k) {
      out.frequencies.push_back(delta);
      out.Psi.push_back(Psis[k]);
      out.J.push_back(Js[k]);
    }
  };

  // Orthonormal right/left bases of a cluster eigenspace via the SVD null
  // space of L - i Delta. Raw eigenvector columns can be nearly dependent
  // inside a degenerate cluster, which poisons every Gram inversion; the
  // null-space bases are well-conditioned regardless.
  auto cluster_bases = [&](const std::vector<Eigen::Index>& c, double delta) {
    SuperMat M = L;
    M.diagonal().array() -= Complex(0.0, delta);
    return null_space_pair(M, Eigen::Index(c.size()));
  };

  // Build J for a cluster: mix the orthonormal left basis W so that
  // <<J_mu|Psi_nu>> = delta.
  auto cluster_J = [&](const Eigen::MatrixXcd& W, const std::vector<Mat>& Psis) {
    const int k = int(Psis.size());
    Eigen::MatrixXcd Pm(Eigen::Index(N) * N, k);
    for (int j = 0; j < k; ++j) Pm.col(j) = vectorize(Psis[size_t(j)]);
    const Eigen::MatrixXcd G = W.adjoint() * Pm;  // k x k
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(G);
    if (!lu.isInvertible())
      throw std::runtime_error("asymptotic_space: singular left/right Gram matrix");
    const Eigen::MatrixXcd Jm = W * lu.inverse().adjoint();
    std::vector<Mat> Js;
    for (int j = 0; j < k; ++j) Js.push_back(devectorize(Jm.col(j)));
    return Js;
  };

  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    const double delta = cluster_delta(clusters[ci]);
    const int k = int(clusters[ci].size());
    if (std::abs(delta) < 10 * zero_tol) {
      const auto [R, W] = cluster_bases(clusters[ci], delta);
      // Delta = 0: Hermitian basis, traceful element first.
      const Vec mixed = vectorize(Mat::Identity(N, N) / double(N));
      const Eigen::MatrixXcd G0 = W.adjoint() * R;
      const Vec img = R * Eigen::FullPivLU<Eigen::MatrixXcd>(G0).solve(
                              Eigen::VectorXcd(W.adjoint() * mixed));
      std::vector<Mat> cands;
      cands.push_back(hermitize(devectorize(img)));
      for (int j = 0; j < k; ++j) {
        const Mat Psi = devectorize(R.col(j));
        cands.push_back(hermitize(Psi));
        cands.push_back(hermitize(Complex(0, -1) * Psi));
      }
      const std::vector<Mat> Psis = hermitian_cluster_basis(cands, k);
      append_cluster(0.0, Psis, cluster_J(W, Psis));
    } else if (delta > 0) {
      // The +Delta cluster keeps its orthonormal basis; the -Delta partner
      // is its adjoint.
      const auto [R, W] = cluster_bases(clusters[ci], delta);
      std::vector<Mat> Psis;
      for (int j = 0; j < k; ++j) Psis.push_back(devectorize(R.col(j)));
      const std::vector<Mat> Js = cluster_J(W, Psis);
      append_cluster(delta, Psis, Js);
      // Find the matching -Delta cluster and emit the adjoint pair.
      for (size_t cj = 0; cj < clusters.size(); ++cj) {
        if (std::abs(cluster_delta(clusters[cj]) + delta) < 10 * zero_tol) {
          std::vector<Mat> Psim, Jm;
          for (const Mat& Pp : Psis) Psim.push_back(Pp.adjoint());
          for (const Mat& Jp : Js) Jm.push_back(Jp.adjoint());
          append_cluster(-delta, Psim, Jm);
          break;
        }
      }
    }
    // delta < 0 handled with its positive partner.
  }
  return out;
}

AsymptoticSpace dfs_asymptotic_space(const CornerProjectors& cp) {
  AsymptoticSpace out;
  out.corners = cp;
  const HermitianBasis hb = hermitian_basis(cp.rank);
  for (const Mat& G : hb.elements) {
    out.frequencies.push_back(0.0);
    out.Psi.push_back(cp.Up * G * cp.Up.adjoint());
    out.J.push_back(out.Psi.back());  // J_UL = Psi for a DFS; LR tail omitted
  }
  return out;
}

std::vector<Mat> conserved_from_prop2(const SuperMat& L, const BlockDecomposition& d,
                                      const std::vector<Mat>& J_ul,
                                      const std::vector<Complex>& lambdas) {
  if (J_ul.size() != lambdas.size())
    throw std::invalid_argument("conserved_from_prop2: one lambda per J");
  const Eigen::Index nlr = d.L_lr.rows();
  std::vector<Mat> out;
  for (size_t mu = 0; mu < J_ul.size(); ++mu) {
    const Eigen::RowVectorXcd row = vectorize(J_ul[mu]).adjoint();
    Eigen::RowVectorXcd full = row;
    if (nlr > 0) {
      const Eigen::MatrixXcd R =
          d.L_lr - lambdas[mu] * Eigen::MatrixXcd::Identity(nlr, nlr);
      // <<J| = <<J_UL|(P_UL - L P_LR (L_LR - lambda)^{-1}); the row solve
      // w (L_LR - lambda)^{-1} is done as an adjoint system.
      const Eigen::RowVectorXcd w = (row * L) * d.B_lr;
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(R.adjoint());
      const Eigen::VectorXcd y = lu.solve(w.adjoint());
      full -= y.adjoint() * d.B_lr.adjoint();
    }
    out.push_back(devectorize(full.adjoint()));
  }
  return out;
}

void biorthogonalize(const std::vector<Mat>& Psi, std::vector<Mat>& J) {
  const int k = int(Psi.size());
  if (int(J.size()) != k) throw std::invalid_argument("biorthogonalize: size mismatch");
  Eigen::MatrixXcd G(k, k);
  for (int m = 0; m < k; ++m)
    for (int n = 0; n < k; ++n) G(m, n) = hs_inner(J[size_t(m)], Psi[size_t(n)]);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(G);
  if (!lu.isInvertible()) throw std::runtime_error("biorthogonalize: singular Gram matrix");
  const Eigen::MatrixXcd C = lu.inverse().adjoint();  // J' = J C, C = G^{-dag}
  std::vector<Mat> Jn(size_t(k), Mat::Zero(Psi[0].rows(), Psi[0].cols()));
  for (int m = 0; m < k; ++m)
    for (int r = 0; r < k; ++r) Jn[size_t(m)] += J[size_t(r)] * C(r, m);
  J = std::move(Jn);
}

SuperMat infinite_time_map(const AsymptoticSpace& s, double t) {
  const Eigen::Index n2 = Eigen::Index(s.dim()) * s.dim();
  SuperMat out = SuperMat::Zero(n2, n2);
  for (int mu = 0; mu < s.size(); ++mu)
    out += std::exp(Complex(0, s.frequencies[size_t(mu)] * t)) *
           vectorize(s.Psi[size_t(mu)]) * vectorize(s.J[size_t(mu)]).adjoint();
  return out;
}

Mat asymptotic_state(const AsymptoticSpace& s, const Mat& rho_in, double t) {
  Mat out = Mat::Zero(s.dim(), s.dim());
  for (int mu = 0; mu < s.size(); ++mu)
    out += std::exp(Complex(0, s.frequencies[size_t(mu)] * t)) *
           s.Psi[size_t(mu)] * hs_inner(s.J[size_t(mu)], rho_in);
  return out;
}

SuperMat drazin_inverse(const SuperMat& L, const AsymptoticSpace& s) {
  const SuperMat P = s.Pinf();
  const Eigen::Index n = L.rows();
  Eigen::PartialPivLU<SuperMat> lu(L + P);
  if (s.steady()) return lu.solve(SuperMat::Identity(n, n)) - P;
  // Rotating As(H): zero out the asymptotic components explicitly.
  const SuperMat Q = SuperMat::Identity(n, n) - P;
  return Q * lu.solve(Q);
}

LindbladModel embed_channel(const std::vector<Mat>& kraus, double kappa_eff) {
  if (kraus.empty()) throw std::invalid_argument("embed_channel: empty Kraus set");
  const int d_out = int(kraus.front().rows());
  const int d_in = int(kraus.front().cols());
  Mat sum = Mat::Zero(d_in, d_in);
  for (const Mat& E : kraus) {
    if (E.rows() != d_out || E.cols() != d_in)
      throw std::invalid_argument("embed_channel: inconsistent Kraus dimensions");
    sum += E.adjoint() * E;
  }
  if ((sum - Mat::Identity(d_in, d_in)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("embed_channel: Kraus set is not trace preserving");
  const int N = d_in + d_out;
  LindbladModel m;
  for (const Mat& E : kraus) {
    Mat F = Mat::Zero(N, N);
    F.block(0, d_out, d_out, d_in) = E;  // output block first, input second
    m.jumps.push_back({F, kappa_eff});
  }
  return m;
}

Eigen::MatrixXcd extract_channel(const LindbladModel& m, int d_in, int d_out) {
  const int N = m.dim();
  if (N != d_in + d_out) throw std::invalid_argument("extract_channel: dimension mismatch");
  const SuperMat L = build_generator(m);
  const Spectrum sp = spectrum(L);
  const double ztol = sp.default_zero_tol();
  const CornerProjectors cp = nondecaying_projector(L, sp, ztol);
  const AsymptoticSpace s = asymptotic_space(L, sp, cp, ztol);
  Eigen::MatrixXcd map(Eigen::Index(d_out) * d_out, Eigen::Index(d_in) * d_in);
  for (int j = 0; j < d_in; ++j) {
    for (int i = 0; i < d_in; ++i) {
      Mat padded = Mat::Zero(N, N);
      padded(d_out + i, d_out + j) = 1.0;  // |i><j| in the input block
      const Mat img = s.apply_pinf(padded);
      map.col(Eigen::Index(j) * d_in + i) = vectorize(Mat(img.topLeftCorner(d_out, d_out)));
    }
  }
  return map;
}

Mat apply_kraus(const std::vector<Mat>& kraus, const Mat& rho) {
  Mat out = Mat::Zero(kraus.front().rows(), kraus.front().rows());
  for (const Mat& E : kraus) out += E * rho * E.adjoint();
  return out;
}

NSReport validate_ns_structure(const AsymptoticSpace& s, const NSStructure& ns) {
  NSReport rep;
  const int N = s.dim();
  const int d = ns.dfs_dim, da = ns.aux_dim;
  const Mat& U = ns.embedding;
  if (U.rows() != N || U.cols() != Eigen::Index(d) * da)
    throw std::invalid_argument("validate_ns_structure: embedding dimension mismatch");
  rep.embedding_residual = (U * U.adjoint() - s.corners.P).norm();

  // Tensor form P_psi(rho) = U (Tr_ax{U^dag rho U} (x) rho_ax) U^dag,
  // compared against the spectral P_psi on a full operator basis.
  auto trace_aux = [&](const Mat& M) {
    Mat R = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        for (int a = 0; a < da; ++a) R(k, l) += M(k * da + a, l * da + a);
    return R;
  };
  auto kron = [&](const Mat& A, const Mat& B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
      for (int j = 0; j < A.cols(); ++j)
        K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
  };
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      Mat probe = Mat::Zero(N, N);
      probe(i, j) = 1.0;
      const Mat tens = U * kron(trace_aux(U.adjoint() * probe * U), ns.aux_state) * U.adjoint();
      rep.ppsi_deviation = std::max(rep.ppsi_deviation, (tens - s.apply_ppsi(probe)).norm());
    }
  }

  // Conserved-quantity form: J_UL should span { n_ax (S_mu (x) I_ax) } with
  // n_ax = ||rho_ax||_HS and S_mu a Hermitian DFS basis.
  Eigen::MatrixXcd Jm(Eigen::Index(N) * N, s.size());
  for (int mu = 0; mu < s.size(); ++mu) Jm.col(mu) = vectorize(s.J_ul(mu));
  const Eigen::MatrixXcd proj =
      Jm * (Jm.adjoint() * Jm).partialPivLu().solve(Jm.adjoint());
  const double n_ax = ns.aux_state.norm();
  for (const Mat& S : hermitian_basis(d).elements) {
    const Mat K = n_ax * U * kron(S, Mat::Identity(da, da)) * U.adjoint();
    const Vec v = vectorize(K);
    rep.j_form_deviation =
        std::max(rep.j_form_deviation, (v - proj * v).norm() / std::max(1e-300, v.norm()));
  }
  return rep;
}

}  // namespace lbt
