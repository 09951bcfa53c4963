// Asymptotic subspace machinery: eigenfrequencies and eigenmatrices of the
// peripheral spectral cluster, conserved quantities, the asymptotic
// projection P_inf = sum |Psi><<J|, the minimal projection
// P_psi = P_inf P_UL, the infinite-time map, the Drazin inverse, and the
// embedding of quantum channels into Lindbladians.
#pragma once

#include "lbt/corners.hpp"

#include <optional>

namespace lbt {

struct AsymptoticSpace {
  std::vector<double> frequencies;  // Delta per mode (eigenvalue i*Delta)
  std::vector<Mat> Psi;             // right eigenmatrices, orthonormal per cluster
  std::vector<Mat> J;               // conserved quantities, <<J_mu|Psi_nu>> = delta
  CornerProjectors corners;

  int size() const { return int(Psi.size()); }
  int dim() const { return corners.dim(); }
  bool steady(double tol = 1e-9) const;  // all Delta = 0

  Mat J_ul(int mu) const;  // P J_mu P

  // Dense superoperators (small N).
  SuperMat Pinf() const;
  SuperMat Ppsi() const;
  SuperMat Qinf() const;  // identity - Pinf

  // Low-rank applications (any N).
  Mat apply_pinf(const Mat& A) const;
  Mat apply_ppsi(const Mat& A) const;
};

// Extract the asymptotic cluster from a full spectrum: eigenvalues with
// |Re| < zero_tol, grouped into Delta clusters (radius 10*zero_tol), right
// vectors orthonormalized (the Delta = 0 cluster gets a Hermitian basis with
// the traceful element first; +/-Delta clusters are adjoint pairs), and J
// built from the left eigenvectors, biorthonormalized against Psi.
AsymptoticSpace asymptotic_space(const SuperMat& L, const Spectrum& spec,
                                 const CornerProjectors& cp, double zero_tol);

// Steady DFS fast path: for models whose corners came from
// jump_annihilated_corners, As(H) is the full UL block and J_UL = Psi; J is
// returned without its LR tail (Ppsi and apply_ppsi are exact; Pinf is not
// available from this construction). No N^2-dim eigensolve involved.
AsymptoticSpace dfs_asymptotic_space(const CornerProjectors& cp);

// Proposition-2 route to conserved quantities:
//   <<J| = <<J_UL| (P_UL - L P_LR (L_LR - lambda P_LR)^{-1})
// for eigenvalue lambda = i*Delta, given the block decomposition.
std::vector<Mat> conserved_from_prop2(const SuperMat& L, const BlockDecomposition& d,
                                      const std::vector<Mat>& J_ul,
                                      const std::vector<Complex>& lambdas);

// Rescale J columns against Psi so that <<J_mu|Psi_nu>> = delta_{mu nu}
// (contragradient mixing within the cluster). Throws on singular Gram.
void biorthogonalize(const std::vector<Mat>& Psi, std::vector<Mat>& J);

// e^{t H_inf} P_inf = sum e^{i Delta t} |Psi><<J| and its action.
SuperMat infinite_time_map(const AsymptoticSpace& s, double t);
Mat asymptotic_state(const AsymptoticSpace& s, const Mat& rho_in, double t);

// Drazin inverse: vanishes on As(H), inverts L on the decaying complement;
// L D = D L = Q_inf. Computed as (L + Pinf)^{-1} - Pinf for steady As(H).
SuperMat drazin_inverse(const SuperMat& L, const AsymptoticSpace& s);

// Channel embedding (output block first, input block second):
//   F_l = [[0, E_l], [0, 0]],  all rates kappa_eff, H = 0.
// The infinite-time map restricted to the input block reproduces the channel.
LindbladModel embed_channel(const std::vector<Mat>& kraus, double kappa_eff);

// Recover the channel map (d_out^2 x d_in^2 matrix on vectorized densities)
// from an embedded model via the asymptotic projection.
Eigen::MatrixXcd extract_channel(const LindbladModel& m, int d_in, int d_out);

// Apply a Kraus set directly (oracle for tests and verification).
Mat apply_kraus(const std::vector<Mat>& kraus, const Mat& rho);

struct NSStructure {
  Mat embedding;  // N x (d * d_ax) isometry; column k*d_ax + a = |psi_k, a>
  Mat aux_state;  // d_ax x d_ax full-rank density rho_ax
  int dfs_dim = 0;
  int aux_dim = 0;
};

struct NSReport {
  double embedding_residual = 0.0;   // || U U^dag - P ||
  double ppsi_deviation = 0.0;       // spectral P_psi vs tensor form, worst case
  double j_form_deviation = 0.0;     // J_UL span vs n_ax * (S_mu x I_ax) span
};

// Validate a user-supplied noiseless-subsystem structure against the
// spectrally computed minimal projection (Eq. form P_psi = Tr_ax{P.P} x rho_ax).
NSReport validate_ns_structure(const AsymptoticSpace& s, const NSStructure& ns);

}  // namespace lbt
