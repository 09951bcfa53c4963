// Four-corners decomposition of operator space.
//
// The nondecaying projector P splits every operator A into
//   A_UL = PAP   (nondecaying block, "upper left")
//   A_UR = PAQ,  A_LL = QAP   (coherences)
//   A_LR = QAQ   (decaying block)
// with Q = I - P. The generator is block upper triangular over
// (UL, UR+LL, LR): nothing flows out of the UL block.
#pragma once

#include "lbt/lindblad.hpp"

#include <array>

namespace lbt {

enum class Corner { UL, UR, LL, LR };

struct CornerProjectors {
  Mat P;   // orthogonal projector, P^2 = P = P^dag
  Mat Q;   // I - P
  Mat Up;  // N x d, orthonormal basis of range(P)
  Mat Uq;  // N x (N-d), orthonormal basis of range(Q)
  int rank = 0;  // d = Tr P

  int dim() const { return int(P.rows()); }

  // PAP, PAQ, QAP or QAQ.
  Mat project(const Mat& A, Corner which) const;

  // Orthonormal operator-space basis of a corner as N^2 x (block dim)
  // columns; e.g. the UR block is spanned by vec(Up e_ij Uq^dag).
  Eigen::MatrixXcd corner_basis(Corner which) const;

  // Dense superoperator projections (Eq. of the four corners); quadratic
  // in N^2 memory, intended for small N.
  SuperMat super_proj(Corner which) const;
  SuperMat super_proj_offdiag() const;    // UR + LL
  SuperMat super_proj_complement() const; // identity - UL
};

// Build the corner machinery from an explicit orthogonal projector.
CornerProjectors corner_projectors(const Mat& P, double tol = kDefaultTol);

// Discover P from the asymptotic spectral cluster: propagate the maximally
// mixed state through the raw asymptotic spectral projector, Hermitize,
// threshold the support at rank_tol * (largest eigenvalue); verify every
// asymptotic eigenmatrix is supported inside P and enlarge on failure.
CornerProjectors nondecaying_projector(const SuperMat& L, const Spectrum& spec,
                                       double zero_tol, double rank_tol = 1e-9);

// Fast path for models with H = 0 whose jumps annihilate a common subspace:
// P = kernel projector of the parent Hamiltonian (1/2) sum kappa F^dag F,
// verified via ||F P|| < tol. Returns empty optional if the preconditions
// fail. Avoids any N^2-dimensional eigensolve.
struct MaybeCorners {
  bool ok = false;
  CornerProjectors cp;
};
MaybeCorners jump_annihilated_corners(const LindbladModel& m, double tol = 1e-8);

// Apply the generator block P_x L P_y at the operator level from the corner
// pieces of H and F (the App.-C-style closed forms): with
// Atilde = H - (i/2) sum kappa F^dag F,
//   P_x L P_y (A) = -i [row-match] Atilde_{RxRy} A + i [col-match] A (Atilde_{CxCy})^dag
//                   + sum kappa F_{RxRy} A (F_{CxCy})^dag  restricted to corner x.
Mat block_action(const LindbladModel& m, const CornerProjectors& cp, const Mat& A_y,
                 Corner x, Corner y);

struct BlockDecomposition {
  CornerProjectors cp;
  // Orthonormal corner bases (columns of length N^2); B_coh = [B_ur, B_ll].
  Eigen::MatrixXcd B_ul, B_coh, B_lr;
  // Compressions of L onto orthonormal corner bases (dims d^2, 2d(N-d), (N-d)^2).
  Eigen::MatrixXcd L_ul;
  Eigen::MatrixXcd L_coh;  // UR and LL jointly (they do not couple)
  Eigen::MatrixXcd L_lr;
  // Upper-triangular couplings.
  Eigen::MatrixXcd C_ul_coh, C_ul_lr, C_coh_lr;
  double triangularity_residual = 0.0;  // norm of the forbidden lower blocks
  double crosscheck_residual = 0.0;     // compression vs closed-form block action
};

// Decompose L over the corner bases; when crosscheck is set, every block is
// recomputed from the closed-form block action on random probes and the
// worst disagreement recorded.
BlockDecomposition decompose_generator(const SuperMat& L, const CornerProjectors& cp,
                                       const LindbladModel& m, bool crosscheck = true);

// Coherence-block compression built directly at the operator level (no dense
// superoperator); used for large-N gap sweeps.
Eigen::MatrixXcd coherence_compression(const LindbladModel& m, const CornerProjectors& cp);

struct Prop1Report {
  std::vector<double> jump_residuals;  // ||Q F_l P|| per jump
  double hamiltonian_residual = 0.0;   // ||H_UR + (i/2) sum kappa F_UL^dag F_UR||
  bool ok(double tol = 1e-9) const;
};

Prop1Report validate_proposition1(const LindbladModel& m, const CornerProjectors& cp);

struct EffectiveGapReport {
  // Headline value: min |Re lambda| over nonzero eigenvalues of the
  // coherence-block compression (the quantity whose match with the parent-
  // Hamiltonian excitation gap is exact for jump-annihilated DFS models).
  double coherence_min_re = 0.0;
  double coherence_min_abs = 0.0;
  // Same minima over the full complement of UL (coherences + LR jointly).
  double complement_min_re = 0.0;
  double complement_min_abs = 0.0;
};

EffectiveGapReport effective_dissipative_gap(const BlockDecomposition& d, double zero_tol);

// H_edg = (1/2) sum kappa F^dag F and its smallest nonzero eigenvalue.
// Meaningful as a gap proxy when H = 0 and the jumps annihilate range(P).
struct ParentHamiltonian {
  Mat H_edg;
  double excitation_gap = 0.0;
  Eigen::VectorXd eigenvalues;
  bool jump_annihilation_holds = false;  // H absent and ||F P|| small
};
ParentHamiltonian parent_hamiltonian(const LindbladModel& m, double zero_tol = 1e-8);

}  // namespace lbt
