// Parameterized Lindbladian families: adiabatic connections, holonomies
// (operator and coordinate representations), curvature, the quantum
// geometric tensor, metrics (standard and alternative, plus path length),
// and finite-time adiabatic propagation with 1/T corrections.
//
// Only families with steady asymptotic spaces (all eigenfrequencies zero)
// are accepted: nonsteady families would require dynamical-phase handling.
#pragma once

#include "lbt/asymptotics.hpp"

#include <functional>

namespace lbt {

struct ParameterFamily {
  int param_dim = 1;
  std::function<LindbladModel(const Eigen::VectorXd&)> eval;
  double fd_step = 1e-5;   // scaled by (1 + |x|) per finite difference
  bool allow_fast = true;  // permit the jump-annihilated DFS shortcut
};

struct Path {
  std::vector<Eigen::VectorXd> samples;  // x(s_i) on a uniform s grid in [0,1]
  bool closed = false;

  int steps() const { return int(samples.size()) - 1; }
  void validate() const;  // >= 2 samples; closed paths end where they start
};

// Family evaluated at a point: model, generator (empty when the DFS fast
// path was taken) and asymptotic-space machinery. Throws if the asymptotic
// space is not steady.
struct FamilySpace {
  LindbladModel model;
  SuperMat L;  // zero-sized on the fast path
  AsymptoticSpace space;
  bool fast = false;
};
FamilySpace family_space(const ParameterFamily& fam, const Eigen::VectorXd& x);

// Real orthogonal Procrustes alignment of target's cluster basis onto the
// reference basis; the same mixing is applied to J, preserving
// biorthogonality. Returns the mixing matrix O (Psi_new_mu = sum_nu
// Psi_nu O_{nu mu}). Throws when the overlap matrix is near-singular
// (path step too large).
Eigen::MatrixXd gauge_align(const AsymptoticSpace& reference, AsymptoticSpace& target);

struct ProjectorDerivative {
  SuperMat d;                   // Richardson-refined central difference
  double error_estimate = 0.0;  // ||refined - half-step estimate||
};

// d P_psi / d x_alpha; the projector is gauge-invariant, so the finite
// difference needs no basis alignment. Throws if the nondecaying rank
// changes inside the stencil.
ProjectorDerivative p_psi_derivative(const ParameterFamily& fam, const Eigen::VectorXd& x,
                                     int alpha);

struct Connection {
  Eigen::MatrixXd A;     // <<J^mu | d_alpha Psi_nu>>
  Eigen::MatrixXd A_ul;  // same with the UL-projected conserved quantities
  double max_imag = 0.0;
  double form_difference = 0.0;  // the two forms must agree
};

// Connection in the locally aligned gauge; the overload with a reference
// space first aligns the center basis to it (needed for curvature).
Connection adiabatic_connection(const ParameterFamily& fam, const Eigen::VectorXd& x,
                                int alpha);
Connection adiabatic_connection(const ParameterFamily& fam, const Eigen::VectorXd& x,
                                int alpha, const AsymptoticSpace& reference);

// F_ab = d_a A_b - d_b A_a + [A_a, A_b], all samples gauge-aligned to the
// basis at x.
Eigen::MatrixXd curvature(const ParameterFamily& fam, const Eigen::VectorXd& x, int alpha,
                          int beta);

struct QGTMatrix {
  Eigen::MatrixXd Q;  // <<J^mu| dP_a dP_b |Psi_nu>>
  double max_imag = 0.0;
};
QGTMatrix qgt(const ParameterFamily& fam, const Eigen::VectorXd& x, int alpha, int beta);

// Symmetrized superoperator-trace metric TR{P_psi dP_(a dP_b)}.
double metric(const ParameterFamily& fam, const Eigen::VectorXd& x, int alpha, int beta);

// Alternative metric: symmetrized sum_mu <<dP_a Psi_mu | dP_b Psi_mu>>
// scaled by prefactor (<<rho_ax|rho_ax>> for noiseless-subsystem blocks,
// 1 for a decoherence-free subspace).
double alt_metric(const ParameterFamily& fam, const Eigen::VectorXd& x, int alpha,
                  int beta, double prefactor = 1.0);

// L = int ||P_psi' P_psi|| ds by quadrature over the path samples
// (Frobenius norm); bounds the holonomy norm by e^L.
double path_length(const ParameterFamily& fam, const Path& path);

struct HolonomyOperator {
  Eigen::MatrixXcd transported;  // N^2 x m: transported basis kets at s = 1
  Eigen::MatrixXcd coeffs;       // <<J_UL^mu(0) | transported_nu>>
  double unitarity_residual = 0.0;  // ||coeffs^dag coeffs - 1|| (closed paths)
};

// Path-ordered product of exp(P_psi' P_psi ds) steps applied to the initial
// cluster basis; each step exponential is applied in its rank-m low-rank
// form, so no dense superoperator is ever built.
HolonomyOperator holonomy_operator(const ParameterFamily& fam, const Path& path);

struct HolonomyCoordinate {
  // Path-ordered exp(-int A_a dx_a), expressed relative to the initial
  // cluster basis; for closed paths this matches the coefficients of the
  // operator-representation holonomy.
  Eigen::MatrixXd B;
  double max_imag = 0.0;
};
HolonomyCoordinate holonomy_coordinate(const ParameterFamily& fam, const Path& path);

// State-level Wilczek-Zee oracle for DFS families: the product of
// nondecaying Hilbert-space projectors along the path, compressed to the
// initial DFS basis and polar-unitarized. d x d unitary.
Eigen::MatrixXcd wilczek_zee_holonomy(const ParameterFamily& fam, const Path& path);

struct AdiabaticRun {
  Mat final_state;          // integrated rho(s = 1)
  Mat holonomy_prediction;  // transported rho(0)
  double deviation = 0.0;   // hs distance between the two
};

// Integrates (1/T) d_s rho = L(x(s)) rho with midpoint-rule step
// exponentials over the path samples; rho0 must be asymptotic at x(0).
AdiabaticRun adiabatic_propagate(const ParameterFamily& fam, const Path& path, double T,
                                 const Mat& rho0);

struct AdiabaticPrediction {
  Vec zeroth;     // transported rho0
  Vec corrected;  // + (1/T) endpoint leakage + (1/T) accumulated tunneling
};

// First-order-corrected adiabatic predictor
//   rho(1) = U rho0 + (1/T) Lc^{-1} Ppsi' U rho0
//          + (1/T) int_0^1 dr U^{(1,r)} {Pinf' Lc^{-1} Ppsi'}(r) U^{(r,0)} rho0
// with Lc^{-1} the complement-compression inverse. Uses the full spectral
// route (the asymptotic projector derivative needs the conserved-quantity
// tails).
AdiabaticPrediction corrected_adiabatic_prediction(const ParameterFamily& fam,
                                                   const Path& path, double T,
                                                   const Mat& rho0);

}  // namespace lbt
