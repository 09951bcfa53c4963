// Kubo linear response of steady Lindbladians: time and frequency domain,
// the three-way four-corners split of the response kernel, effective
// in-subspace Hamiltonians for Hamiltonian and jump perturbations, leakage
// amplitudes, and the second-order in-subspace term.
#pragma once

#include "lbt/asymptotics.hpp"

#include <functional>

namespace lbt {

struct Perturbation {
  // Hamiltonian part: H -> H + g(t) V (zero-sized V = absent).
  Mat V;
  // Jump part: F_index -> F_index + g(t) f.
  struct JumpDelta {
    int index = 0;
    Mat f;
  };
  std::vector<JumpDelta> jump_deltas;
};

// First-order generator change: dL = -i[V,.] + sum_l kappa_l (F_l . f_l^dag
// + f_l . F_l^dag - (1/2){f_l^dag F_l + F_l^dag f_l, .}).
SuperMat perturbation_superop(const Perturbation& p, const LindbladModel& m);

struct ResponseSeries {
  std::vector<double> t;
  std::vector<Complex> total;         // <<A| e^{uL} dL |rho_inf>> convolved with g
  std::vector<Complex> in_subspace;   // A_UL against the asymptotic image
  std::vector<Complex> interference;  // A_UL against the decaying remainder
  std::vector<Complex> outside;       // A outside UL
  double split_residual = 0.0;        // max |total - (a+b+c)|
  double quadrature_error = 0.0;      // step-halving estimate at the endpoint
};

// Response <<dA(t)>> = int_{t0}^{t} g(tau) K(t - tau) dtau on a uniform grid
// of n_steps intervals over [t0, t1], with the kernel split three ways by
// where the operator and the propagated perturbation live.
ResponseSeries kubo_time_response(const SuperMat& L, const AsymptoticSpace& space,
                                  const Mat& A, const SuperMat& dL, const Mat& rho_inf,
                                  const std::function<double(double)>& g, double t0,
                                  double t1, int n_steps);

struct FrequencyResponse {
  Complex value;          // epsilon -> 0 extrapolation (Neville, 3 points)
  bool resonant = false;  // 1/epsilon growth detected; value = smallest-epsilon result
  std::array<Complex, 3> at_epsilon;
};

// -<<A| (L + i(omega + i eps))^{-1} dL |rho_inf>> extrapolated over
// eps in {1e-3, 1e-4, 1e-5}.
FrequencyResponse frequency_response(const SuperMat& L, const Mat& A, const SuperMat& dL,
                                     const Mat& rho_inf, double omega);

struct EffectiveW {
  SuperMat W_super;             // P_psi dL P_psi (dense)
  Eigen::MatrixXcd restriction; // <<J_UL^mu| dL |Psi_nu>> over the Delta=0 basis
  double max_imag = 0.0;        // reality witness of the restriction
  double antisym_residual = 0.0;
  bool unitary = false;         // real + antisymmetric restriction
};

// First-order in-subspace generator; its restriction to As(H) in the
// Hermitian Psi basis must be real antisymmetric (unitary evolution).
EffectiveW effective_hamiltonian_W(const AsymptoticSpace& space, const SuperMat& dL,
                                   double tol = 1e-9);

// NS-block effective Hamiltonian for a jump perturbation:
//   Y = (i/2) sum_l kappa_l Tr_ax{rho_ax (F_UL^dag f_UL - f_UL^dag F_UL)}
// returned as a d x d operator on the DFS factor.
Mat effective_hamiltonian_Y(const NSStructure& ns, const LindbladModel& m,
                            const Perturbation& p, const CornerProjectors& cp);

// Combined full-space generator X = V + (i/2) sum kappa (F^dag f - f^dag F).
Mat combined_X(const LindbladModel& m, const Perturbation& p);

struct Leakage {
  Vec via_drazin;       // -L^{-1} dL |rho_inf>>
  Vec via_compression;  // -(complement compression)^{-1} dL |rho_inf>>
  double mismatch = 0.0;
};

Leakage leakage(const SuperMat& L, const AsymptoticSpace& space,
                const BlockDecomposition& decomp, const SuperMat& dL, const Mat& rho_inf);

struct SecondOrder {
  SuperMat full;     // P_inf dL L^{-1} dL P_inf
  SuperMat reduced;  // P_inf dL L_complement^{-1} dL P_psi
  double mismatch = 0.0;
};

SecondOrder second_order_term(const SuperMat& L, const AsymptoticSpace& space,
                              const BlockDecomposition& decomp, const SuperMat& dL);

// Inverse of the compression of L to the complement of UL, lifted back to
// the full operator space (zero on UL).
SuperMat complement_inverse(const BlockDecomposition& decomp);

}  // namespace lbt
