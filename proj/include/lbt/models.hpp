// Built-in models and bosonic helpers used by the CLI and tests.
#pragma once

#include "lbt/lindblad.hpp"

namespace lbt {

// Truncated annihilation operator on Fock states |0..n-1>.
Mat destroy(int n);

// Normalized coherent state |alpha> truncated to n Fock states.
Vec coherent_state(Complex alpha, int n);

// Photon-number parity grading (n mod 2) for graded_sector_eigenvalues.
std::vector<int> fock_parity_grading(int n);

// Four-level system: DFS {|0>,|1>}, decaying levels {|2>,|3>}. Single jump
//   F = |0><2| + |1><3| + alpha (|2><2| - |3><3|),  kappa = 1,
// plus optional H = (beta/2)(|0><0| - |1><1|) which makes the DFS rotate.
LindbladModel four_level(double alpha, double beta = 0.0);

// Two-photon absorber with pump: single jump F = a^2 - alpha^2, kappa = 1.
// Steady subspace is the coherent-state pair |+alpha>, |-alpha>.
LindbladModel two_photon(double alpha, int truncation);

// Cat pair: single jump F = (a - alpha0)(a - alpha1), kappa = 1; steady
// subspace spanned by the two coherent states |alpha0>, |alpha1>.
LindbladModel cat_pair(Complex alpha0, Complex alpha1, int truncation);

// Qubit amplitude damping: F = |0><1|, rate kappa.
LindbladModel amplitude_damping(double kappa);

// Qubit with both decay (kappa_down) and pumping (kappa_up); full-rank
// thermal steady state.
LindbladModel thermal_qubit(double kappa_down, double kappa_up);

}  // namespace lbt
