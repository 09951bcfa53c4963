#include "lbt/models.hpp"

#include <cmath>

namespace lbt {

Mat destroy(int n) {
  Mat a = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

Vec coherent_state(Complex alpha, int n) {
  Vec v(n);
  // c_k = alpha^k / sqrt(k!), built recursively, then normalized (exact in
  // the untruncated limit; normalization absorbs the truncated tail).
  Complex c = 1.0;
  for (int k = 0; k < n; ++k) {
    v[k] = c;
    c *= alpha / std::sqrt(double(k + 1));
  }
  v.normalize();
  return v;
}

std::vector<int> fock_parity_grading(int n) {
  std::vector<int> g(static_cast<size_t>(n), 0);
  for (int k = 0; k < n; ++k) g[size_t(k)] = k % 2;
  return g;
}

LindbladModel four_level(double alpha, double beta) {
  Mat F = Mat::Zero(4, 4);
  F(0, 2) = 1.0;
  F(1, 3) = 1.0;
  F(2, 2) = alpha;
  F(3, 3) = -alpha;
  LindbladModel m;
  m.jumps.push_back({F, 1.0});
  if (beta != 0.0) {
    Mat H = Mat::Zero(4, 4);
    H(0, 0) = 0.5 * beta;
    H(1, 1) = -0.5 * beta;
    m.hamiltonian = H;
  }
  return m;
}

LindbladModel two_photon(double alpha, int truncation) {
  const Mat a = destroy(truncation);
  LindbladModel m;
  m.jumps.push_back({a * a - alpha * alpha * Mat::Identity(truncation, truncation), 1.0});
  return m;
}

LindbladModel cat_pair(Complex alpha0, Complex alpha1, int truncation) {
  const Mat a = destroy(truncation);
  const Mat I = Mat::Identity(truncation, truncation);
  LindbladModel m;
  m.jumps.push_back({(a - alpha0 * I) * (a - alpha1 * I), 1.0});
  return m;
}

LindbladModel amplitude_damping(double kappa) {
  Mat F = Mat::Zero(2, 2);
  F(0, 1) = 1.0;
  LindbladModel m;
  m.jumps.push_back({F, kappa});
  return m;
}

LindbladModel thermal_qubit(double kappa_down, double kappa_up) {
  Mat Fdown = Mat::Zero(2, 2);
  Fdown(0, 1) = 1.0;
  Mat Fup = Mat::Zero(2, 2);
  Fup(1, 0) = 1.0;
  LindbladModel m;
  m.jumps.push_back({Fdown, kappa_down});
  m.jumps.push_back({Fup, kappa_up});
  return m;
}

}  // namespace lbt
