#include "lbt/response.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace lbt {

SuperMat perturbation_superop(const Perturbation& p, const LindbladModel& m) {
  const int N = m.dim();
  SuperMat dL = SuperMat::Zero(N * N, N * N);
  if (p.V.size() != 0) {
    if (p.V.rows() != N || p.V.cols() != N)
      throw std::invalid_argument("perturbation_superop: V dimension mismatch");
    dL += commutator_superop(p.V);
  }
  const Mat I = Mat::Identity(N, N);
  for (const auto& jd : p.jump_deltas) {
    if (jd.index < 0 || jd.index >= int(m.jumps.size()))
      throw std::invalid_argument("perturbation_superop: jump index out of range");
    const Mat& F = m.jumps[size_t(jd.index)].op;
    const double kappa = m.jumps[size_t(jd.index)].rate;
    const Mat& f = jd.f;
    if (f.rows() != N || f.cols() != N)
      throw std::invalid_argument("perturbation_superop: jump delta dimension mismatch");
    const Mat G = f.adjoint() * F + F.adjoint() * f;
    dL += kappa * (sandwich_superop(F, f.adjoint()) + sandwich_superop(f, F.adjoint()) -
                   0.5 * (sandwich_superop(G, I) + sandwich_superop(I, G)));
  }
  return dL;
}

namespace {

// Trapezoid convolution r_i = dt * sum_{j<=i} '' g_j K_{i-j} with half
// weights at both ends.
std::vector<Complex> convolve(const std::vector<double>& g, const std::vector<Complex>& K,
                              double dt) {
  const size_t n = g.size();
  std::vector<Complex> r(n, Complex(0, 0));
  for (size_t i = 1; i < n; ++i) {
    Complex acc(0, 0);
    for (size_t j = 0; j <= i; ++j) {
      const double w = (j == 0 || j == i) ? 0.5 : 1.0;
      acc += w * g[j] * K[i - j];
    }
    r[i] = dt * acc;
  }
  return r;
}

// Same endpoint integral on the every-other-point grid; Richardson error
// estimate |fine - coarse| / 3 for the trapezoid rule.
double endpoint_error(const std::vector<double>& g, const std::vector<Complex>& K,
                      double dt) {
  const size_t n = g.size();
  if (n < 5) return 0.0;
  const size_t last = (n - 1) - (n - 1) % 2;  // even index, coarse grid endpoint
  Complex fine(0, 0), coarse(0, 0);
  for (size_t j = 0; j <= last; ++j) {
    const double w = (j == 0 || j == last) ? 0.5 : 1.0;
    fine += w * g[j] * K[last - j];
  }
  for (size_t j = 0; j <= last; j += 2) {
    const double w = (j == 0 || j == last) ? 0.5 : 1.0;
    coarse += w * g[j] * K[last - j];
  }
  return std::abs(dt * fine - 2.0 * dt * coarse) / 3.0;
}

}  // namespace

ResponseSeries kubo_time_response(const SuperMat& L, const AsymptoticSpace& space,
                                  const Mat& A, const SuperMat& dL, const Mat& rho_inf,
                                  const std::function<double(double)>& g, double t0,
                                  double t1, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("kubo_time_response: n_steps < 1");
  const int n = n_steps + 1;
  const double dt = (t1 - t0) / n_steps;

  const Mat w = superop_apply(dL, rho_inf);
  const Mat A_ul = space.corners.project(A, Corner::UL);
  const Mat A_out = A - A_ul;
  const Vec vA = vectorize(A);
  const Vec vA_ul = vectorize(A_ul);
  const Vec vA_out = vectorize(A_out);

  // Kernel samples K(u) at u = k*dt via one fixed-step propagator.
  const SuperMat E = (dt * L).exp();
  Vec v = vectorize(w);                          // e^{uL} w
  Vec vq = vectorize(w - space.apply_pinf(w));   // e^{uL} Q_inf w

  const size_t ns = static_cast<size_t>(n);
  std::vector<Complex> K_tot(ns), K_in(ns), K_int(ns), K_out(ns);
  // Low-rank asymptotic part: e^{uL} P_inf w = sum e^{i Delta u} c_mu |Psi_mu>>.
  std::vector<Complex> c(size_t(space.size()));
  std::vector<Complex> aPsi(size_t(space.size()));
  for (int mu = 0; mu < space.size(); ++mu) {
    c[size_t(mu)] = hs_inner(space.J[size_t(mu)], w);
    aPsi[size_t(mu)] = hs_inner(A_ul, space.Psi[size_t(mu)]);
  }
  for (int k = 0; k < n; ++k) {
    const double u = k * dt;
    K_tot[size_t(k)] = vA.dot(v);
    Complex in(0, 0);
    for (int mu = 0; mu < space.size(); ++mu)
      in += aPsi[size_t(mu)] * c[size_t(mu)] *
            std::exp(Complex(0, space.frequencies[size_t(mu)] * u));
    K_in[size_t(k)] = in;
    K_int[size_t(k)] = vA_ul.dot(vq);
    K_out[size_t(k)] = vA_out.dot(v);
    if (k + 1 < n) {
      v = E * v;
      vq = E * vq;
    }
  }

  std::vector<double> gs(ns);
  ResponseSeries out;
  out.t.resize(size_t(n));
  for (int k = 0; k < n; ++k) {
    out.t[size_t(k)] = t0 + k * dt;
    gs[size_t(k)] = g(out.t[size_t(k)]);
  }
  out.total = convolve(gs, K_tot, dt);
  out.in_subspace = convolve(gs, K_in, dt);
  out.interference = convolve(gs, K_int, dt);
  out.outside = convolve(gs, K_out, dt);
  for (int k = 0; k < n; ++k) {
    const double r =
        std::abs(out.total[size_t(k)] - out.in_subspace[size_t(k)] -
                 out.interference[size_t(k)] - out.outside[size_t(k)]);
    out.split_residual = std::max(out.split_residual, r);
  }
  out.quadrature_error = endpoint_error(gs, K_tot, dt);
  return out;
}

FrequencyResponse frequency_response(const SuperMat& L, const Mat& A, const SuperMat& dL,
                                     const Mat& rho_inf, double omega) {
  const std::array<double, 3> eps = {1e-3, 1e-4, 1e-5};
  const Vec w = vectorize(superop_apply(dL, rho_inf));
  const Vec vA = vectorize(A);
  FrequencyResponse out;
  for (int k = 0; k < 3; ++k) {
    SuperMat M = L;
    M.diagonal().array() += Complex(0, 1) * (omega + Complex(0, 1) * eps[size_t(k)]);
    out.at_epsilon[size_t(k)] = -vA.dot(Eigen::PartialPivLU<SuperMat>(M).solve(w));
  }
  const double a01 = std::abs(out.at_epsilon[1]) / std::max(std::abs(out.at_epsilon[0]), 1e-300);
  const double a12 = std::abs(out.at_epsilon[2]) / std::max(std::abs(out.at_epsilon[1]), 1e-300);
  if (a01 > 5.0 && a12 > 5.0) {
    out.resonant = true;
    out.value = out.at_epsilon[2];
    return out;
  }
  // Neville extrapolation of the polynomial in epsilon through the 3 samples.
  std::array<Complex, 3> p = out.at_epsilon;
  for (int m = 1; m < 3; ++m)
    for (int i = 0; i < 3 - m; ++i)
      p[size_t(i)] = (eps[size_t(i + m)] * p[size_t(i)] - eps[size_t(i)] * p[size_t(i + 1)]) /
                     (eps[size_t(i + m)] - eps[size_t(i)]);
  out.value = p[0];
  return out;
}

EffectiveW effective_hamiltonian_W(const AsymptoticSpace& space, const SuperMat& dL,
                                   double tol) {
  EffectiveW out;
  const SuperMat Pp = space.Ppsi();
  out.W_super = Pp * dL * Pp;

  std::vector<int> zero_modes;
  for (int mu = 0; mu < space.size(); ++mu)
    if (space.frequencies[size_t(mu)] == 0.0) zero_modes.push_back(mu);
  const int n = int(zero_modes.size());
  out.restriction.resize(n, n);
  for (int a = 0; a < n; ++a) {
    const Mat Jul = space.J_ul(zero_modes[size_t(a)]);
    for (int b = 0; b < n; ++b)
      out.restriction(a, b) =
          hs_inner(Jul, superop_apply(dL, space.Psi[size_t(zero_modes[size_t(b)])]));
  }
  out.max_imag = out.restriction.imag().cwiseAbs().maxCoeff();
  const Eigen::MatrixXd R = out.restriction.real();
  out.antisym_residual = (R + R.transpose()).cwiseAbs().maxCoeff();
  out.unitary = out.max_imag < tol && out.antisym_residual < tol;
  return out;
}

Mat combined_X(const LindbladModel& m, const Perturbation& p) {
  const int N = m.dim();
  Mat X = Mat::Zero(N, N);
  if (p.V.size() != 0) X += p.V;
  for (const auto& jd : p.jump_deltas) {
    const Mat& F = m.jumps[size_t(jd.index)].op;
    const double kappa = m.jumps[size_t(jd.index)].rate;
    X += Complex(0, 0.5) * kappa * (F.adjoint() * jd.f - jd.f.adjoint() * F);
  }
  return X;
}

Mat effective_hamiltonian_Y(const NSStructure& ns, const LindbladModel& m,
                            const Perturbation& p, const CornerProjectors& cp) {
  const int d = ns.dfs_dim;
  const int da = ns.aux_dim;
  const Mat& U = ns.embedding;  // N x (d*da), column k*da + a
  (void)cp;
  Mat G = Mat::Zero(d * da, d * da);
  for (const auto& jd : p.jump_deltas) {
    const Mat& F = m.jumps[size_t(jd.index)].op;
    const double kappa = m.jumps[size_t(jd.index)].rate;
    const Mat Ft = U.adjoint() * F * U;
    const Mat ft = U.adjoint() * jd.f * U;
    G += Complex(0, 0.5) * kappa * (Ft.adjoint() * ft - ft.adjoint() * Ft);
  }
  // Weighted partial trace over the auxiliary factor:
  //   Y_{kk'} = sum_{a,b} G_{(k,a),(k',b)} rho_ax(b,a).
  Mat Y = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k)
    for (int kp = 0; kp < d; ++kp) {
      Complex acc(0, 0);
      for (int a = 0; a < da; ++a)
        for (int b = 0; b < da; ++b)
          acc += G(k * da + a, kp * da + b) * ns.aux_state(b, a);
      Y(k, kp) = acc;
    }
  return Y;
}

SuperMat complement_inverse(const BlockDecomposition& decomp) {
  const auto& d = decomp;
  const int nc = int(d.L_coh.rows());
  const int nl = int(d.L_lr.rows());
  Eigen::MatrixXcd M(nc + nl, nc + nl);
  M.setZero();
  M.topLeftCorner(nc, nc) = d.L_coh;
  M.topRightCorner(nc, nl) = d.C_coh_lr;
  M.bottomRightCorner(nl, nl) = d.L_lr;
  const Eigen::MatrixXcd Minv = M.partialPivLu().inverse();
  Eigen::MatrixXcd B(d.B_coh.rows(), nc + nl);
  B << d.B_coh, d.B_lr;
  return B * Minv * B.adjoint();
}

Leakage leakage(const SuperMat& L, const AsymptoticSpace& space,
                const BlockDecomposition& decomp, const SuperMat& dL, const Mat& rho_inf) {
  const Vec w = vectorize(superop_apply(dL, rho_inf));
  Leakage out;
  out.via_drazin = -(drazin_inverse(L, space) * w);

  const auto& d = decomp;
  const int nc = int(d.L_coh.rows());
  const int nl = int(d.L_lr.rows());
  Eigen::MatrixXcd M(nc + nl, nc + nl);
  M.setZero();
  M.topLeftCorner(nc, nc) = d.L_coh;
  M.topRightCorner(nc, nl) = d.C_coh_lr;
  M.bottomRightCorner(nl, nl) = d.L_lr;
  Eigen::MatrixXcd B(d.B_coh.rows(), nc + nl);
  B << d.B_coh, d.B_lr;
  const Eigen::VectorXcd y = M.partialPivLu().solve(Eigen::VectorXcd(-(B.adjoint() * w)));
  out.via_compression = B * y;

  // The two routes must agree outside the UL block.
  const Vec drazin_comp = B * (B.adjoint() * out.via_drazin);
  out.mismatch = (drazin_comp - out.via_compression).norm();
  return out;
}

SecondOrder second_order_term(const SuperMat& L, const AsymptoticSpace& space,
                              const BlockDecomposition& decomp, const SuperMat& dL) {
  SecondOrder out;
  const SuperMat D = drazin_inverse(L, space);
  const SuperMat Pinf = space.Pinf();
  out.full = Pinf * dL * D * dL * Pinf;
  out.reduced = Pinf * dL * complement_inverse(decomp) * dL * space.Ppsi();
  // The two routes agree as maps on As(H); compare their action there.
  out.mismatch = ((out.full - out.reduced) * Pinf).norm();
  return out;
}

}  // namespace lbt
