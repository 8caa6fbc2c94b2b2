// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#ifndef KRAUSFLOW_TRAJECTORY_HPP
#define KRAUSFLOW_TRAJECTORY_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "krausflow/algebra.hpp"
#include "krausflow/cartan.hpp"
#include "krausflow/rng.hpp"

namespace krausflow {

/// Simulation parameters for one run.  gamma*dt <= 0.01 keeps every step in
/// the weak-measurement regime.
struct SimConfig {
  double gamma = 1.0;
  double dt = 1e-3;
  double T = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> checkpoint_times;

  void validate() const {
    if (!(gamma > 0) || !(dt > 0) || !(T >= 0))
      throw std::invalid_argument("SimConfig: gamma, dt must be positive, T nonnegative");
    if (gamma * dt > 0.01)
      throw std::invalid_argument("SimConfig: gamma*dt must be <= 0.01 (weak-measurement regime)");
    const double steps = T / dt;
    if (steps > 2e9) throw std::invalid_argument("SimConfig: T/dt overflows step counter");
  }
  std::int64_t n_steps() const { return std::llround(T / dt); }
};

/// Seeded, time-discretized 3-component Wiener increments.  Components are
/// stored in (z,x,y) order and drawn in that order, i.i.d. N(0, dt).
struct WienerPath {
  double dt = 0;
  std::uint64_t seed = 0;
  std::vector<FrameVec> increments;
};

inline WienerPath sample_wiener_path(const SimConfig& config) {
  config.validate();
  WienerPath p;
  p.dt = config.dt;
  p.seed = config.seed;
  const std::int64_t n = config.n_steps();
  p.increments.resize(n);
  GaussianStream g(config.seed);
  const double s = std::sqrt(config.dt);
  for (std::int64_t i = 0; i < n; ++i) {
    p.increments[i][kZ] = s * g.next();
    p.increments[i][kX] = s * g.next();
    p.increments[i][kY] = s * g.next();
  }
  return p;
}

/// Pairwise-summed path at twice the step (for strong-convergence studies).
inline WienerPath coarsen(const WienerPath& fine) {
  if (fine.increments.size() % 2 != 0)
    throw std::invalid_argument("coarsen: need an even number of increments");
  WienerPath c;
  c.dt = 2.0 * fine.dt;
  c.seed = fine.seed;
  c.increments.resize(fine.increments.size() / 2);
  for (std::size_t i = 0; i < c.increments.size(); ++i)
    c.increments[i] = fine.increments[2 * i] + fine.increments[2 * i + 1];
  return c;
}

/// A point of the Kraus trajectory: 2x2 complex, det = 1.
struct KrausPoint {
  Mat2 m = Mat2::Identity();

  Complex det() const { return det2(m); }
  /// Rescales by det^{-1/2}; applied periodically to stop roundoff drift.
  void renormalize_det() {
    const Complex s = Complex(1.0, 0.0) / std::sqrt(det());
    m *= s;
  }
};

/// One weak-measurement step: K' = exp(sqrt(gamma) J.dW) K via the
/// closed-form 2x2 exponential; stays in SL(2,C) exactly.
inline KrausPoint step_kraus(const KrausPoint& k, const FrameVec& dw, double gamma) {
  if (!dw.allFinite()) throw std::invalid_argument("step_kraus: non-finite increment");
  const double sg = std::sqrt(gamma);
  // X = sqrt(gamma) J.dW is Hermitian traceless with s = sqrt(gamma)|dW|/2
  const double s = 0.5 * sg * dw.norm();
  double ch, shs;
  if (s < 1e-4) {
    const double s2 = s * s;
    ch = 1.0 + s2 * (0.5 + s2 / 24.0);
    shs = 1.0 + s2 * (1.0 / 6.0 + s2 / 120.0);
  } else {
    ch = std::cosh(s);
    shs = std::sinh(s) / s;
  }
  const double hz = 0.5 * sg * dw[kZ] * shs;
  const Complex hp = Complex(0.5 * sg * dw[kX], -0.5 * sg * dw[kY]) * shs;
  // E = ch*I + shs*X ; K' = E*K
  const Complex e00(ch + hz, 0), e11(ch - hz, 0);
  const Complex e01 = hp, e10 = std::conj(hp);
  KrausPoint out;
  out.m(0, 0) = e00 * k.m(0, 0) + e01 * k.m(1, 0);
  out.m(0, 1) = e00 * k.m(0, 1) + e01 * k.m(1, 1);
  out.m(1, 0) = e10 * k.m(0, 0) + e11 * k.m(1, 0);
  out.m(1, 1) = e10 * k.m(0, 1) + e11 * k.m(1, 1);
  return out;
}

inline constexpr int kDetRenormInterval = 1024;

/// Ordered product of per-step exponentials over the path (newest factor
/// leftmost), snapshotted at the requested checkpoint times.  Determinant
/// renormalization fires every kDetRenormInterval steps of this call,
/// independent of checkpoint placement.
inline std::vector<KrausPoint> integrate_kraus(const WienerPath& path, double gamma,
                                               const std::vector<double>& checkpoints,
                                               const KrausPoint& k0 = KrausPoint{}) {
  const std::int64_t n = static_cast<std::int64_t>(path.increments.size());
  std::vector<std::int64_t> cp_steps;
  cp_steps.reserve(checkpoints.size());
  for (double t : checkpoints) {
    const std::int64_t idx = std::llround(t / path.dt);
    if (idx < 0 || idx > n || std::abs(idx * path.dt - t) > 0.5 * path.dt)
      throw std::invalid_argument("integrate_kraus: checkpoint outside [0,T] or off-grid");
    cp_steps.push_back(idx);
  }
  std::vector<KrausPoint> out(checkpoints.size());
  KrausPoint k = k0;
  for (std::size_t c = 0; c < cp_steps.size(); ++c)
    if (cp_steps[c] == 0) out[c] = k;
  for (std::int64_t i = 0; i < n; ++i) {
    k = step_kraus(k, path.increments[i], gamma);
    if ((i + 1) % kDetRenormInterval == 0) k.renormalize_det();
    for (std::size_t c = 0; c < cp_steps.size(); ++c)
      if (cp_steps[c] == i + 1) out[c] = k;
  }
  return out;
}

/// || (dK K^-1 - (dK K^-1)^2/2) - sqrt(gamma) J.dW ||_max for one step;
/// the remainder is the third-order tail of the exponential, O(dt^{3/2}).
inline double mmcsd_residual(const KrausPoint& k, const KrausPoint& k_next,
                             const FrameVec& dw, double gamma, double /*dt*/) {
  const Mat2 kinv = k.m.inverse();
  const Mat2 dkk = (k_next.m - k.m) * kinv;
  const Mat2 mmcsd = dkk - 0.5 * dkk * dkk;
  const Mat2 target = std::sqrt(gamma) * jdot(dw);
  return (mmcsd - target).cwiseAbs().maxCoeff();
}

/// One step of the anisotropic variant: rates gamma_mu = gamma (1 + eps_mu)
/// with the eps summing to zero.  K stays in SL(2,C); the representation-
/// dependent factor A picks up exp(-eps gamma dt K_j^-1 Q K_j) with
/// eps.Q = sum_mu eps_mu (J_mu^(j))^2.
struct AnisotropicState {
  KrausPoint K;
  MatX A;
};

inline AnisotropicState anisotropic_step(const KrausPoint& k, const MatX& a_corr,
                                         const FrameVec& dw, double gamma,
                                         const FrameVec& eps, const SpinRep& rep,
                                         double dt) {
  if (std::abs(eps.sum()) > 1e-12)
    throw std::invalid_argument("anisotropic_step: anisotropies must sum to zero");
  FrameVec scaled;
  for (int mu = 0; mu < 3; ++mu) scaled[mu] = std::sqrt(gamma * (1.0 + eps[mu])) * dw[mu];
  AnisotropicState out;
  out.K.m = exp_traceless2(jdot(scaled)) * k.m;

  MatX q = MatX::Zero(rep.dim, rep.dim);
  for (int mu = 0; mu < 3; ++mu) q += eps[mu] * (rep.axis(mu) * rep.axis(mu));
  if (q.cwiseAbs().maxCoeff() < 1e-15) {
    out.A = a_corr;  // eps.Q = 0 (e.g. any eps at j = 1/2): A never moves
    return out;
  }
  const CartanForm f = cartan_decompose(out.K.m);
  const MatX uj = su2_lift(f.U, rep);
  const MatX vj = su2_lift(f.V, rep);
  MatX ea = MatX::Zero(rep.dim, rep.dim), ea_inv = MatX::Zero(rep.dim, rep.dim);
  for (int i = 0; i < rep.dim; ++i) {
    ea(i, i) = std::exp(f.a * rep.m_value(i));
    ea_inv(i, i) = std::exp(-f.a * rep.m_value(i));
  }
  const MatX kj = vj * ea * uj;
  const MatX kj_inv = uj.adjoint() * ea_inv * vj.adjoint();
  const MatX gen = -gamma * dt * (kj_inv * q * kj);
  out.A = mat_exp(gen) * a_corr;
  return out;
}

/// Monte Carlo check of the single-observable superoperator against the
/// analytic dephasing map rho_mn -> exp(-gamma t (m-n)^2 / 2) rho_mn.
/// Samples L(W) = exp(sqrt(gamma) W Jz - gamma t Jz^2) with W ~ N(0, t).
inline double single_observable_superop_check(const SpinRep& rep, double gamma, double t,
                                              const MatX& rho, std::int64_t n_samples,
                                              std::uint64_t seed = 7) {
  if (rho.rows() != rep.dim || rho.cols() != rep.dim)
    throw std::invalid_argument("superop_check: rho has wrong dimension");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("superop_check: rho not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10)
    throw std::invalid_argument("superop_check: rho not trace one");
  Eigen::SelfAdjointEigenSolver<MatX> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("superop_check: rho not positive semidefinite");

  const double sg = std::sqrt(gamma);
  MatX acc = MatX::Zero(rep.dim, rep.dim);
  GaussianStream g(seed);
  Eigen::VectorXd diag(rep.dim);
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const double w = std::sqrt(t) * g.next();
    for (int i = 0; i < rep.dim; ++i) {
      const double m = rep.m_value(i);
      diag(i) = std::exp(sg * w * m - gamma * t * m * m);
    }
    // L rho L^dag with L real diagonal
    for (int i = 0; i < rep.dim; ++i)
      for (int jcol = 0; jcol < rep.dim; ++jcol)
        acc(i, jcol) += diag(i) * diag(jcol) * rho(i, jcol);
  }
  acc /= static_cast<double>(n_samples);

  MatX expect(rep.dim, rep.dim);
  for (int i = 0; i < rep.dim; ++i)
    for (int jcol = 0; jcol < rep.dim; ++jcol) {
      const double diff = rep.m_value(i) - rep.m_value(jcol);
      expect(i, jcol) = rho(i, jcol) * std::exp(-0.5 * gamma * t * diff * diff);
    }
  return (acc - expect).cwiseAbs().maxCoeff();
}

}  // namespace krausflow

#endif
