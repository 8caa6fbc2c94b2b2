// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#ifndef KRAUSFLOW_CARTAN_HPP
#define KRAUSFLOW_CARTAN_HPP

#include <cmath>
#include <stdexcept>

#include "krausflow/algebra.hpp"

namespace krausflow {

/// Cartan (singular-value) form K = V e^{a Jz} U with V, U in SU(2) and
/// a >= 0.  Gauge convention: when a > 0 the (1,1) entry of U is real and
/// nonnegative (falling back to the (1,2) entry if the (1,1) entry vanishes);
/// at a = 0 the decomposition degenerates and we set U = I, V = K.
struct CartanForm {
  Mat2 V = Mat2::Identity();
  double a = 0.0;
  Mat2 U = Mat2::Identity();
};

inline Mat2 recompose(const CartanForm& f) {
  Mat2 ea = Mat2::Zero();
  ea(0, 0) = std::exp(0.5 * f.a);
  ea(1, 1) = std::exp(-0.5 * f.a);
  return f.V * ea * f.U;
}

namespace detail {

/// Nearest SU(2) element, via the quaternion components of a 2x2 matrix.
inline Mat2 project_su2(const Mat2& v) {
  const Complex alpha = 0.5 * (v(0, 0) + std::conj(v(1, 1)));
  const Complex beta = 0.5 * (v(1, 0) - std::conj(v(0, 1)));
  const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
  Mat2 out;
  out(0, 0) = alpha / n;
  out(1, 0) = beta / n;
  out(0, 1) = -std::conj(beta) / n;
  out(1, 1) = std::conj(alpha) / n;
  return out;
}

/// Applies the gauge transform U -> e^{i chi Jz} U, V -> V e^{-i chi Jz}
/// that makes the reference entry of U real and nonnegative.
inline void fix_gauge(Mat2& v, Mat2& u) {
  Complex ref = u(0, 0);
  if (std::abs(ref) < 1e-12) ref = u(0, 1);
  if (std::abs(ref) == 0.0) return;
  // e^{i chi Jz} = diag(p, conj(p)) with p = e^{i chi/2}; pick p to cancel
  // the phase of the reference entry (which lives in the first row of U)
  const Complex p = std::polar(1.0, -std::arg(ref));
  Mat2 gz = Mat2::Zero(), gzi = Mat2::Zero();
  gz(0, 0) = p;
  gz(1, 1) = std::conj(p);
  gzi(0, 0) = std::conj(p);
  gzi(1, 1) = p;
  u = gz * u;
  v = v * gzi;
}

}  // namespace detail

/// Decomposes K in SL(2,C) into its Cartan form.  The radial coordinate is
/// read from the eigenvalues e^{+-a} of E = K^dag K; the large eigenvalue is
/// computed without cancellation, so a stays accurate for a >> 1.
inline CartanForm cartan_decompose(const Mat2& k) {
  require_finite(k, "cartan_decompose");
  const Complex det = det2(k);
  // storing entries of size e^{a/2} floors the representable det deviation
  // at ~eps * e^a; the 1e-8 precondition applies above that floor
  const double det_floor = 32.0 * std::numeric_limits<double>::epsilon() * k.squaredNorm();
  if (std::abs(det - 1.0) > 1e-8 + det_floor)
    throw std::invalid_argument("cartan_decompose: det K must be 1 to 1e-8");

  // E = K^dag K, Hermitian positive with det |det K|^2
  const double p = std::norm(k(0, 0)) + std::norm(k(1, 0));
  const double r = std::norm(k(0, 1)) + std::norm(k(1, 1));
  const Complex q = std::conj(k(0, 0)) * k(0, 1) + std::conj(k(1, 0)) * k(1, 1);

  const double half_gap = 0.5 * (p - r);
  const double root = std::sqrt(half_gap * half_gap + std::norm(q));
  const double lam1 = 0.5 * (p + r) + root;

  CartanForm f;
  // lam1 = sigma_max^2 = e^a; sigma_max sigma_min = 1 by the det precondition,
  // so the large eigenvalue alone fixes a without amplifying roundoff
  f.a = std::log(lam1);
  if (f.a < 1e-13) {  // degenerate: any U works, pick U = I
    f.a = std::max(f.a, 0.0);
    f.U = Mat2::Identity();
    f.V = detail::project_su2(k);
    return f;
  }

  // dominant eigenvector of E, stable branch
  Complex alpha, beta;
  if (std::norm(q) + (lam1 - p) * (lam1 - p) >= std::norm(q) + (lam1 - r) * (lam1 - r)) {
    alpha = q;
    beta = Complex(lam1 - p, 0);
  } else {
    alpha = Complex(lam1 - r, 0);
    beta = std::conj(q);
  }
  const double nv = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (nv == 0.0) {
    alpha = 1.0;
    beta = 0.0;
  } else {
    alpha /= nv;
    beta /= nv;
  }
  // Q = [[alpha, -conj(beta)], [beta, conj(alpha)]] is in SU(2) and
  // diagonalizes E with the large eigenvalue first; U = Q^dag.
  Mat2 u;
  u(0, 0) = std::conj(alpha);
  u(0, 1) = std::conj(beta);
  u(1, 0) = -beta;
  u(1, 1) = alpha;

  Mat2 ea_inv = Mat2::Zero();
  ea_inv(0, 0) = std::exp(-0.5 * f.a);
  ea_inv(1, 1) = std::exp(0.5 * f.a);
  Mat2 v = k * u.adjoint() * ea_inv;
  v = detail::project_su2(v);

  detail::fix_gauge(v, u);
  f.U = u;
  f.V = v;
  return f;
}

/// Polar form K = W sqrt(E), W = VU unitary and sqrt(E) = U^dag e^{a Jz} U.
struct PolarForm {
  Mat2 W = Mat2::Identity();
  Mat2 sqrtE = Mat2::Identity();
};

inline PolarForm polar_decompose(const Mat2& k) {
  const CartanForm f = cartan_decompose(k);
  PolarForm p;
  p.W = f.V * f.U;
  Mat2 ea = Mat2::Zero();
  ea(0, 0) = std::exp(0.5 * f.a);
  ea(1, 1) = std::exp(-0.5 * f.a);
  p.sqrtE = f.U.adjoint() * ea * f.U;
  return p;
}

/// POVM element E = K^dag K; Hermitian positive with eigenvalues e^{+-a}.
inline Mat2 povm_element(const Mat2& k) {
  require_finite(k, "povm_element");
  return k.adjoint() * k;
}

/// Purity P_E = lambda_2 / lambda_1 = e^{-2a}, representation independent.
inline double purity(double a) {
  if (a < 0) throw std::invalid_argument("purity: a must be nonnegative");
  return std::exp(-2.0 * a);
}

/// Ratio of the top two eigenvalues of the lifted POVM element
/// U^dag e^{2a Jz^(j)} U; equals e^{-2a} for every j (used as a check).
inline double purity_lifted_ratio(double a, const Mat2& u, const SpinRep& rep) {
  const MatX uj = su2_lift(u, rep);
  MatX e2a = MatX::Zero(rep.dim, rep.dim);
  for (int i = 0; i < rep.dim; ++i) e2a(i, i) = std::exp(2.0 * a * rep.m_value(i));
  const MatX e = uj.adjoint() * e2a * uj;
  Eigen::SelfAdjointEigenSolver<MatX> es(e);
  const auto& lam = es.eigenvalues();
  return lam(rep.dim - 2) / lam(rep.dim - 1);
}

/// Bloch axis of the POVM element: n with U^dag (sigma.z) U = sigma.n,
/// components in (z,x,y) order.  Invariant under U -> e^{i chi Jz} U.
inline FrameVec povm_direction(const Mat2& u) {
  const Mat2 m = u.adjoint() * pauli_z() * u;
  FrameVec n;
  n[kZ] = m(0, 0).real();
  n[kX] = m(1, 0).real();
  n[kY] = m(1, 0).imag();
  return n / n.norm();
}

/// Direction the postmeasurement unitary maps z to: V (sigma.z) V^dag = sigma.n.
inline FrameVec v_direction(const Mat2& v) {
  const Mat2 m = v * pauli_z() * v.adjoint();
  FrameVec n;
  n[kZ] = m(0, 0).real();
  n[kX] = m(1, 0).real();
  n[kY] = m(1, 0).imag();
  return n / n.norm();
}

/// Log-domain singular values of the lifted Kraus operator: a*m, m = j..-j.
inline std::vector<double> lifted_log_singular_values(const CartanForm& f, const SpinRep& rep) {
  std::vector<double> out(rep.dim);
  for (int i = 0; i < rep.dim; ++i) out[i] = f.a * rep.m_value(i);
  return out;
}

/// Lifts the Cartan form to spin j: su2_lift(V) e^{a Jz^(j)} su2_lift(U).
/// Fails when a*j > 300; entries would overflow and callers must fall back
/// to lifted_log_singular_values.
inline MatX lift_kraus(const CartanForm& f, const SpinRep& rep) {
  if (f.a * rep.j > 300.0)
    throw std::domain_error("lift_kraus: a*j > 300, matrix entries overflow; "
                            "use lifted_log_singular_values");
  const MatX vj = su2_lift(f.V, rep);
  const MatX uj = su2_lift(f.U, rep);
  MatX ea = MatX::Zero(rep.dim, rep.dim);
  for (int i = 0; i < rep.dim; ++i) ea(i, i) = std::exp(f.a * rep.m_value(i));
  return vj * ea * uj;
}

/// Lifted POVM element e^{2a n.J^(j)} built directly from the gauge
/// invariants (a, n).  Closed forms for j <= 1, eigendecomposition above.
inline MatX lifted_povm_element(double a, const FrameVec& n, const SpinRep& rep) {
  if (rep.dim == 2) {
    Mat2 out = std::sinh(a) * 2.0 * jdot(n);
    const double ch = std::cosh(a);
    out(0, 0) += ch;
    out(1, 1) += ch;
    return out;
  }
  const MatX nj = n[kZ] * rep.Jz + n[kX] * rep.Jx + n[kY] * rep.Jy;
  if (rep.dim == 3) {
    // spin 1: (n.J)^3 = n.J, so e^{2a n.J} = I + sinh(2a) n.J + (cosh(2a)-1) (n.J)^2
    const MatX nj2 = nj * nj;
    return MatX::Identity(3, 3) + std::sinh(2.0 * a) * nj + (std::cosh(2.0 * a) - 1.0) * nj2;
  }
  return exp_hermitian(nj, Complex(2.0 * a, 0));
}

}  // namespace krausflow

#endif
