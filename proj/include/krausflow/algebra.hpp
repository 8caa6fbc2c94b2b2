// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#ifndef KRAUSFLOW_ALGEBRA_HPP
#define KRAUSFLOW_ALGEBRA_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace krausflow {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3d;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

/// 3-vectors attached to the su(2) frame carry their components in the
/// index order (z, x, y); the same ordering is used for every 3x3 frame
/// and rotation matrix in this library.
using FrameVec = Eigen::Vector3d;
inline constexpr int kZ = 0;
inline constexpr int kX = 1;
inline constexpr int kY = 2;

/// Levi-Civita symbol on (z,x,y) indices; (z,x,y) is a cyclic relabeling of
/// (x,y,z), so eps(0,1,2) = +1 and [J_mu, J_nu] = i eps(mu,nu,beta) J_beta.
inline double epsilon3(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
}

/// ad - bc for complex 2x2 entries, with FMA-compensated products so the
/// result keeps full relative accuracy even when the products cancel
/// (entries of a Kraus operator grow like e^{a/2} while its determinant
/// stays at 1, so the naive difference loses ~e^{2a} ulps).
inline Complex det2_compensated(const Complex& a, const Complex& b, const Complex& c,
                                const Complex& d) {
  double head_re[4] = {a.real() * d.real(), -(a.imag() * d.imag()),
                       -(b.real() * c.real()), b.imag() * c.imag()};
  double tail_re[4] = {std::fma(a.real(), d.real(), -head_re[0]),
                       -std::fma(a.imag(), d.imag(), head_re[1]),
                       -std::fma(b.real(), c.real(), head_re[2]),
                       std::fma(b.imag(), c.imag(), -head_re[3])};
  double head_im[4] = {a.real() * d.imag(), a.imag() * d.real(),
                       -(b.real() * c.imag()), -(b.imag() * c.real())};
  double tail_im[4] = {std::fma(a.real(), d.imag(), -head_im[0]),
                       std::fma(a.imag(), d.real(), -head_im[1]),
                       -std::fma(b.real(), c.imag(), head_im[2]),
                       -std::fma(b.imag(), c.real(), head_im[3])};
  auto neumaier = [](const double* h, const double* t) {
    double s = 0.0, comp = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double x = h[i];
      const double tmp = s + x;
      comp += (std::abs(s) >= std::abs(x)) ? (s - tmp) + x : (x - tmp) + s;
      s = tmp;
    }
    for (int i = 0; i < 4; ++i) comp += t[i];
    return s + comp;
  };
  return {neumaier(head_re, tail_re), neumaier(head_im, tail_im)};
}

inline Complex det2(const Mat2& m) {
  return det2_compensated(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

inline const Mat2& pauli_x() {
  static const Mat2 m = (Mat2() << 0, 1, 1, 0).finished();
  return m;
}
inline const Mat2& pauli_y() {
  static const Mat2 m = (Mat2() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  return m;
}
inline const Mat2& pauli_z() {
  static const Mat2 m = (Mat2() << 1, 0, 0, -1).finished();
  return m;
}

/// Defining-representation generator J_mu = sigma_mu / 2, mu in (z,x,y).
inline const Mat2& jdef(int mu) {
  static const Mat2 jz = 0.5 * pauli_z();
  static const Mat2 jx = 0.5 * pauli_x();
  static const Mat2 jy = 0.5 * pauli_y();
  switch (mu) {
    case kZ: return jz;
    case kX: return jx;
    default: return jy;
  }
}

/// J . w in the defining representation, w in (z,x,y) order.
inline Mat2 jdot(const FrameVec& w) {
  Mat2 m;
  m(0, 0) = Complex(0.5 * w[kZ], 0);
  m(1, 1) = Complex(-0.5 * w[kZ], 0);
  m(0, 1) = Complex(0.5 * w[kX], -0.5 * w[kY]);
  m(1, 0) = Complex(0.5 * w[kX], 0.5 * w[kY]);
  return m;
}

/// A spin-j irreducible representation of su(2).
struct SpinRep {
  double j = 0;
  int dim = 0;
  MatX Jz, Jx, Jy;
  double casimir = 0;  // j(j+1)
  double dynkin = 0;   // lambda_j = 3/(j(j+1)(2j+1))

  const MatX& axis(int mu) const {
    switch (mu) {
      case kZ: return Jz;
      case kX: return Jx;
      default: return Jy;
    }
  }
  /// m-values j, j-1, ..., -j in basis order.
  double m_value(int row) const { return j - row; }
};

/// Builds the spin-j representation from ladder operators,
/// <m+1|J+|m> = sqrt(j(j+1) - m(m+1)); basis ordered m = j..-j.
inline SpinRep build_spin_rep(double j) {
  const double two_j = 2.0 * j;
  if (!(two_j > 0.0) || std::abs(two_j - std::round(two_j)) > 1e-12)
    throw std::invalid_argument("build_spin_rep: j must be a positive half-integer");
  if (j > 25.0)
    throw std::invalid_argument("build_spin_rep: j capped at 25 (exp overflow guard)");

  SpinRep rep;
  rep.j = j;
  rep.dim = static_cast<int>(std::lround(two_j)) + 1;
  rep.casimir = j * (j + 1.0);
  rep.dynkin = 3.0 / (j * (j + 1.0) * (two_j + 1.0));

  MatX jplus = MatX::Zero(rep.dim, rep.dim);
  rep.Jz = MatX::Zero(rep.dim, rep.dim);
  for (int r = 0; r < rep.dim; ++r) rep.Jz(r, r) = rep.m_value(r);
  for (int r = 1; r < rep.dim; ++r) {
    const double m = rep.m_value(r);  // J+ |m> = c |m+1>, row r-1 <- col r
    jplus(r - 1, r) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const MatX jminus = jplus.adjoint();
  rep.Jx = 0.5 * (jplus + jminus);
  rep.Jy = Complex(0, -0.5) * (jplus - jminus);
  return rep;
}

inline void require_finite(const MatX& x, const char* who) {
  if (!x.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

/// Closed-form exponential of a traceless 2x2 matrix:
/// e^X = cosh(s) I + sinh(s)/s X with s^2 = -det X.
inline Mat2 exp_traceless2(const Mat2& x) {
  const Complex s2 = -(x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0));
  const Complex s = std::sqrt(s2);
  Complex ch, shs;
  if (std::abs(s) < 1e-4) {
    // series in s^2; keeps full precision through s = 0
    ch = 1.0 + s2 * (0.5 + s2 * (1.0 / 24.0 + s2 / 720.0));
    shs = 1.0 + s2 * (1.0 / 6.0 + s2 * (1.0 / 120.0 + s2 / 5040.0));
  } else {
    ch = std::cosh(s);
    shs = std::sinh(s) / s;
  }
  Mat2 r = shs * x;
  r(0, 0) += ch;
  r(1, 1) += ch;
  return r;
}

/// e^{scale * H} for Hermitian H, via eigendecomposition.
inline MatX exp_hermitian(const MatX& h, Complex scale) {
  Eigen::SelfAdjointEigenSolver<MatX> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("exp_hermitian: eigensolver failed");
  const VecX phases = (scale * es.eigenvalues().cast<Complex>().array()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// General matrix exponential. 2x2 traceless inputs use the closed form;
/// everything else goes through Eigen's scaling-and-squaring Pade.
inline MatX mat_exp(const MatX& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("mat_exp: non-square input");
  require_finite(x, "mat_exp");
  if (x.rows() == 2 && std::abs(x(0, 0) + x(1, 1)) < 1e-14) {
    Mat2 x2 = x;
    return exp_traceless2(x2);
  }
  return x.exp();
}

inline bool is_special_unitary(const Mat2& v, double tol) {
  const double udev = (v.adjoint() * v - Mat2::Identity()).cwiseAbs().maxCoeff();
  const Complex det = v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0);
  return udev <= tol && std::abs(det - 1.0) <= tol;
}

/// SO(3) matrix R with V J_mu V^-1 = J_nu R^nu_mu, indices ordered (z,x,y).
inline Mat3 adjoint_rotation(const Mat2& v) {
  if (!is_special_unitary(v, 1e-10))
    throw std::invalid_argument("adjoint_rotation: input not special-unitary to 1e-10");
  Mat3 r;
  for (int mu = 0; mu < 3; ++mu) {
    const Mat2 m = v * jdef(mu) * v.adjoint();
    for (int nu = 0; nu < 3; ++nu)
      r(nu, mu) = 2.0 * (jdef(nu).cwiseProduct(m.transpose())).sum().real();  // 2 tr(J_nu M)
  }
  return r;
}

struct AxisAngle {
  double theta = 0;    // in [0, 2pi]
  FrameVec axis;       // (z,x,y) components, unit norm when theta > 0
};

/// Axis-angle of V = exp(-i theta n.J), read off the Pauli expansion
/// V = cos(theta/2) I - i sin(theta/2) n.sigma.
inline AxisAngle axis_angle(const Mat2& v) {
  AxisAngle out;
  const double c = 0.5 * (v(0, 0) + v(1, 1)).real();
  FrameVec s_axis;
  s_axis[kZ] = -0.5 * (v(0, 0) - v(1, 1)).imag();
  s_axis[kX] = -v(1, 0).imag();
  s_axis[kY] = v(1, 0).real();
  const double s = s_axis.norm();
  out.theta = 2.0 * std::atan2(s, c);
  if (s > 1e-150) {
    out.axis = s_axis / s;
  } else {
    out.axis = FrameVec::Zero();
    out.axis[kZ] = 1.0;  // angle 0 or 2pi: axis immaterial
  }
  return out;
}

/// Lifts V in SU(2) to the spin-j representation, exp(-i theta n.J^(j)).
inline MatX su2_lift(const Mat2& v, const SpinRep& rep) {
  if (!is_special_unitary(v, 1e-8))
    throw std::invalid_argument("su2_lift: input not special-unitary");
  const AxisAngle aa = axis_angle(v);
  if (aa.theta == 0.0) return MatX::Identity(rep.dim, rep.dim);
  const MatX h = aa.axis[kZ] * rep.Jz + aa.axis[kX] * rep.Jx + aa.axis[kY] * rep.Jy;
  return exp_hermitian(h, Complex(0, -aa.theta));
}

/// Verifies the Cartan-Weyl relations [Jz,J+-] = +-J+-, [J+,J-] = 2Jz and the
/// parabolic identity e^{J+ x} J- e^{-J+ x} = J- + 2x Jz - x^2 J+ at sampled x.
/// Returns the largest entrywise residual.
inline double cartan_weyl_check(const SpinRep& rep,
                                const std::vector<double>& xs = {0.0, 0.5, 1.7}) {
  const MatX jp = rep.Jx + Complex(0, 1) * rep.Jy;
  const MatX jm = rep.Jx - Complex(0, 1) * rep.Jy;
  double worst = 0.0;
  auto track = [&worst](const MatX& m) {
    worst = std::max(worst, m.cwiseAbs().maxCoeff());
  };
  track(rep.Jz * jp - jp * rep.Jz - jp);
  track(rep.Jz * jm - jm * rep.Jz + jm);
  track(jp * jm - jm * jp - 2.0 * rep.Jz);
  for (double x : xs) {
    const MatX ex = mat_exp(x * jp);
    const MatX exi = mat_exp(-x * jp);
    track(ex * jm * exi - (jm + 2.0 * x * rep.Jz - x * x * jp));
  }
  return worst;
}

}  // namespace krausflow

#endif
