// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#ifndef KRAUSFLOW_GEOMETRY_HPP
#define KRAUSFLOW_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "krausflow/algebra.hpp"

namespace krausflow {

/// Frame matrices of the Cartan decomposition at radial coordinate a, all in
/// (z,x,y) index order:
///   C = diag(1, cosh a, cosh a)        cosh(ad_A) block
///   S = eps_{z.}^. sinh a              sinh(ad_A) block
///   P = diag(1, 0, 0)                  radial projector
///   G = S + P,  omega = C - P
///   g = G^T G = diag(1, sinh^2 a, sinh^2 a)   3-hyperboloid metric
struct FrameMatrices {
  double a = 0;
  Mat3 C, S, P, G, omega, g;
};

inline FrameMatrices frame_matrices(double a) {
  if (a < 0) throw std::invalid_argument("frame_matrices: a must be nonnegative");
  FrameMatrices f;
  f.a = a;
  const double ch = std::cosh(a), sh = std::sinh(a);
  f.C = Mat3::Identity();
  f.C(kX, kX) = ch;
  f.C(kY, kY) = ch;
  f.S = Mat3::Zero();
  for (int mu = 0; mu < 3; ++mu)
    for (int al = 0; al < 3; ++al) f.S(mu, al) = epsilon3(kZ, al, mu) * sh;
  f.P = Mat3::Zero();
  f.P(kZ, kZ) = 1.0;
  f.G = f.S + f.P;
  f.omega = f.C - f.P;
  // metric both ways: congruence G^T kappa G (kappa = identity) and closed form
  f.g = f.G.transpose() * f.G;
  Mat3 closed = Mat3::Zero();
  closed(kZ, kZ) = 1.0;
  closed(kX, kX) = sh * sh;
  closed(kY, kY) = sh * sh;
  if ((f.g - closed).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, sh * sh))
    throw std::runtime_error("frame_matrices: metric routes disagree");
  return f;
}

/// Residual of e^{a Jz} L_alpha e^{-a Jz} = L_b C^b_alpha + J_mu S^mu_alpha
/// in the given representation (L_b = -i J_b).
inline double euler_conjugation_check(double a, const SpinRep& rep) {
  const FrameMatrices f = frame_matrices(a);
  MatX ea = MatX::Zero(rep.dim, rep.dim), ea_inv = MatX::Zero(rep.dim, rep.dim);
  for (int i = 0; i < rep.dim; ++i) {
    ea(i, i) = std::exp(a * rep.m_value(i));
    ea_inv(i, i) = std::exp(-a * rep.m_value(i));
  }
  const Complex mi(0, -1);
  double worst = 0;
  for (int al = 0; al < 3; ++al) {
    const MatX lhs = ea * (mi * rep.axis(al)) * ea_inv;
    MatX rhs = MatX::Zero(rep.dim, rep.dim);
    for (int b = 0; b < 3; ++b) rhs += (mi * rep.axis(b)) * f.C(b, al);
    for (int mu = 0; mu < 3; ++mu) rhs += rep.axis(mu) * f.S(mu, al);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Killing-form normalization: lambda_j tr(J_mu J_nu) = delta_mn, and the
/// structure-constant contraction (1/2) eps_{m a b} eps_n^{a b} = delta_mn.
inline double killing_form_check(const SpinRep& rep) {
  double worst = 0;
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) {
      const double want = (mu == nu) ? 1.0 : 0.0;
      const double tr = (rep.axis(mu) * rep.axis(nu)).trace().real();
      worst = std::max(worst, std::abs(rep.dynkin * tr - want));
      double contraction = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) contraction += epsilon3(mu, a, b) * epsilon3(nu, a, b);
      worst = std::max(worst, std::abs(0.5 * contraction - want));
    }
  return worst;
}

/// Riemann components in the right-invariant basis, evaluated two ways:
/// trace route  R = (1/4) lambda tr([X.,X.][X.,X.]) and structure-constant
/// route R = -(1/4) c c; the symmetric-space block additionally carries the
/// factor-of-4 relation against the full curvature lambda tr([][]).
struct CurvatureReport {
  double two_route_residual = 0;   // trace route vs structure constants
  double antisymmetry_residual = 0;
  double su2_identity_residual = 0;  // lambda tr([J,J][J,J]) = dd - dd
  double factor4_residual = 0;       // symmetric-space vs bundle components
  std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> fiber{};
  std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> symmetric{};
};

inline CurvatureReport curvature_components(const SpinRep& rep) {
  CurvatureReport out;
  auto comm = [&](int m, int n) { return rep.axis(m) * rep.axis(n) - rep.axis(n) * rep.axis(m); };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          // fiber block R_{cadb} = (1/4) lambda tr([X_a,X_c][X_b,X_d])
          const double tr_fiber = 0.25 * rep.dynkin * (comm(a, c) * comm(b, d)).trace().real();
          double cc = 0;
          for (int f = 0; f < 3; ++f) cc += epsilon3(a, c, f) * epsilon3(b, d, f);
          out.fiber[c][a][d][b] = tr_fiber;
          out.two_route_residual =
              std::max(out.two_route_residual, std::abs(tr_fiber - (-0.25) * cc));

          // symmetric-space block via structure constants, full normalization
          double cc_sym = 0;
          for (int g = 0; g < 3; ++g) cc_sym += epsilon3(a, c, g) * epsilon3(b, d, g);
          out.symmetric[c][a][d][b] = -cc_sym;
          // bundle component from traces; symmetric-space = 4 x bundle
          out.factor4_residual =
              std::max(out.factor4_residual, std::abs(-cc_sym - 4.0 * tr_fiber));

          // SU(2) identity lambda tr([J_a,J_m][J_b,J_n]) = d_an d_mb - d_ab d_mn
          const double lhs = rep.dynkin * (comm(a, c) * comm(b, d)).trace().real();
          const double want = ((a == d) && (c == b) ? 1.0 : 0.0) - ((a == b) && (c == d) ? 1.0 : 0.0);
          out.su2_identity_residual = std::max(out.su2_identity_residual, std::abs(lhs - want));

          // pair antisymmetry R_{cadb} = -R_{acdb}
          const double anti = 0.25 * rep.dynkin * (comm(c, a) * comm(b, d)).trace().real();
          out.antisymmetry_residual =
              std::max(out.antisymmetry_residual, std::abs(tr_fiber + anti));

          // cross terms, both routes: -(1/4) lambda tr([X_a,X_m][X_b,X_c])
          const double cross_tr = -0.25 * rep.dynkin * (comm(a, c) * comm(b, d)).trace().real();
          double cross_cc = 0;
          for (int g = 0; g < 3; ++g) cross_cc += epsilon3(a, c, g) * epsilon3(b, d, g);
          out.two_route_residual =
              std::max(out.two_route_residual, std::abs(cross_tr - 0.25 * cross_cc));
        }
  return out;
}

/// One row of the SL(2,R) visualization dataset: vector components in the
/// (psi+phi, psi-phi) torus chart plus the anchor where the arrows sit.
struct VizRow {
  double a = 0;
  double aspect_ratio = 0;        // tanh(a/2)
  double anchor_u = 0, anchor_v = 0;  // (psi+phi, psi-phi) position
  double partial_a_radial = 1.0;      // d_a points off-torus, unit radial
  double e_y_u = 0, e_y_v = 0;
  double l_y_u = 0, l_y_v = 0;
  double f_y_u = 0, f_y_v = 0;        // f_y = e_y - L_y
  double grad_y_u = 0, grad_y_v = 0;  // nabla_y = e_y - cosh a L_y
  double jxpsi_u = 0, jxpsi_v = 0;    // J_{x,psi} = L_y coth a - e_y csch a
  double null_u = 0, null_v = 0;      // L_y + J_{x,psi}, the light cone
};

/// Emits the data behind the torus diagrams: per a-value, n_points anchors
/// along the torus winding line with the chart components of the named
/// vectors.  L_y = d_psi is (1,1) in the chart and e_y = d_phi is (1,-1);
/// everything else follows from coth a, csch a, cosh a.
inline std::vector<VizRow> sl2r_viz_export(const std::vector<double>& a_values, int n_points) {
  if (n_points < 1) throw std::invalid_argument("sl2r_viz_export: need n_points >= 1");
  std::vector<VizRow> rows;
  rows.reserve(a_values.size() * static_cast<std::size_t>(n_points));
  for (double a : a_values) {
    if (!(a >= 0)) throw std::invalid_argument("sl2r_viz_export: a must be nonnegative");
    const double ch = std::cosh(a);
    const double cth = (a > 0) ? 1.0 / std::tanh(a) : std::numeric_limits<double>::infinity();
    const double csc = (a > 0) ? 1.0 / std::sinh(a) : std::numeric_limits<double>::infinity();
    VizRow base;
    base.a = a;
    base.aspect_ratio = std::tanh(0.5 * a);
    base.l_y_u = 1;
    base.l_y_v = 1;
    base.e_y_u = 1;
    base.e_y_v = -1;
    base.f_y_u = 0;
    base.f_y_v = -2;
    base.grad_y_u = 1.0 - ch;
    base.grad_y_v = -1.0 - ch;
    base.jxpsi_u = cth - csc;
    base.jxpsi_v = cth + csc;
    base.null_u = 1.0 + cth - csc;
    base.null_v = 1.0 + cth + csc;
    // anchors along the winding line generated by J_{x,psi}
    const double ju = base.jxpsi_u, jv = base.jxpsi_v;
    const double jn = std::hypot(ju, jv);
    for (int k = 0; k < n_points; ++k) {
      VizRow r = base;
      const double s = (n_points == 1) ? 0.0
                                       : -2.0 * M_PI + 4.0 * M_PI * k / (n_points - 1);
      if (std::isfinite(jn) && jn > 0) {
        r.anchor_u = s * ju / jn;
        r.anchor_v = s * jv / jn;
      }
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace krausflow

#endif
