// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#ifndef KRAUSFLOW_COUPLED_SDE_HPP
#define KRAUSFLOW_COUPLED_SDE_HPP

#include <optional>
#include <vector>

#include "krausflow/cartan.hpp"
#include "krausflow/trajectory.hpp"

namespace krausflow {

/// Cartan-coordinate state (V, a, U) advanced by the coupled SDEs.
struct CoupledState {
  Mat2 V = Mat2::Identity();
  Mat2 U = Mat2::Identity();
  double a = 0.0;
};

/// Below this radius the coth drift is too stiff for the coupled equations;
/// callers must use the direct integrator and hand over above kHandoffA.
inline constexpr double kAFloor = 0.05;
inline constexpr double kHandoffA = 0.3;

/// Moving-frame increments dW_move = R(V)^-1 dW, an orthogonal transform.
inline FrameVec moving_frame_increments(const FrameVec& dw, const Mat2& v) {
  return adjoint_rotation(v).transpose() * dw;
}

/// One Euler-Maruyama step of the coupled system, with exact group
/// exponentials for the unitary factors:
///   a' = a + gamma dt coth a + sqrt(gamma) dWm^z
///   U' = exp(-i dPhi) U,  dPhi = (Jx sqrt(gamma) dWm^y - Jy sqrt(gamma) dWm^x) csch a
///   V' = V exp(+i dPsi),  dPsi = the same combination scaled by coth a
inline CoupledState step_coupled(const CoupledState& s, const FrameVec& dw, double gamma,
                                 double dt) {
  if (!(s.a > kAFloor))
    throw std::domain_error("step_coupled: a at or below the floor 0.05; "
                            "use the direct integrator near the origin");
  const FrameVec dwm = moving_frame_increments(dw, s.V);
  const double sg = std::sqrt(gamma);
  const double coth = 1.0 / std::tanh(s.a);
  const double csch = 1.0 / std::sinh(s.a);

  CoupledState out;
  out.a = s.a + gamma * dt * coth + sg * dwm[kZ];
  const Mat2 turn = sg * dwm[kY] * jdef(kX) - sg * dwm[kX] * jdef(kY);
  const Complex mi(0, -1), pi_(0, 1);
  out.U = exp_traceless2(mi * (csch * turn)) * s.U;
  out.V = s.V * exp_traceless2(pi_ * (coth * turn));
  return out;
}

/// Reprojects the unitary factors onto SU(2); call every ~1e3 steps.
inline void reunitarize(CoupledState& s) {
  s.V = detail::project_su2(s.V);
  s.U = detail::project_su2(s.U);
}

/// Integrates the coupled system over a stored path from a = a0, V = U = I,
/// snapshotting at the checkpoint step indices.
inline std::vector<CoupledState> integrate_coupled(const WienerPath& path, double a0,
                                                   double gamma,
                                                   const std::vector<double>& checkpoints) {
  const std::int64_t n = static_cast<std::int64_t>(path.increments.size());
  std::vector<std::int64_t> cp_steps;
  for (double t : checkpoints) {
    const std::int64_t idx = std::llround(t / path.dt);
    if (idx < 0 || idx > n || std::abs(idx * path.dt - t) > 0.5 * path.dt)
      throw std::invalid_argument("integrate_coupled: checkpoint outside [0,T]");
    cp_steps.push_back(idx);
  }
  std::vector<CoupledState> out(checkpoints.size());
  CoupledState s;
  s.a = a0;
  for (std::size_t c = 0; c < cp_steps.size(); ++c)
    if (cp_steps[c] == 0) out[c] = s;
  for (std::int64_t i = 0; i < n; ++i) {
    s = step_coupled(s, path.increments[i], gamma, path.dt);
    if ((i + 1) % 1024 == 0) reunitarize(s);
    for (std::size_t c = 0; c < cp_steps.size(); ++c)
      if (cp_steps[c] == i + 1) out[c] = s;
  }
  return out;
}

/// Starts at the origin with the direct integrator and hands the trajectory
/// to the coupled equations once a exceeds kHandoffA; returns the coupled
/// state at the end of the path.  Falls back to the direct integrator for
/// the whole path when the handoff never triggers.
inline CoupledState integrate_hybrid(const WienerPath& path, double gamma) {
  KrausPoint k;
  CoupledState s;
  bool coupled = false;
  const std::int64_t n = static_cast<std::int64_t>(path.increments.size());
  for (std::int64_t i = 0; i < n; ++i) {
    if (!coupled) {
      k = step_kraus(k, path.increments[i], gamma);
      if ((i + 1) % 256 == 0 || i + 1 == n) {
        KrausPoint snap = k;  // renormalize a copy, leaving the run untouched
        snap.renormalize_det();
        const CartanForm f = cartan_decompose(snap.m);
        if (f.a > kHandoffA) {
          s.V = f.V;
          s.U = f.U;
          s.a = f.a;
          coupled = true;
        }
      }
    } else {
      s = step_coupled(s, path.increments[i], gamma, path.dt);
      if ((i + 1) % 1024 == 0) reunitarize(s);
    }
  }
  if (!coupled) {
    k.renormalize_det();
    const CartanForm f = cartan_decompose(k.m);
    s.V = f.V;
    s.U = f.U;
    s.a = f.a;
  }
  return s;
}

/// Gauge-invariant deviations between the direct and coupled integrators on
/// one identical path, per checkpoint.
struct CrossValidatePoint {
  double t = 0;
  double a_deviation = 0;          // |a_direct - a_coupled|
  double direction_angle = 0;      // angle between POVM directions, radians
  double polar_unitary_dist = 0;   // max-entry |W_direct - W_coupled|, phase-aligned
};

struct CrossValidateReport {
  std::vector<CrossValidatePoint> points;
  bool floor_hit = false;  // coupled trajectory dipped to the a-floor
};

/// Frobenius-phase-aligned distance between unitaries (SU(2) is a double
/// cover; W and -W describe the same rotation).
inline double unitary_distance(const Mat2& a, const Mat2& b) {
  const double d1 = (a - b).cwiseAbs().maxCoeff();
  const double d2 = (a + b).cwiseAbs().maxCoeff();
  return std::min(d1, d2);
}

/// Runs both integrators from K0 = e^{a0 Jz} over the identical path and
/// compares gauge invariants at the checkpoints.
inline CrossValidateReport cross_validate(const WienerPath& path, double a0, double gamma,
                                          const std::vector<double>& checkpoints) {
  if (!(a0 >= kHandoffA))
    throw std::invalid_argument("cross_validate: start at a0 >= 0.3");
  KrausPoint k0;
  k0.m = Mat2::Zero();
  k0.m(0, 0) = std::exp(0.5 * a0);
  k0.m(1, 1) = std::exp(-0.5 * a0);

  CrossValidateReport rep;
  std::vector<KrausPoint> direct;
  std::vector<CoupledState> coupled;
  try {
    direct = integrate_kraus(path, gamma, checkpoints, k0);
    coupled = integrate_coupled(path, a0, gamma, checkpoints);
  } catch (const std::domain_error&) {
    rep.floor_hit = true;
    return rep;
  }
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    KrausPoint kd = direct[c];
    kd.renormalize_det();
    const CartanForm fd = cartan_decompose(kd.m);
    const CoupledState& sc = coupled[c];
    CrossValidatePoint pt;
    pt.t = checkpoints[c];
    pt.a_deviation = std::abs(fd.a - sc.a);
    const FrameVec nd = povm_direction(fd.U), nc = povm_direction(sc.U);
    pt.direction_angle = std::acos(std::clamp(nd.dot(nc), -1.0, 1.0));
    pt.polar_unitary_dist = unitary_distance(fd.V * fd.U, sc.V * sc.U);
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace krausflow

#endif
