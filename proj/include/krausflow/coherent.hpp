// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#ifndef KRAUSFLOW_COHERENT_HPP
#define KRAUSFLOW_COHERENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "krausflow/algebra.hpp"
#include "krausflow/rng.hpp"

namespace krausflow {

/// Point on the sphere in standard polar coordinates; the unit vector is
/// (sin t cos p, sin t sin p, cos t) in Cartesian (x,y,z).
struct SphereDirection {
  double theta = 0;
  double phi = 0;
};

inline Eigen::Vector3d sphere_to_unit(const SphereDirection& n) {
  return {std::sin(n.theta) * std::cos(n.phi), std::sin(n.theta) * std::sin(n.phi),
          std::cos(n.theta)};
}

/// Nodes and weights integrating f over the rotation-invariant measure
/// d mu = sin(theta) d theta d phi / 4 pi, exact for spherical harmonics of
/// degree <= `degree`.
struct SphereQuadrature {
  std::vector<SphereDirection> nodes;
  std::vector<double> weights;
  int degree = 0;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double step = p1 / dp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = xi;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

}  // namespace detail

/// Product rule: Gauss-Legendre in cos(theta) times the periodic trapezoid
/// in phi; ceil((L+1)/2) polar nodes and L+1 azimuthal nodes make it exact
/// through degree L.
inline SphereQuadrature product_quadrature(int degree) {
  if (degree < 0) throw std::invalid_argument("product_quadrature: degree must be >= 0");
  const int n_theta = (degree + 2) / 2;
  const int n_phi = degree + 1;
  std::vector<double> x, w;
  detail::gauss_legendre(n_theta, x, w);
  SphereQuadrature q;
  q.degree = degree;
  q.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  q.weights.reserve(q.nodes.capacity());
  for (int i = 0; i < n_theta; ++i)
    for (int k = 0; k < n_phi; ++k) {
      q.nodes.push_back({std::acos(x[i]), 2.0 * M_PI * k / n_phi});
      q.weights.push_back(0.5 * w[i] / n_phi);
    }
  return q;
}

/// Spin coherent state |j, n> = exp(-i theta (Jy cos phi - Jx sin phi)) |j, z>.
inline VecX scs_state(const SpinRep& rep, const SphereDirection& n) {
  const MatX gen = std::cos(n.phi) * rep.Jy - std::sin(n.phi) * rep.Jx;
  const MatX d = exp_hermitian(gen, Complex(0, -n.theta));
  return d.col(0);  // highest-weight column, |j, z> = e_0
}

/// Max entrywise deviation of (2j+1) sum_k w_k |n_k><n_k| from the identity.
/// Underresolved quadratures report their deviation rather than hiding it.
inline double scs_povm_resolution(const SpinRep& rep, const SphereQuadrature& quad) {
  MatX acc = MatX::Zero(rep.dim, rep.dim);
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const VecX psi = scs_state(rep, quad.nodes[k]);
    acc += quad.weights[k] * (psi * psi.adjoint());
  }
  acc *= (2.0 * rep.j + 1.0);
  return (acc - MatX::Identity(rep.dim, rep.dim)).cwiseAbs().maxCoeff();
}

/// Q-function Q(n) = (2j+1) <j,n| rho |j,n>.
inline double q_function(const SpinRep& rep, const MatX& rho, const SphereDirection& n) {
  if (rho.rows() != rep.dim || rho.cols() != rep.dim)
    throw std::invalid_argument("q_function: rho has wrong dimension");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("q_function: rho not Hermitian");
  const VecX psi = scs_state(rep, n);
  return (2.0 * rep.j + 1.0) * (psi.adjoint() * rho * psi)(0, 0).real();
}

/// Inverse CDF of the polar angle against the Bloch vector for a pure-qubit
/// Q-function: the density of c = cos(angle) is (1+c)/2, so c = 2 sqrt(u) - 1.
inline double product_q_polar_cos(double u) { return 2.0 * std::sqrt(u) - 1.0; }

/// Samples of the product-state Q-function: per qubit an independent draw
/// from density 1 + n.m relative to d mu(n).  samples[s][q] is the direction
/// for qubit q in draw s.
inline std::vector<std::vector<SphereDirection>> sample_product_q(
    const std::vector<Eigen::Vector3d>& bloch_vectors, std::int64_t n_samples,
    std::uint64_t seed) {
  for (const auto& m : bloch_vectors)
    if (std::abs(m.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("sample_product_q: Bloch vectors must be unit (pure product)");
  GaussianStream g(seed);
  std::vector<std::vector<SphereDirection>> out(n_samples);
  for (auto& row : out) {
    row.resize(bloch_vectors.size());
    for (std::size_t q = 0; q < bloch_vectors.size(); ++q) {
      const Eigen::Vector3d& m = bloch_vectors[q];
      const double c = product_q_polar_cos(g.uniform());
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      const double psi = 2.0 * M_PI * g.uniform();
      // orthonormal frame (e1, e2, m)
      Eigen::Vector3d e1 = (std::abs(m.z()) < 0.9) ? m.cross(Eigen::Vector3d::UnitZ())
                                                   : m.cross(Eigen::Vector3d::UnitX());
      e1.normalize();
      const Eigen::Vector3d e2 = m.cross(e1);
      const Eigen::Vector3d n = c * m + s * (std::cos(psi) * e1 + std::sin(psi) * e2);
      row[q].theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
      row[q].phi = std::atan2(n.y(), n.x());
      if (row[q].phi < 0) row[q].phi += 2.0 * M_PI;
    }
  }
  return out;
}

/// P-function factors of the Pauli observables, normalized for this
/// estimator: Y0 = 1, Y1 = 3 sin t cos p, Y2 = 3 sin t sin p, Y3 = 3 cos t.
inline double pauli_y_factor(int mu, const SphereDirection& n) {
  switch (mu) {
    case 0: return 1.0;
    case 1: return 3.0 * std::sin(n.theta) * std::cos(n.phi);
    case 2: return 3.0 * std::sin(n.theta) * std::sin(n.phi);
    case 3: return 3.0 * std::cos(n.theta);
    default: throw std::invalid_argument("pauli_y_factor: index must be 0..3");
  }
}

struct KLocalEstimate {
  double estimate = 0;
  double std_error = 0;
  std::int64_t n = 0;
};

/// Monte Carlo estimate of <sigma_mu1 x ... x sigma_mum> from Q-samples:
/// mean over draws of the product of Y factors, with its standard error.
inline KLocalEstimate estimate_k_local(const std::vector<std::vector<SphereDirection>>& samples,
                                       const std::vector<int>& pauli_string) {
  if (samples.empty()) throw std::invalid_argument("estimate_k_local: no samples");
  if (samples.front().size() != pauli_string.size())
    throw std::invalid_argument("estimate_k_local: string length must match qubit count");
  double sum = 0, sum2 = 0;
  for (const auto& draw : samples) {
    double prod = 1.0;
    for (std::size_t q = 0; q < pauli_string.size(); ++q)
      prod *= pauli_y_factor(pauli_string[q], draw[q]);
    sum += prod;
    sum2 += prod * prod;
  }
  KLocalEstimate out;
  out.n = static_cast<std::int64_t>(samples.size());
  out.estimate = sum / out.n;
  const double var = (out.n > 1) ? (sum2 - sum * sum / out.n) / (out.n - 1) : 0.0;
  out.std_error = std::sqrt(std::max(var, 0.0) / out.n);
  return out;
}

/// Exact product-state expectation of a Pauli string, the test oracle:
/// <sigma_0> = 1 and <sigma_k> = m_k on each factor.
inline double product_state_expectation(const std::vector<Eigen::Vector3d>& bloch,
                                        const std::vector<int>& pauli_string) {
  double prod = 1.0;
  for (std::size_t q = 0; q < pauli_string.size(); ++q) {
    const int mu = pauli_string[q];
    if (mu != 0) prod *= bloch[q][mu - 1];
  }
  return prod;
}

}  // namespace krausflow

#endif
