// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "krausflow/cartan.hpp"
#include "krausflow/trajectory.hpp"

using namespace krausflow;

namespace {

MatX taylor_exp(const MatX& x, int terms = 30) {
  MatX sum = MatX::Identity(x.rows(), x.cols());
  MatX pow = MatX::Identity(x.rows(), x.cols());
  for (int n = 1; n <= terms; ++n) {
    pow = (pow * x) / static_cast<double>(n);
    sum += pow;
  }
  return sum;
}

double max_abs(const MatX& m) { return m.cwiseAbs().maxCoeff(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("wiener path sampling") {
  SimConfig cfg;
  cfg.gamma = 1.0;
  cfg.dt = 1e-3;
  cfg.T = 1.0;
  cfg.seed = 99;

  SECTION("step count") {
    CHECK(sample_wiener_path(cfg).increments.size() == 1000);
  }

  SECTION("identical seed gives a bit-identical path") {
    const WienerPath a = sample_wiener_path(cfg);
    const WienerPath b = sample_wiener_path(cfg);
    REQUIRE(a.increments.size() == b.increments.size());
    for (std::size_t i = 0; i < a.increments.size(); ++i)
      CHECK(a.increments[i] == b.increments[i]);
  }

  SECTION("pooled variance over 1e6 increments matches dt within 1 percent") {
    SimConfig big = cfg;
    big.T = 1000.0;  // 1e6 steps, 3e6 draws
    const WienerPath p = sample_wiener_path(big);
    double sum = 0, sum2 = 0;
    for (const auto& w : p.increments)
      for (int mu = 0; mu < 3; ++mu) {
        sum += w[mu];
        sum2 += w[mu] * w[mu];
      }
    const double n = 3.0 * static_cast<double>(p.increments.size());
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(var / big.dt - 1.0) < 0.01);
    // mean within 5 sigma of zero
    CHECK(std::abs(mean) < 5.0 * std::sqrt(big.dt / n));
  }

  SECTION("config validation") {
    SimConfig bad = cfg;
    bad.dt = 0.1;  // gamma*dt too large
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("kraus stepping") {
  SECTION("zero increment leaves K unchanged") {
    KrausPoint k;
    k.m(0, 1) = Complex(0.2, 0.1);
    const KrausPoint k2 = step_kraus(k, FrameVec::Zero(), 1.0);
    CHECK(max_abs(k2.m - k.m) < 1e-15);
  }

  SECTION("pure z increment from identity is diagonal") {
    const double w = 0.03, gamma = 2.0;
    FrameVec dw = FrameVec::Zero();
    dw[kZ] = w;
    const KrausPoint k = step_kraus(KrausPoint{}, dw, gamma);
    const double sg = std::sqrt(gamma);
    CHECK(std::abs(k.m(0, 0) - std::exp(0.5 * sg * w)) < 1e-14);
    CHECK(std::abs(k.m(1, 1) - std::exp(-0.5 * sg * w)) < 1e-14);
    CHECK(std::abs(k.m(0, 1)) < 1e-15);
  }

  SECTION("matches the 30-term Taylor exponential on random increments") {
    GaussianStream g(7);
    const double gamma = 1.0, dt = 1e-3;
    KrausPoint k;
    for (int trial = 0; trial < 40; ++trial) {
      const FrameVec dw = std::sqrt(dt) * FrameVec(g.next(), g.next(), g.next());
      const KrausPoint stepped = step_kraus(k, dw, gamma);
      const Mat2 want = Mat2(taylor_exp(std::sqrt(gamma) * jdot(dw))) * k.m;
      CHECK(max_abs(stepped.m - want) < 1e-12);
      k = stepped;
    }
  }
}

TEST_CASE("kraus integration") {
  SimConfig cfg;
  cfg.gamma = 1.0;
  cfg.dt = 1e-3;
  cfg.T = 4.096;
  cfg.seed = 314;
  const WienerPath path = sample_wiener_path(cfg);

  SECTION("zero path returns the initial condition") {
    WienerPath zeros = path;
    for (auto& w : zeros.increments) w.setZero();
    KrausPoint k0;
    k0.m(0, 0) = std::exp(0.15);
    k0.m(1, 1) = std::exp(-0.15);
    const auto out = integrate_kraus(zeros, cfg.gamma, {cfg.T}, k0);
    CHECK(max_abs(out[0].m - k0.m) < 1e-14);
  }

  SECTION("single step equals step_kraus") {
    WienerPath one;
    one.dt = cfg.dt;
    one.increments = {path.increments[0]};
    const auto out = integrate_kraus(one, cfg.gamma, {cfg.dt});
    const KrausPoint direct = step_kraus(KrausPoint{}, path.increments[0], cfg.gamma);
    CHECK(max_abs(out[0].m - direct.m) < 1e-16);
  }

  SECTION("composition over half paths is bitwise at renorm-aligned splits") {
    // 4096 steps split at 2048: both halves renormalize on the same schedule
    const auto full = integrate_kraus(path, cfg.gamma, {cfg.T});
    WienerPath first, second;
    first.dt = second.dt = cfg.dt;
    first.increments.assign(path.increments.begin(), path.increments.begin() + 2048);
    second.increments.assign(path.increments.begin() + 2048, path.increments.end());
    const auto k_half = integrate_kraus(first, cfg.gamma, {2.048});
    const auto k_full = integrate_kraus(second, cfg.gamma, {2.048}, k_half[0]);
    CHECK(k_full[0].m == full[0].m);  // bitwise
  }

  SECTION("determinant stays within 1e-8 over 1e4 steps") {
    SimConfig longcfg = cfg;
    longcfg.T = 10.0;
    longcfg.seed = 2718;
    const WienerPath p = sample_wiener_path(longcfg);
    const auto out = integrate_kraus(p, longcfg.gamma, {5.0, 10.0});
    for (const auto& k : out) CHECK(std::abs(k.det() - 1.0) < 1e-8);
  }

  SECTION("checkpoint outside the run is rejected") {
    CHECK_THROWS_AS(integrate_kraus(path, cfg.gamma, {99.0}), std::invalid_argument);
    CHECK_THROWS_AS(integrate_kraus(path, cfg.gamma, {-1.0}), std::invalid_argument);
  }

  SECTION("conjugation covariance: a is invariant, direction rotates") {
    GaussianStream g(55);
    const FrameVec axis(g.next(), g.next(), g.next());
    const Mat2 omega = exp_traceless2(Complex(0, -1) * jdot(axis));
    WienerPath p = path;
    p.increments.resize(500);
    const auto k = integrate_kraus(p, cfg.gamma, {0.5})[0];
    const Mat2 conj = omega * k.m * omega.adjoint();
    const CartanForm fk = cartan_decompose(k.m);
    const CartanForm fc = cartan_decompose(conj);
    CHECK(std::abs(fk.a - fc.a) < 1e-10);
    const Mat3 r = adjoint_rotation(omega);
    const FrameVec rotated = r * povm_direction(fk.U);
    CHECK((rotated - povm_direction(fc.U)).norm() < 1e-8);
  }
}

TEST_CASE("mmcsd residual") {
  const double gamma = 1.0;

  SECTION("zero increment gives zero residual") {
    KrausPoint k;
    k.m(0, 1) = Complex(0.1, -0.2);
    const KrausPoint k2 = step_kraus(k, FrameVec::Zero(), gamma);
    CHECK(mmcsd_residual(k, k2, FrameVec::Zero(), gamma, 1e-3) == 0.0);
  }

  SECTION("typical residual is bounded by 10 dt^{3/2}") {
    const double dt = 1e-3;
    GaussianStream g(17);
    KrausPoint k;
    for (int i = 0; i < 200; ++i) {
      const FrameVec dw = std::sqrt(dt) * FrameVec(g.next(), g.next(), g.next());
      const KrausPoint k2 = step_kraus(k, dw, gamma);
      CHECK(mmcsd_residual(k, k2, dw, gamma, dt) <= 10.0 * std::pow(dt, 1.5));
      k = k2;
      if ((i + 1) % 50 == 0) k.renormalize_det();
    }
  }

  SECTION("halving dt contracts the median residual by about 2 sqrt 2") {
    auto median_residual = [&](double dt, std::uint64_t seed) {
      GaussianStream g(seed);
      std::vector<double> res;
      KrausPoint k;  // identity base point
      for (int i = 0; i < 1000; ++i) {
        const FrameVec dw = std::sqrt(dt) * FrameVec(g.next(), g.next(), g.next());
        const KrausPoint k2 = step_kraus(k, dw, gamma);
        res.push_back(mmcsd_residual(k, k2, dw, gamma, dt));
      }
      return median(res);
    };
    const double r1 = median_residual(1e-3, 23);
    const double r2 = median_residual(5e-4, 23);
    const double ratio = r1 / r2;
    CHECK(ratio > 2.3);  // 2 sqrt 2 = 2.83 up to sampling noise
    CHECK(ratio < 3.4);
  }
}

TEST_CASE("anisotropic stepping") {
  const SpinRep rep_half = build_spin_rep(0.5);
  const SpinRep rep_one = build_spin_rep(1.0);
  const double gamma = 1.0, dt = 1e-3;

  SECTION("zero anisotropy reduces to the isotropic step") {
    GaussianStream g(29);
    const FrameVec dw = std::sqrt(dt) * FrameVec(g.next(), g.next(), g.next());
    KrausPoint k;
    const auto out =
        anisotropic_step(k, MatX::Identity(3, 3), dw, gamma, FrameVec::Zero(), rep_one, dt);
    CHECK(max_abs(out.K.m - step_kraus(k, dw, gamma).m) < 1e-14);
    CHECK(max_abs(out.A - MatX::Identity(3, 3)) < 1e-14);
  }

  SECTION("j = 1/2: eps.Q vanishes by the Pauli-square identity, A frozen") {
    GaussianStream g(30);
    FrameVec eps;
    eps[kZ] = 0.1;
    eps[kX] = -0.05;
    eps[kY] = -0.05;
    MatX a = MatX::Identity(2, 2);
    KrausPoint k;
    for (int i = 0; i < 50; ++i) {
      const FrameVec dw = std::sqrt(dt) * FrameVec(g.next(), g.next(), g.next());
      const auto out = anisotropic_step(k, a, dw, gamma, eps, rep_half, dt);
      k = out.K;
      a = out.A;
    }
    CHECK(max_abs(a - MatX::Identity(2, 2)) < 1e-13);
  }

  SECTION("zero-sum violation is rejected") {
    FrameVec eps;
    eps[kZ] = 0.1;
    eps[kX] = 0.0;
    eps[kY] = 0.0;
    CHECK_THROWS_AS(anisotropic_step(KrausPoint{}, MatX::Identity(2, 2), FrameVec::Zero(), gamma,
                                     eps, rep_half, dt),
                    std::invalid_argument);
  }

  SECTION("j = 1 correction stays small when eps gamma T j^2 = 0.01") {
    // gamma T = 0.1, eps magnitude 0.1: ensemble mean of ||A(T) - I|| <= 0.1
    const double T = 0.1;
    const int n_steps = static_cast<int>(T / dt);
    FrameVec eps;
    eps[kZ] = 0.1;
    eps[kX] = -0.05;
    eps[kY] = -0.05;
    double mean_dev = 0;
    const int n_paths = 20;
    for (int p = 0; p < n_paths; ++p) {
      GaussianStream g(trajectory_seed(404, p));
      KrausPoint k;
      MatX a = MatX::Identity(3, 3);
      for (int i = 0; i < n_steps; ++i) {
        const FrameVec dw = std::sqrt(dt) * FrameVec(g.next(), g.next(), g.next());
        const auto out = anisotropic_step(k, a, dw, gamma, eps, rep_one, dt);
        k = out.K;
        a = out.A;
      }
      mean_dev += max_abs(a - MatX::Identity(3, 3));
    }
    mean_dev /= n_paths;
    CHECK(mean_dev <= 0.1);
  }
}

TEST_CASE("single observable superoperator oracle") {
  const SpinRep rep = build_spin_rep(1.0);

  SECTION("t = 0 is the identity channel up to sampling noise") {
    MatX rho = MatX::Zero(3, 3);
    rho(0, 0) = 0.5;
    rho(0, 2) = 0.25;
    rho(2, 0) = 0.25;
    rho(2, 2) = 0.5;
    CHECK(single_observable_superop_check(rep, 1.0, 0.0, rho, 1000) < 1e-12);
  }

  SECTION("diagonal rho is invariant up to sampling error") {
    // the map is the identity on the diagonal; the Monte Carlo mean of
    // e^{2 sqrt(gamma) W m - 2 gamma t m^2} has per-sample relative variance
    // e^{4 gamma t m^2} - 1, about 6.4 at gamma t = 0.5, m = 1
    MatX rho = MatX::Zero(3, 3);
    rho(0, 0) = 0.2;
    rho(1, 1) = 0.3;
    rho(2, 2) = 0.5;
    const std::int64_t n = 100000;
    const double four_sigma = 4.0 * 0.5 * std::sqrt((std::exp(2.0) - 1.0) / n);
    CHECK(single_observable_superop_check(rep, 1.0, 0.5, rho, n) < four_sigma);
  }

  SECTION("x-polarized spin-1 state dephases per the analytic map") {
    // |+x> analog: spin-1 coherent state along x
    const Mat2 u = exp_traceless2(Complex(0, -M_PI / 2) * jdef(kY));
    const MatX uj = su2_lift(u, rep);
    VecX psi = VecX::Zero(3);
    psi(0) = 1.0;
    psi = uj.adjoint() * psi;
    const MatX rho = psi * psi.adjoint();
    CHECK(single_observable_superop_check(rep, 1.0, 0.5, rho, 100000) <= 0.02);
  }

  SECTION("invalid density matrices are rejected") {
    MatX bad = MatX::Identity(3, 3);  // trace 3
    CHECK_THROWS_AS(single_observable_superop_check(rep, 1.0, 0.1, bad, 10),
                    std::invalid_argument);
  }
}
