// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "krausflow/coupled_sde.hpp"
#include "krausflow/povm_stats.hpp"

using namespace krausflow;

TEST_CASE("ensemble runner") {
  SimConfig cfg;
  cfg.gamma = 1.0;
  cfg.dt = 1e-3;
  cfg.T = 0.5;
  cfg.seed = 42;
  cfg.checkpoint_times = {0.25, 0.5};

  SECTION("a single path reproduces integrate_kraus") {
    const EnsembleStats stats = run_ensemble(cfg, 1, 1);
    SimConfig one = cfg;
    one.seed = trajectory_seed(cfg.seed, 0);
    const WienerPath path = sample_wiener_path(one);
    KrausPoint k = integrate_kraus(path, cfg.gamma, {0.5})[0];
    k.renormalize_det();
    const CartanForm f = cartan_decompose(k.m);
    CHECK(stats.checkpoints[1].a[0] == Catch::Approx(f.a).epsilon(1e-12));
  }

  SECTION("results are independent of the worker count and rerunnable") {
    const EnsembleStats s1 = run_ensemble(cfg, 64, 1);
    const EnsembleStats s2 = run_ensemble(cfg, 64, 2);
    const EnsembleStats s3 = run_ensemble(cfg, 64, 2);
    for (std::size_t c = 0; c < s1.checkpoints.size(); ++c)
      for (int p = 0; p < 64; ++p) {
        CHECK(s1.checkpoints[c].a[p] == s2.checkpoints[c].a[p]);
        CHECK(s2.checkpoints[c].a[p] == s3.checkpoints[c].a[p]);
      }
  }

  SECTION("mean of a at gamma t = 2 matches the direct-oracle value") {
    // Fokker-Planck oracle: the law of a at gamma t = 2 has mean 2.943
    SimConfig c2 = cfg;
    c2.T = 2.0;
    c2.checkpoint_times = {2.0};
    const EnsembleStats stats = run_ensemble(c2, 2000, 2);
    double mean = 0;
    for (double a : checkpoint_at(stats, 2.0).a) mean += a;
    mean /= stats.n_paths;
    CHECK(mean == Catch::Approx(2.943).margin(0.1));
  }
}

TEST_CASE("completeness check") {
  SECTION("t = 0 is exactly the identity") {
    SimConfig cfg;
    cfg.T = 0.1;
    cfg.seed = 7;
    cfg.checkpoint_times = {0.0};
    const EnsembleStats stats = run_ensemble(cfg, 50, 1);
    const CompletenessResult r = completeness_check(stats, build_spin_rep(0.5), cfg.gamma, 0.0);
    CHECK(r.max_eigenvalue_deviation < 1e-12);
  }

  SECTION("j = 1/2 and j = 1 at gamma t = 0.5 from one ensemble") {
    SimConfig cfg;
    cfg.gamma = 1.0;
    cfg.dt = 1e-3;
    cfg.T = 0.5;
    cfg.seed = 99;
    cfg.checkpoint_times = {0.5};
    const EnsembleStats stats = run_ensemble(cfg, 20000, 2);
    for (double j : {0.5, 1.0}) {
      const CompletenessResult r = completeness_check(stats, build_spin_rep(j), 1.0, 0.5);
      CHECK(r.conclusive);
      CHECK(r.max_eigenvalue_deviation <= 0.08);
      CHECK(r.jackknife_rel_std <= 0.05);
    }
  }

  SECTION("tiny ensembles come back inconclusive, not pass") {
    SimConfig cfg;
    cfg.gamma = 1.0;
    cfg.dt = 1e-3;
    cfg.T = 0.5;
    cfg.seed = 5;
    cfg.checkpoint_times = {0.5};
    const EnsembleStats stats = run_ensemble(cfg, 40, 1);
    const CompletenessResult r =
        completeness_check(stats, build_spin_rep(1.0), 1.0, 0.5, 20);
    CHECK_FALSE(r.conclusive);
  }
}

TEST_CASE("isotropy check") {
  SimConfig cfg;
  cfg.gamma = 1.0;
  cfg.dt = 1e-3;
  cfg.T = 1.0;
  cfg.seed = 314;
  cfg.checkpoint_times = {1.0};
  const EnsembleStats stats = run_ensemble(cfg, 4000, 2);

  SECTION("moment tests pass for the isotropic ensemble") {
    const IsotropyReport rep = isotropy_check(stats, 1.0);
    CHECK(rep.povm_direction.pass);
    CHECK(rep.postmeasurement_direction.pass);
  }

  SECTION("negative control: conditioning on the first z-increment breaks it") {
    // keep only paths whose first z-increment is positive; the POVM
    // direction inherits the bias and the first-moment test must fail
    std::vector<FrameVec> biased;
    for (std::int64_t p = 0; p < stats.n_paths; ++p) {
      GaussianStream g(trajectory_seed(cfg.seed, p));
      if (g.next() > 0) biased.push_back(checkpoint_at(stats, 1.0).n_u[p]);
    }
    const IsotropyMoments m = isotropy_moments(biased);
    CHECK_FALSE(m.pass);
    CHECK(m.first_moment_norm > m.first_moment_bound);
  }
}

TEST_CASE("histogram vs fokker-planck") {
  SECTION("FP against its own synthetic sample is at the statistical floor") {
    RadialGrid grid{8.0, 800};
    const RadialDistribution fp = fp_solve(warm_start(1.0, 0.02, grid), 1.0, 1.0, 1e-3);
    // draw synthetic samples from the FP distribution by inverse CDF
    EnsembleStats synth;
    synth.config.gamma = 1.0;
    synth.config.dt = 1e-3;
    synth.config.T = 1.0;
    CheckpointSamples cp;
    cp.t = 1.0;
    GaussianStream g(808);
    std::vector<double> cdf(fp.values.size());
    double acc = 0;
    for (std::size_t i = 0; i < fp.values.size(); ++i) {
      acc += fp.values[i] * grid.h();
      cdf[i] = acc;
    }
    const std::int64_t n = 20000;
    for (std::int64_t s = 0; s < n; ++s) {
      const double u = g.uniform() * acc;
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      cp.a.push_back(grid.center(static_cast<int>(it - cdf.begin())));
    }
    synth.checkpoints.push_back(cp);
    synth.n_paths = n;
    const double l1 = histogram_vs_fp(synth, fp);
    // statistical floor ~ 0.8 * integral sqrt(f) / sqrt(N Delta) ~ 0.02
    CHECK(l1 < 0.05);
  }

  SECTION("ensemble at gamma t = 2 matches the FP solution") {
    SimConfig cfg;
    cfg.gamma = 1.0;
    cfg.dt = 1e-3;
    cfg.T = 2.0;
    cfg.seed = 2718;
    cfg.checkpoint_times = {2.0};
    const EnsembleStats stats = run_ensemble(cfg, 10000, 2);
    RadialGrid grid{12.0, 1200};
    const RadialDistribution fp = fp_solve(warm_start(1.0, 0.02, grid), 1.0, 2.0, 1e-3);
    CHECK(histogram_vs_fp(stats, fp) <= 0.05);
  }

  SECTION("time mismatch is rejected") {
    SimConfig cfg;
    cfg.T = 0.5;
    cfg.checkpoint_times = {0.5};
    const EnsembleStats stats = run_ensemble(cfg, 10, 1);
    RadialGrid grid{8.0, 800};
    const RadialDistribution fp = fp_solve(warm_start(1.0, 0.02, grid), 1.0, 1.0, 1e-3);
    CHECK_THROWS_AS(histogram_vs_fp(stats, fp), std::invalid_argument);
  }
}

TEST_CASE("coupled-route law agrees with the direct route") {
  // third pairwise leg: hybrid (direct-then-coupled) ensemble vs the direct
  // ensemble law of a at gamma t = 2, compared through the FP grid
  SimConfig cfg;
  cfg.gamma = 1.0;
  cfg.dt = 1e-3;
  cfg.T = 2.0;
  cfg.seed = 1234;
  cfg.checkpoint_times = {2.0};
  const std::int64_t n_paths = 10000;
  const EnsembleStats direct = run_ensemble(cfg, n_paths, 2);

  EnsembleStats hybrid;
  hybrid.config = cfg;
  hybrid.n_paths = n_paths;
  CheckpointSamples cp;
  cp.t = 2.0;
  cp.a.resize(n_paths);
  SimConfig path_cfg = cfg;
  for (std::int64_t p = 0; p < n_paths; ++p) {
    path_cfg.seed = trajectory_seed(cfg.seed + 1, p);
    const WienerPath path = sample_wiener_path(path_cfg);
    cp.a[p] = integrate_hybrid(path, cfg.gamma).a;
  }
  hybrid.checkpoints.push_back(cp);

  RadialGrid grid{12.0, 1200};
  const RadialDistribution fp = fp_solve(warm_start(1.0, 0.02, grid), 1.0, 2.0, 1e-3);
  CHECK(histogram_vs_fp(direct, fp) <= 0.05);
  CHECK(histogram_vs_fp(hybrid, fp) <= 0.05);
}

TEST_CASE("uv decorrelation and purity tail") {
  SECTION("equal-time correlations are one; U freezes while V wanders") {
    SimConfig cfg;
    cfg.gamma = 1.0;
    cfg.dt = 1e-3;
    cfg.T = 5.0;
    cfg.seed = 555;
    cfg.checkpoint_times = {3.0, 5.0};
    const EnsembleStats stats = run_ensemble(cfg, 500, 2);
    const UvDecorrelation d = uv_decorrelation(stats);
    CHECK(d.corr_u(0, 0) == Catch::Approx(1.0));
    CHECK(d.corr_v(1, 1) == Catch::Approx(1.0));
    CHECK(d.mean_angle_u < 0.1);
    CHECK(d.mean_angle_v > 5.0 * d.mean_angle_u);
  }

  SECTION("purity tail at T = 0 is empty") {
    SimConfig cfg;
    cfg.T = 0.5;
    cfg.seed = 9;
    cfg.checkpoint_times = {0.0};
    const EnsembleStats stats = run_ensemble(cfg, 50, 1);
    const PurityTail tail = purity_tail_empirical(stats, 0.0);
    CHECK(tail.empirical == 0.0);
  }
}
