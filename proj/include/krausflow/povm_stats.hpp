// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#ifndef KRAUSFLOW_POVM_STATS_HPP
#define KRAUSFLOW_POVM_STATS_HPP

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "krausflow/cartan.hpp"
#include "krausflow/fokker_planck.hpp"
#include "krausflow/trajectory.hpp"

namespace krausflow {

/// Per-checkpoint gauge-invariant samples of a trajectory ensemble.
struct CheckpointSamples {
  double t = 0;
  std::vector<double> a;       // radial coordinate per path
  std::vector<FrameVec> n_u;   // POVM direction per path
  std::vector<FrameVec> n_v;   // postmeasurement direction per path
};

/// Monte Carlo representation of the Kraus-operator distribution: per-path
/// records at the checkpoint times, reproducible from (master seed, index).
struct EnsembleStats {
  SimConfig config;
  std::int64_t n_paths = 0;
  std::vector<CheckpointSamples> checkpoints;
};

/// Integrates n_paths independent trajectories from K = I and records the
/// Cartan gauge invariants at each checkpoint.  Path p uses the seed
/// master ^ p; results are independent of the worker count.
inline EnsembleStats run_ensemble(const SimConfig& config, std::int64_t n_paths,
                                  int n_workers = 0) {
  config.validate();
  if (n_paths < 1) throw std::invalid_argument("run_ensemble: need n_paths >= 1");
  const std::int64_t n_steps = config.n_steps();
  if (n_paths * n_steps > 400e9)
    throw std::invalid_argument("run_ensemble: n_paths * n_steps beyond the resource guard");

  std::vector<std::int64_t> cp_steps;
  for (double t : config.checkpoint_times) {
    const std::int64_t idx = std::llround(t / config.dt);
    if (idx < 0 || idx > n_steps || std::abs(idx * config.dt - t) > 0.5 * config.dt)
      throw std::invalid_argument("run_ensemble: checkpoint off the step grid");
    cp_steps.push_back(idx);
  }

  EnsembleStats stats;
  stats.config = config;
  stats.n_paths = n_paths;
  stats.checkpoints.resize(cp_steps.size());
  for (std::size_t c = 0; c < cp_steps.size(); ++c) {
    stats.checkpoints[c].t = config.checkpoint_times[c];
    stats.checkpoints[c].a.resize(n_paths);
    stats.checkpoints[c].n_u.resize(n_paths);
    stats.checkpoints[c].n_v.resize(n_paths);
  }

  if (n_workers <= 0)
    n_workers = std::max(1u, std::thread::hardware_concurrency());

  auto worker = [&](std::int64_t lo, std::int64_t hi) {
    const double s = std::sqrt(config.dt);
    const double sg = std::sqrt(config.gamma);
    for (std::int64_t p = lo; p < hi; ++p) {
      GaussianStream g(trajectory_seed(config.seed, static_cast<std::uint64_t>(p)));
      KrausPoint k;
      std::size_t next_cp = 0;
      // checkpoints sorted ascending is the common case; handle t = 0 too
      std::vector<std::size_t> order(cp_steps.size());
      for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
      std::sort(order.begin(), order.end(),
                [&](std::size_t x, std::size_t y) { return cp_steps[x] < cp_steps[y]; });
      auto record = [&](std::size_t c) {
        KrausPoint snap = k;
        snap.renormalize_det();
        const CartanForm f = cartan_decompose(snap.m);
        stats.checkpoints[c].a[p] = f.a;
        stats.checkpoints[c].n_u[p] = povm_direction(f.U);
        stats.checkpoints[c].n_v[p] = v_direction(f.V);
      };
      while (next_cp < order.size() && cp_steps[order[next_cp]] == 0) record(order[next_cp++]);
      for (std::int64_t i = 0; i < n_steps; ++i) {
        const FrameVec dw(s * g.next(), s * g.next(), s * g.next());
        k = step_kraus(k, dw, config.gamma);
        if ((i + 1) % kDetRenormInterval == 0) k.renormalize_det();
        while (next_cp < order.size() && cp_steps[order[next_cp]] == i + 1)
          record(order[next_cp++]);
      }
    }
  };

  if (n_workers == 1 || n_paths < 2 * n_workers) {
    worker(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n_paths + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      const std::int64_t lo = w * chunk, hi = std::min<std::int64_t>(n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return stats;
}

inline const CheckpointSamples& checkpoint_at(const EnsembleStats& stats, double t) {
  for (const auto& cp : stats.checkpoints)
    if (std::abs(cp.t - t) <= 0.5 * stats.config.dt) return cp;
  throw std::invalid_argument("no checkpoint at the requested time");
}

/// Completeness of the isotropic-measurement POVM in spin j:
/// e^{-2 gamma t j(j+1)} E[K_j^dag K_j] = 1.  The mean is over the lifted
/// POVM elements e^{2 a n.J}; the deviation is the largest |eigenvalue - 1|.
/// Heavy-tail discipline: a delete-block jackknife over the eigenvalues
/// yields a relative spread, and results with spread > 10% come back flagged
/// inconclusive rather than pass/fail.
struct CompletenessResult {
  double max_eigenvalue_deviation = 0;
  double jackknife_rel_std = 0;
  bool conclusive = true;
};

inline CompletenessResult completeness_check(const EnsembleStats& stats, const SpinRep& rep,
                                             double gamma, double t, int n_blocks = 50) {
  const CheckpointSamples& cp = checkpoint_at(stats, t);
  const std::int64_t n = static_cast<std::int64_t>(cp.a.size());
  n_blocks = static_cast<int>(std::min<std::int64_t>(n_blocks, n));
  std::vector<MatX> block_sum(n_blocks, MatX::Zero(rep.dim, rep.dim));
  std::vector<std::int64_t> block_count(n_blocks, 0);
  for (std::int64_t p = 0; p < n; ++p) {
    const int b = static_cast<int>(p % n_blocks);
    block_sum[b] += lifted_povm_element(cp.a[p], cp.n_u[p], rep);
    block_count[b] += 1;
  }
  MatX total = MatX::Zero(rep.dim, rep.dim);
  for (const auto& bs : block_sum) total += bs;
  const double scale = std::exp(-2.0 * gamma * t * rep.j * (rep.j + 1.0));

  auto eigs = [&](const MatX& sum, std::int64_t count) {
    Eigen::SelfAdjointEigenSolver<MatX> es((scale / count) * sum);
    return es.eigenvalues();
  };
  const Eigen::VectorXd lam = eigs(total, n);

  CompletenessResult out;
  out.max_eigenvalue_deviation = (lam.array() - 1.0).abs().maxCoeff();

  // delete-block jackknife on each eigenvalue
  Eigen::MatrixXd deleted(n_blocks, rep.dim);
  for (int b = 0; b < n_blocks; ++b)
    deleted.row(b) = eigs(total - block_sum[b], n - block_count[b]).transpose();
  double worst_rel = 0;
  for (int k = 0; k < rep.dim; ++k) {
    const double mean = deleted.col(k).mean();
    const double ss = (deleted.col(k).array() - mean).square().sum();
    const double sd = std::sqrt(ss * (n_blocks - 1.0) / n_blocks);
    worst_rel = std::max(worst_rel, sd / std::abs(lam(k)));
  }
  out.jackknife_rel_std = worst_rel;
  out.conclusive = worst_rel <= 0.10;
  return out;
}

/// Moment tests of uniformity on the 2-sphere.
struct IsotropyMoments {
  double first_moment_norm = 0;     // |mean n|, uniform gives O(1/sqrt(N))
  double first_moment_bound = 0;    // 4 / sqrt(N)
  double second_moment_max_dev = 0; // max |eig(mean n n^T) - 1/3|
  double second_moment_bound = 0;   // 5 sigma CLT band
  bool pass = false;
};

inline IsotropyMoments isotropy_moments(const std::vector<FrameVec>& dirs) {
  const double n = static_cast<double>(dirs.size());
  FrameVec mean = FrameVec::Zero();
  Mat3 second = Mat3::Zero();
  for (const auto& d : dirs) {
    mean += d;
    second += d * d.transpose();
  }
  mean /= n;
  second /= n;
  IsotropyMoments out;
  out.first_moment_norm = mean.norm();
  out.first_moment_bound = 4.0 / std::sqrt(n);
  Eigen::SelfAdjointEigenSolver<Mat3> es(second);
  out.second_moment_max_dev = (es.eigenvalues().array() - 1.0 / 3.0).abs().maxCoeff();
  // var of diagonal entries is 4/45 per sample for the uniform sphere
  out.second_moment_bound = 5.0 * std::sqrt(4.0 / 45.0 / n);
  out.pass = out.first_moment_norm <= out.first_moment_bound &&
             out.second_moment_max_dev <= out.second_moment_bound;
  return out;
}

struct IsotropyReport {
  IsotropyMoments povm_direction;
  IsotropyMoments postmeasurement_direction;
};

/// Uniformity of the POVM direction (and, at late times, the V direction).
inline IsotropyReport isotropy_check(const EnsembleStats& stats, double t) {
  const CheckpointSamples& cp = checkpoint_at(stats, t);
  IsotropyReport rep;
  rep.povm_direction = isotropy_moments(cp.n_u);
  rep.postmeasurement_direction = isotropy_moments(cp.n_v);
  return rep;
}

/// L1 distance between the ensemble histogram of a and the Fokker-Planck
/// density at matching time, both rebinned to a common width.  rebin_cells
/// merges that many grid cells per comparison bin; 0 picks a width that
/// keeps roughly 50 bins across the distribution's 6-sigma support.
inline double histogram_vs_fp(const EnsembleStats& stats, const RadialDistribution& fp,
                              int rebin_cells = 0) {
  const CheckpointSamples* cp = nullptr;
  for (const auto& c : stats.checkpoints)
    if (std::abs(c.t - fp.time) <= 0.5 * stats.config.dt) cp = &c;
  if (cp == nullptr)
    throw std::invalid_argument("histogram_vs_fp: no checkpoint matches the FP time");
  const double h = fp.grid.h();
  if (rebin_cells <= 0) {
    const double sigma = std::sqrt(fp.variance());
    rebin_cells = std::max(1, static_cast<int>(std::lround(6.0 * sigma / 50.0 / h)));
  }
  const int n_bins = (fp.grid.n_cells + rebin_cells - 1) / rebin_cells;
  std::vector<double> fp_mass(n_bins, 0.0), mc_mass(n_bins, 0.0);
  for (int i = 0; i < fp.grid.n_cells; ++i) fp_mass[i / rebin_cells] += fp.values[i] * h;
  const double inv = 1.0 / static_cast<double>(cp->a.size());
  for (double a : cp->a) {
    int cell = static_cast<int>(a / h);
    cell = std::clamp(cell, 0, fp.grid.n_cells - 1);
    mc_mass[cell / rebin_cells] += inv;
  }
  double l1 = 0;
  for (int b = 0; b < n_bins; ++b) l1 += std::abs(fp_mass[b] - mc_mass[b]);
  return l1;
}

/// Direction correlations across checkpoint pairs plus the freeze-out and
/// wander metrics between the first and last checkpoint.
struct UvDecorrelation {
  std::vector<double> times;
  Eigen::MatrixXd corr_u;  // E[n_U(t_i) . n_U(t_j)]
  Eigen::MatrixXd corr_v;  // E[n_V(t_i) . n_V(t_j)]
  double mean_angle_u = 0; // mean angular drift of n_U, first -> last
  double mean_angle_v = 0; // same for n_V
};

inline UvDecorrelation uv_decorrelation(const EnsembleStats& stats) {
  const std::size_t nc = stats.checkpoints.size();
  if (nc < 2) throw std::invalid_argument("uv_decorrelation: need at least two checkpoints");
  UvDecorrelation out;
  out.corr_u.resize(nc, nc);
  out.corr_v.resize(nc, nc);
  const std::int64_t n = stats.n_paths;
  for (std::size_t i = 0; i < nc; ++i) {
    out.times.push_back(stats.checkpoints[i].t);
    for (std::size_t jc = 0; jc < nc; ++jc) {
      double du = 0, dv = 0;
      for (std::int64_t p = 0; p < n; ++p) {
        du += stats.checkpoints[i].n_u[p].dot(stats.checkpoints[jc].n_u[p]);
        dv += stats.checkpoints[i].n_v[p].dot(stats.checkpoints[jc].n_v[p]);
      }
      out.corr_u(i, jc) = du / n;
      out.corr_v(i, jc) = dv / n;
    }
  }
  const auto& first = stats.checkpoints.front();
  const auto& last = stats.checkpoints.back();
  double au = 0, av = 0;
  for (std::int64_t p = 0; p < n; ++p) {
    au += std::acos(std::clamp(first.n_u[p].dot(last.n_u[p]), -1.0, 1.0));
    av += std::acos(std::clamp(first.n_v[p].dot(last.n_v[p]), -1.0, 1.0));
  }
  out.mean_angle_u = au / n;
  out.mean_angle_v = av / n;
  return out;
}

/// Empirical probability that the purity exceeds e^{-gamma T}, i.e. that
/// a(T) < gamma T / 2, paired with the closed-form collapse bound.
struct PurityTail {
  double empirical = 0;
  double bound = 0;
};

inline PurityTail purity_tail_empirical(const EnsembleStats& stats, double gammaT) {
  const double T = gammaT / stats.config.gamma;
  const CheckpointSamples& cp = checkpoint_at(stats, T);
  PurityTail out;
  const double threshold = 0.5 * gammaT;
  std::int64_t hits = 0;
  for (double a : cp.a) hits += (a < threshold);
  out.empirical = static_cast<double>(hits) / static_cast<double>(cp.a.size());
  out.bound = (gammaT > 0) ? std::sqrt(2.0 / (M_PI * gammaT)) * std::exp(-gammaT / 8.0)
                           : 0.0;
  return out;
}

}  // namespace krausflow

#endif
