#include "bsgd/baselines.hpp"
#include "bsgd/block_system.hpp"
#include "bsgd/experiment.hpp"
#include "bsgd/fixedpoint.hpp"
#include "bsgd/lsqr.hpp"
#include "bsgd/metrics.hpp"
#include "bsgd/phantom.hpp"
#include "bsgd/siddon.hpp"
#include "bsgd/solver.hpp"
#include "bsgd/tuning.hpp"
#include "bsgd/tv.hpp"

#include "instances.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace bsgd;
using bsgd::testing::fan_params;
using bsgd::testing::cone_params;
using bsgd::testing::preset;
using bsgd::testing::random_vec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Vec dense_least_squares(const BlockSystem& sys, const Vec& y) {
  const Eigen::MatrixXd a = sys.dense();
  return (a.transpose() * a).ldlt().solve(a.transpose() * y);
}

/// Block multiplications until ||x - x_lsq|| <= target, or +inf.
double mults_to_ds(const BlockSystem& sys, const Vec& y, const Vec& x_lsq, const SamplingFractions& f,
                   double mu, std::uint64_t seed, double target, Index max_epochs) {
  SolverState s = init_state(sys, y, mu, seed);
  CostLedger ledger;
  for (Index k = 1; k <= max_epochs; ++k) {
    bsgd_epoch(s, sys, f, {1, &ledger});
    const double ds = (s.x - x_lsq).norm();
    if (!std::isfinite(ds)) break;
    if (ds <= target) return static_cast<double>(ledger.totals().block_mults);
  }
  return std::numeric_limits<double>::infinity();
}

// 1. Least-squares convergence on the fig4 system.
Outcome criterion_least_squares() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = preset("fig4_bsgd");
  const Problem p = build_problem(cfg);
  const Vec x_dense = dense_least_squares(*p.system, p.y);
  const double oracle_err = (p.x_lsq - x_dense).norm() / x_dense.norm();
  const double lsq = p.x_lsq.norm();

  const StepSearch grid = grid_search_step(cfg, p, {1e-4, 2e-4, 3e-4, 5e-4, 7e-4});
  cfg.step = grid.best;
  cfg.metric_period = cfg.epochs;
  const RunLog bsgd_log = run_on_problem(cfg, p);
  const double bsgd_ds = (bsgd_log.x - p.x_lsq).norm();

  // Classical methods get their best relaxation.
  auto best_classical = [&](Method m) {
    double best = std::numeric_limits<double>::infinity();
    for (double relax : {0.5, 1.0, 1.5, 1.9}) {
      ExperimentConfig c = cfg;
      c.method = m;
      c.relaxation = relax;
      const RunLog log = run_on_problem(c, p);
      if (!log.diverged) best = std::min(best, (log.x - p.x_lsq).norm());
    }
    return best;
  };
  const double sirt_ds = best_classical(Method::Sirt);
  const double cav_ds = best_classical(Method::Cav);
  const double secs = seconds_since(t0);

  Outcome o;
  o.pass = oracle_err <= 1e-6 && p.lsq_converged && bsgd_ds <= 1e-3 * lsq && sirt_ds >= 10.0 * bsgd_ds &&
           cav_ds >= 10.0 * bsgd_ds && secs <= 120.0;
  o.detail = fmt("mu=%g DS/|x_lsq| bsgd=%.3e sirt=%.3e cav=%.3e; lsqr vs normal eq %.1e; %.1fs", grid.best,
                 bsgd_ds / lsq, sirt_ds / lsq, cav_ds / lsq, oracle_err, secs);
  return o;
}

// 2. BSGD reduces to SAG (gamma = 1) and to GD (M = N = 1).
Outcome criterion_reductions() {
  ExperimentConfig cfg = preset("fig4_bsgd");
  const Problem p = build_problem(cfg, false);
  const BlockSystem& sys = *p.system;
  const double mu = 2e-4;
  const auto f = SamplingFractions::from_counts(2, sys.col_block_count(), sys.row_block_count(),
                                                sys.col_block_count());
  SolverState b = init_state(sys, p.y, mu, 77);
  BaselineState sag = init_baseline(sys, p.y, mu, 77);
  double worst_sag = 0.0;
  for (int k = 0; k < 200; ++k) {
    bsgd_epoch(b, sys, f);
    stochastic_epoch(StochasticMethod::Sag, sag, sys, f.row_count);
    worst_sag = std::max(worst_sag, (b.x - sag.x).norm() / std::max(b.x.norm(), 1e-300));
  }

  const Geometry g = build_geometry(cfg.geometry);
  const BlockSystem one(g, make_partition(g, 1, 1, 1));
  SolverState b1 = init_state(one, p.y, mu, 3);
  BaselineState gd = init_baseline(one, p.y, mu, 3);
  const ClassicalWeights w;
  bool exact = true;
  for (int k = 0; k < 200; ++k) {
    bsgd_epoch(b1, one, SamplingFractions::from_counts(1, 1, 1, 1));
    classical_step(ClassicalMethod::Gd, gd, one, w, 1.0);
    exact = exact && b1.x == gd.x;
  }
  Outcome o;
  o.pass = worst_sag <= 1e-12 && exact;
  o.detail = fmt("max per-epoch rel diff BSGD vs SAG %.2e; BSGD(M=N=1) == GD bitwise: %s", worst_sag,
                 exact ? "yes" : "no");
  return o;
}

// 3. The lifted recursion leaves the least-squares state invariant.
Outcome criterion_fixed_point() {
  const auto t0 = Clock::now();
  struct Case {
    Index side, detectors, m, n;
  };
  bool pass = true;
  std::string detail;
  for (const Case c : {Case{4, 8, 2, 2}, Case{8, 15, 4, 2}, Case{16, 30, 4, 2}}) {
    const Geometry g = build_geometry(fan_params(c.side, c.detectors));
    const BlockSystem sys(g, make_partition(g, c.m, c.n, 1));
    const Vec y = add_noise(sys.forward(shepp_logan(c.side, 2)), 17.5, 100 + c.side);
    const Vec x_lsq = dense_least_squares(sys, y);
    const Eigen::MatrixXd a = sys.dense();
    const double sigma2 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a.transpose() * a).eigenvalues().maxCoeff();
    const FixedPointReport rep = verify_fixed_point(sys, y, x_lsq, 0.5 / sigma2, 100, 9, 1e-3);
    const double at_lsq = std::max(rep.aligned_change, rep.independent_change);
    const double perturbed = std::min(rep.perturbed_aligned_change, rep.perturbed_independent_change);
    pass = pass && at_lsq <= 1e-8 && perturbed > 1e-4;
    detail += fmt("K=%lld: %.1e / %.1e; ", static_cast<long long>(c.side), at_lsq, perturbed);
  }
  const double secs = seconds_since(t0);
  pass = pass && secs <= 60.0;
  Outcome o;
  o.pass = pass;
  o.detail = "change at x_lsq / at perturbed state: " + detail + fmt("%.1fs", secs);
  return o;
}

// 4. Adjointness of random blocks and completeness of the partition.
Outcome criterion_adjoint() {
  Rng rng(2024);
  double worst = 0.0;
  int tested = 0;
  std::vector<std::unique_ptr<BlockSystem>> systems;
  for (const auto& p : {fan_params(16, 30), cone_params(8, 12, 30.0)}) {
    const Geometry g = build_geometry(p);
    systems.push_back(std::make_unique<BlockSystem>(g, make_partition(g, 6, 4, 1)));
  }
  while (tested < 100) {
    const BlockSystem& sys = *systems[static_cast<std::size_t>(tested % 2)];
    const auto i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(sys.row_block_count())));
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(sys.col_block_count())));
    const SparseBlock& b = sys.block(i, j);
    const Vec x = random_vec(rng, b.cols_count());
    const Vec r = random_vec(rng, b.rows());
    const Vec ax = forward_block(b, x);
    const Vec atr = back_block(b, r);
    const double lhs = ax.dot(r), rhs = x.dot(atr);
    const double scale = std::max(ax.norm() * r.norm(), 1e-300);
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
    // Matrix-free tracing agrees with the stored block.
    const Vec traced = trace_forward(sys.geometry(), b.row_ids, b.col_ids, x);
    worst = std::max(worst, (traced - ax).norm() / std::max(ax.norm(), 1e-300));
    ++tested;
  }

  const Geometry g = build_geometry(fan_params(8, 15));
  const BlockSystem sys(g, make_partition(g, 4, 4, 1));
  const Vec x = random_vec(rng, sys.cols());
  Vec full = Vec::Zero(sys.rows());
  for (Index r = 0; r < sys.rows(); ++r)
    for (const auto& e : siddon_trace(g, r)) full[r] += e.length * x[e.col];
  Vec summed = Vec::Zero(sys.rows());
  for (Index i = 0; i < sys.row_block_count(); ++i)
    for (Index j = 0; j < sys.col_block_count(); ++j) {
      const SparseBlock& b = sys.block(i, j);
      const Vec part = forward_block(b, sys.gather(x, j));
      for (Index k = 0; k < b.rows(); ++k) summed[b.row_ids[k]] += part[k];
    }
  const double completeness = (summed - full).norm() / full.norm();
  Outcome o;
  o.pass = worst <= 1e-10 && completeness <= 1e-10;
  o.detail = fmt("%d random blocks, worst adjoint/trace mismatch %.1e; block-sum FP vs full FP %.1e (K=8)",
                 tested, worst, completeness);
  return o;
}

// 5. Smaller gamma needs at least as many block multiplications.
Outcome criterion_gamma_ordering() {
  ExperimentConfig cfg = preset("fig4_bsgd");
  cfg.row_blocks = 4;
  cfg.col_blocks = 4;
  const Problem p = build_problem(cfg);
  const BlockSystem& sys = *p.system;
  const double target = 1e-2 * p.x_lsq.norm();
  const Index nodes = 4;  // block pairs per epoch
  std::vector<double> med;
  std::string detail;
  for (Index cols : {4, 2, 1}) {
    const auto f = SamplingFractions::from_counts(nodes / cols, cols, 4, 4);
    double best = std::numeric_limits<double>::infinity();
    double best_mu = 0.0;
    for (double mu : {1e-4, 2e-4, 3e-4, 5e-4, 7e-4}) {
      std::vector<double> runs;
      for (std::uint64_t seed = 1; seed <= 10; ++seed)
        runs.push_back(mults_to_ds(sys, p.y, p.x_lsq, f, mu, seed, target, 40000));
      const double m = median(runs);
      if (m < best) {
        best = m;
        best_mu = mu;
      }
    }
    med.push_back(best);
    detail += fmt("gamma=%.2f: %.0f (mu=%g); ", f.gamma, best, best_mu);
  }
  Outcome o;
  o.pass = std::isfinite(med[0]) && med[0] <= med[1] && med[1] <= med[2];
  o.detail = "median block mults to DS<=1e-2|x_lsq|: " + detail;
  return o;
}

struct TunedRun {
  double final_ds = 0.0;
  double r0 = 0.0;
  double r_final = 0.0;
  double r_max = 0.0;
  double mu_final = 0.0;
  Index increases = 0;
  Index decreases = 0;
  Index residual_rises = 0;  // checkpoints where ||r|| went up
  bool finite = true;
};

TunedRun tuned_run(const BlockSystem& sys, const Problem& p, const SamplingFractions& f, double mu0,
                   TuningMode mode, double delta, Index epochs, std::uint64_t seed) {
  SolverState s = init_state(sys, p.y, mu0, seed);
  TuningConstants c;
  c.delta = delta;
  c.period = sys.row_block_count();
  StepTuner tuner(c, mode, sys.cols());
  TunedRun out;
  out.r0 = p.y.norm();
  out.r_max = out.r0;
  double prev = out.r0;
  for (Index k = 1; k <= epochs; ++k) {
    bsgd_epoch(s, sys, f);
    tuner.after_epoch(s);
    if (k % c.period == 0) {
      const double r = s.r.norm();
      if (r > prev) ++out.residual_rises;
      prev = r;
      out.r_max = std::max(out.r_max, r);
    }
    if (!s.x.allFinite()) {
      out.finite = false;
      out.r_max = std::numeric_limits<double>::infinity();
      break;
    }
  }
  out.final_ds = (s.x - p.x_lsq).norm();
  out.r_final = s.r.norm();
  out.mu_final = s.mu;
  out.increases = tuner.increases();
  out.decreases = tuner.decreases();
  return out;
}

// 6. Step-length tuning recovers from a tenfold step; criterion 1 alone does not.
Outcome criterion_tuning() {
  ExperimentConfig cfg = preset("fig4_bsgd");
  const Problem p = build_problem(cfg);
  const BlockSystem& sys = *p.system;
  const SamplingFractions f = select_alpha_gamma(2, sys.row_block_count(), sys.col_block_count());
  const Index epochs = cfg.epochs;
  cfg.node_num = 2;
  const StepSearch grid = grid_search_step(cfg, p, {1e-4, 2e-4, 3e-4, 5e-4, 7e-4});
  const double mu_t = grid.best;
  const TunedRun fixed = tuned_run(sys, p, f, mu_t, TuningMode::Off, 0.4, epochs, 1);
  const TunedRun both = tuned_run(sys, p, f, 10.0 * mu_t, TuningMode::ResidualAndAngle, 0.4, epochs, 1);
  const TunedRun off = tuned_run(sys, p, f, 10.0 * mu_t, TuningMode::Off, 0.4, epochs, 1);
  const TunedRun small = tuned_run(sys, p, f, 10.0 * mu_t, TuningMode::Residual, 0.05, epochs, 1);
  const TunedRun large = tuned_run(sys, p, f, 10.0 * mu_t, TuningMode::Residual, 0.8, epochs, 1);

  auto stuck_or_oscillating = [&](const TunedRun& r) {
    const bool fails_to_match = !(r.final_ds <= 2.0 * fixed.final_ds);
    const bool stuck = r.mu_final < 0.1 * mu_t;
    const bool oscillating = !r.finite || r.r_max >= 10.0 * r.r0 || r.decreases >= 3;
    return fails_to_match && (stuck || oscillating);
  };
  const bool both_ok = both.finite && both.r_final < both.r0 && both.final_ds <= 2.0 * fixed.final_ds;
  const bool off_diverges = off.r_max >= 10.0 * off.r0;
  Outcome o;
  o.pass = both_ok && off_diverges && stuck_or_oscillating(small) && stuck_or_oscillating(large);
  o.detail = fmt(
      "tuned mu=%g DS=%.2e; c1c2: DS=%.2e mu_end=%.2e |r| %.3g->%.3g; off: max|r|/|r0|=%.2e; "
      "c1 d=0.05: DS=%.2e mu_end=%.2e max|r|/|r0|=%.2e dec=%lld; c1 d=0.8: DS=%.2e mu_end=%.2e dec=%lld",
      mu_t, fixed.final_ds, both.final_ds, both.mu_final, both.r0, both.r_final, off.r_max / off.r0,
      small.final_ds, small.mu_final, small.r_max / small.r0, static_cast<long long>(small.decreases),
      large.final_ds, large.mu_final, static_cast<long long>(large.decreases));
  return o;
}

/// argmin ||t - x||^2 + 2 w TV(t) by subgradient descent with 1/(2k) steps
/// and iterate averaging.
Vec subgradient_prox(const Vec& x, Index side, double w, Index iters) {
  const Index n = side * side;
  Vec t = x, avg = Vec::Zero(n);
  double weight_sum = 0.0;
  Vec g(n);
  for (Index k = 1; k <= iters; ++k) {
    g = 2.0 * (t - x);
    for (Index iy = 0; iy < side; ++iy)
      for (Index ix = 0; ix < side; ++ix) {
        const Index p = iy * side + ix;
        const double dx = ix > 0 ? t[p] - t[p - 1] : 0.0;
        const double dy = iy > 0 ? t[p] - t[p - side] : 0.0;
        const double mag = std::sqrt(dx * dx + dy * dy);
        if (mag == 0.0) continue;
        if (ix > 0) {
          g[p] += 2.0 * w * dx / mag;
          g[p - 1] -= 2.0 * w * dx / mag;
        }
        if (iy > 0) {
          g[p] += 2.0 * w * dy / mag;
          g[p - side] -= 2.0 * w * dy / mag;
        }
      }
    t -= g / (2.0 * static_cast<double>(k));
    avg += static_cast<double>(k) * t;
    weight_sum += static_cast<double>(k);
  }
  return avg / weight_sum;
}

// 7. TV study on the K = 64 limited-angle fan-beam scan.
Outcome criterion_tv() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = preset("tv_bsgd_tv");
  const Problem p = build_problem(cfg, false);
  const BlockSystem& sys = *p.system;
  const SamplingFractions f = config_fractions(cfg);
  const double weight = effective_epoch_weight(cfg, f);
  const auto epochs_500 = static_cast<Index>(std::llround(500.0 / weight));
  const Index per_effective = static_cast<Index>(std::llround(1.0 / weight));

  // One step length for every method: the best one for BSGD-TV.
  struct Trace {
    double mu;
    std::vector<double> snr;  // per effective epoch, index 0 = start
  };
  std::vector<Trace> traces;
  for (double mu : {5e-6, 1e-5, 2e-5, 3e-5}) {
    SolverState s = init_state(sys, p.y, mu, cfg.seed);
    Trace tr{mu, {reconstruction_snr(s.x, p.x_true)}};
    for (Index k = 1; k <= epochs_500; ++k) {
      bsgd_tv_epoch(s, sys, f, cfg.lambda, p.shape, cfg.tv, {cfg.threads, nullptr});
      if (k % per_effective == 0) tr.snr.push_back(s.x.allFinite() ? reconstruction_snr(s.x, p.x_true) : -1e9);
    }
    traces.push_back(tr);
  }
  const auto best = std::max_element(traces.begin(), traces.end(),
                                     [](const Trace& a, const Trace& b) { return a.snr.back() < b.snr.back(); });
  const double mu = best->mu;

  BaselineState gd = init_baseline(sys, p.y, mu, cfg.seed);
  BaselineState ista = init_baseline(sys, p.y, mu, cfg.seed);
  const ClassicalWeights none;
  for (int k = 0; k < 500; ++k) {
    classical_step(ClassicalMethod::Gd, gd, sys, none, 1.0);
    prox_step(ProxMethod::Ista, ista, sys, cfg.lambda, p.shape, cfg.tv);
  }
  const double snr_gd = reconstruction_snr(gd.x, p.x_true);
  const double snr_ista = reconstruction_snr(ista.x, p.x_true);
  const double snr_tv = best->snr.back();
  Index reach = -1;
  for (std::size_t e = 0; e < best->snr.size(); ++e)
    if (best->snr[e] >= snr_ista) {
      reach = static_cast<Index>(e);
      break;
    }

  // Proximal operator against a brute-force minimiser on a 4x4 step image.
  Vec step_img = Vec::Zero(16);
  for (Index k = 0; k < 16; ++k)
    if (k % 4 >= 2) step_img[k] = 1.0;
  const Vec brute = subgradient_prox(step_img, 4, 0.1, 1000000);
  const Vec prox = tv_prox(step_img, ImageShape{4, 2}, 0.1, {1000, 1e-12});
  const double prox_err = (brute - prox).cwiseAbs().maxCoeff();

  Outcome o;
  const bool gap_ok = snr_tv >= snr_gd + 3.0;
  const bool reach_ok = reach >= 0 && reach < 500;
  o.pass = gap_ok && reach_ok && prox_err <= 1e-3;
  o.detail = fmt(
      "mu=%g SNR@500: BSGD-TV %.2f dB, GD %.2f dB (gap %.2f, need 3), ISTA %.2f dB; BSGD-TV reaches it at "
      "effective epoch %lld; tv_prox vs brute force %.1e; %.0fs",
      mu, snr_tv, snr_gd, snr_tv - snr_gd, snr_ista, static_cast<long long>(reach), prox_err, seconds_since(t0));
  return o;
}

/// Block multiplications until ||y - A x|| <= target, or +inf.
double mults_to_gap(const BlockSystem& sys, const Vec& y, const SamplingFractions& f, TileSampling sampling,
                    double mu, std::uint64_t seed, double target, Index max_epochs, Index check_every) {
  SolverState s = init_state(sys, y, mu, seed);
  CostLedger ledger;
  for (Index k = 1; k <= max_epochs; ++k) {
    bsgd_im_epoch(s, sys, f, sampling, {1, &ledger});
    if (k % check_every) continue;
    if (!s.x.allFinite()) break;
    if ((y - sys.forward(s.x)).norm() <= target) return static_cast<double>(ledger.totals().block_mults);
  }
  return std::numeric_limits<double>::infinity();
}

// 8. Importance-sampled sub-detector tiles beat uniform tiles.
Outcome criterion_importance() {
  ExperimentConfig cfg = preset("im_bsgd_im");
  const Problem p = build_problem(cfg, false);
  const BlockSystem& sys = *p.system;
  const SamplingFractions f = config_fractions(cfg);
  const double target = 0.1 * p.y.norm();
  std::vector<double> im, ran;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    im.push_back(mults_to_gap(sys, p.y, f, TileSampling::Importance, cfg.step, seed, target, 20000, 10));
    ran.push_back(mults_to_gap(sys, p.y, f, TileSampling::Uniform, cfg.step, seed, target, 20000, 10));
  }
  const double m_im = median(im), m_ran = median(ran);
  Outcome o;
  o.pass = std::isfinite(m_im) && m_im < m_ran;
  o.detail = fmt("median block mults to GAP<=0.1|y|: IM %.0f, RAN %.0f (mu=%g, %lld tiles)", m_im, m_ran,
                 cfg.step, static_cast<long long>(sys.partition().tiles_per_angle()));
  return o;
}

// 9. Ledger increments, schedule invariance and the storage sweep.
Outcome criterion_accounting() {
  ExperimentConfig cfg = preset("fig4_bsgd");
  const Problem p = build_problem(cfg, false);
  const BlockSystem& sys = *p.system;
  bool increments = true;
  for (auto [rc, cc] : {std::pair<Index, Index>{4, 2}, {2, 1}, {1, 2}, {3, 1}}) {
    const auto f = SamplingFractions::from_counts(rc, cc, 4, 2);
    SolverState s = init_state(sys, p.y, 2e-4, 5);
    CostLedger ledger;
    std::uint64_t prev = 0;
    for (int k = 0; k < 50; ++k) {
      bsgd_epoch(s, sys, f, {2, &ledger});
      const std::uint64_t now = ledger.totals().block_mults;
      increments = increments && now - prev == static_cast<std::uint64_t>(2 * rc * cc);
      prev = now;
    }
  }

  // Replaying one epoch's block products in different node schedules.
  Rng rng(3);
  const EpochSelection sel = draw_selection(rng, sys, SamplingFractions::from_counts(3, 2, 4, 2));
  std::vector<BlockTask> tasks;
  std::vector<ProductEvent> events;
  for (Index i : sel.row_blocks)
    for (Index j : sel.col_blocks) {
      const SparseBlock& b = sys.block(i, j);
      tasks.push_back({i, j});
      events.push_back({ProductKind::Forward, b.rows(), b.cols_count()});
    }
  for (Index i : sel.row_blocks)
    for (Index j : sel.col_blocks) {
      const SparseBlock& b = sys.block(i, j);
      tasks.push_back({i, j});
      events.push_back({ProductKind::Back, b.rows(), b.cols_count()});
    }
  SolverState s = init_state(sys, p.y, 2e-4, 5);
  CostLedger live;
  apply_epoch(s, sys, sel, {4, &live});
  bool invariant = true;
  for (Index nodes : {1, 2, 3, 5, 12})
    invariant = invariant && replay_schedule(plan_rounds(nodes, tasks), events) == live.totals();

  const StorageSweep sweep = storage_sweep(sys.rows(), cfg.geometry.volume_side, 2, 140, 512, 64);
  bool marked = false;
  for (const auto& c : sweep.candidates)
    if (c.row_blocks == 16 && c.col_blocks == 4) marked = c.within_budget;

  Outcome o;
  o.pass = increments && invariant && marked;
  o.detail = fmt("increments 2*aM*gN: %s; schedule invariant: %s; sweep marks M=16,N=4 within m+n<=140: %s",
                 increments ? "yes" : "no", invariant ? "yes" : "no", marked ? "yes" : "no");
  return o;
}

// 10. Byte-identical CSV logs, serial and fully parallel.
Outcome criterion_determinism() {
  const int hw = static_cast<int>(std::max(8u, std::thread::hardware_concurrency()));
  bool same = true;
  std::string detail;
  for (const std::string name : {"fig4_bsgd", "im_bsgd_ran"}) {
    ExperimentConfig cfg = preset(name);
    cfg.epochs = std::min<Index>(cfg.epochs, 300);
    cfg.metric_period = 10;
    cfg.threads = 1;
    const std::string a = format_csv(run_experiment(cfg));
    const std::string b = format_csv(run_experiment(cfg));
    cfg.threads = hw;
    const std::string c = format_csv(run_experiment(cfg));
    same = same && a == b && a == c;
    detail += fmt("%s %zu bytes; ", name.c_str(), a.size());
  }
  Outcome o;
  o.pass = same;
  o.detail = detail + fmt("threads 1 vs %d identical: %s", hw, same ? "yes" : "no");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"least-squares convergence", criterion_least_squares},
      {"reduction identities", criterion_reductions},
      {"fixed-point stationarity", criterion_fixed_point},
      {"adjoint and partition completeness", criterion_adjoint},
      {"gamma slowdown ordering", criterion_gamma_ordering},
      {"step-length tuning", criterion_tuning},
      {"TV study", criterion_tv},
      {"importance sampling", criterion_importance},
      {"accounting invariants", criterion_accounting},
      {"determinism", criterion_determinism},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::stoi(argv[k]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
