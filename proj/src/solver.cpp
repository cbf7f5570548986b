#include "bsgd/solver.hpp"

#include "bsgd/parallel.hpp"

#include <cmath>

namespace bsgd {

SolverState init_state(const BlockSystem& system, const Vec& y, double mu0, std::uint64_t seed) {
  if (!(mu0 > 0.0)) throw Error("init_state: step length must be positive");
  if (y.size() != system.rows()) throw DimensionError("init_state: y has wrong length");
  SolverState s;
  s.y = y;
  s.x = Vec::Zero(system.cols());
  s.z.assign(static_cast<std::size_t>(system.col_block_count()), Vec::Zero(system.rows()));
  s.g_hat.assign(static_cast<std::size_t>(system.row_block_count()), Vec::Zero(system.cols()));
  s.g = Vec::Zero(system.cols());
  s.r = y;
  s.mu = mu0;
  s.rng = Rng(seed);
  return s;
}

double residual_entry(const SolverState& s, Index row) {
  double acc = s.z[0][row];
  for (std::size_t j = 1; j < s.z.size(); ++j) acc += s.z[j][row];
  return s.y[row] - acc;
}

EpochSelection draw_selection(Rng& rng, const BlockSystem& system, const SamplingFractions& f) {
  EpochSelection sel;
  sel.row_blocks = sample_without_replacement(rng, system.row_block_count(), f.row_count);
  sel.col_blocks = sample_without_replacement(rng, system.col_block_count(), f.col_count);
  return sel;
}

void draw_tiles(Rng& rng, const BlockSystem& system, TileSampling sampling, EpochSelection& sel) {
  const Index tiles = system.partition().tiles_per_angle();
  const std::vector<double> uniform(static_cast<std::size_t>(tiles), 1.0 / static_cast<double>(tiles));
  sel.restricted_rows.clear();
  for (Index i : sel.row_blocks) {
    const auto& angles = system.partition().block_angles.at(static_cast<std::size_t>(i));
    for (Index j : sel.col_blocks) {
      IndexList rows;
      for (std::size_t slot = 0; slot < angles.size(); ++slot) {
        const auto& w =
            sampling == TileSampling::Importance ? system.tile_weights(j, angles[slot]) : uniform;
        const Index t = sample_weighted(rng, w);
        const auto& tr = system.tile_rows(i, static_cast<Index>(slot), t);
        rows.insert(rows.end(), tr.begin(), tr.end());
      }
      sel.restricted_rows.push_back(std::move(rows));
    }
  }
}

void apply_epoch(SolverState& s, const BlockSystem& system, const EpochSelection& sel,
                 const EpochOptions& opts) {
  const std::size_t n_rows = sel.row_blocks.size();
  const std::size_t n_cols = sel.col_blocks.size();
  const std::size_t n_tasks = n_rows * n_cols;
  const bool restricted = !sel.restricted_rows.empty();
  if (restricted && sel.restricted_rows.size() != n_tasks)
    throw DimensionError("apply_epoch: restricted row lists do not match the selection");
  if (s.x.size() != system.cols() || s.r.size() != system.rows())
    throw DimensionError("apply_epoch: state does not match the system");

  auto task_block = [&](std::size_t t) -> const SparseBlock& {
    return system.block(sel.row_blocks[t / n_cols], sel.col_blocks[t % n_cols]);
  };

  // Forward phase: z^j_{I_i} = A_{I_i}^{J_j} x_{J_j}.
  parallel_for(n_tasks, opts.threads, [&](std::size_t t) {
    const Index j = sel.col_blocks[t % n_cols];
    const SparseBlock& b = task_block(t);
    const Vec xj = system.gather(s.x, j);
    Vec& zj = s.z[static_cast<std::size_t>(j)];
    if (restricted) {
      const auto& rows = sel.restricted_rows[t];
      const Vec part = forward_block_rows(b, rows, xj, opts.ledger);
      for (std::size_t q = 0; q < rows.size(); ++q) zj[b.row_ids[rows[q]]] = part[static_cast<Index>(q)];
    } else {
      const Vec part = forward_block(b, xj, opts.ledger);
      for (Index k = 0; k < b.rows(); ++k) zj[b.row_ids[k]] = part[k];
    }
  });

  // r = y - sum_j z^j; only rows of the touched row blocks can change.
  parallel_for(n_rows, opts.threads, [&](std::size_t q) {
    for (Index row : system.row_block(sel.row_blocks[q])) s.r[row] = residual_entry(s, row);
  });

  // Back phase: g^i_{J_j} = 2 (A_{I_i}^{J_j})^T r_{I_i}.
  parallel_for(n_tasks, opts.threads, [&](std::size_t t) {
    const Index i = sel.row_blocks[t / n_cols];
    const Index j = sel.col_blocks[t % n_cols];
    const SparseBlock& b = task_block(t);
    Vec part;
    if (restricted) {
      const auto& rows = sel.restricted_rows[t];
      Vec rr(static_cast<Index>(rows.size()));
      for (std::size_t q = 0; q < rows.size(); ++q) rr[static_cast<Index>(q)] = s.r[b.row_ids[rows[q]]];
      part = back_block_rows(b, rows, rr, opts.ledger);
    } else {
      part = back_block(b, system.gather_rows(s.r, i), opts.ledger);
    }
    Vec& gi = s.g_hat[static_cast<std::size_t>(i)];
    const auto& cols = system.col_block(j);
    for (std::size_t l = 0; l < cols.size(); ++l) gi[cols[l]] = 2.0 * part[static_cast<Index>(l)];
  });

  // g = sum_i g^i and x_J += mu g_J on the selected column blocks.
  parallel_for(n_cols, opts.threads, [&](std::size_t q) {
    for (Index c : system.col_block(sel.col_blocks[q])) {
      double acc = 0.0;
      for (const auto& gi : s.g_hat) acc += gi[c];
      s.g[c] = acc;
      s.x[c] += s.mu * acc;
    }
  });
  ++s.epoch;
}

void bsgd_epoch(SolverState& s, const BlockSystem& system, const SamplingFractions& f,
                const EpochOptions& opts) {
  const EpochSelection sel = draw_selection(s.rng, system, f);
  apply_epoch(s, system, sel, opts);
}

void bsgd_im_epoch(SolverState& s, const BlockSystem& system, const SamplingFractions& f,
                   TileSampling sampling, const EpochOptions& opts) {
  EpochSelection sel = draw_selection(s.rng, system, f);
  draw_tiles(s.rng, system, sampling, sel);
  apply_epoch(s, system, sel, opts);
}

Index tv_period(const SamplingFractions& f) {
  return std::max<Index>(1, static_cast<Index>(std::llround(1.0 / (f.alpha * f.gamma))));
}

void bsgd_tv_epoch(SolverState& s, const BlockSystem& system, const SamplingFractions& f,
                   double lambda, const ImageShape& shape, const TvOptions& tv,
                   const EpochOptions& opts) {
  bsgd_epoch(s, system, f, opts);
  if (s.epoch % tv_period(f) == 0) s.x = tv_prox(s.x, shape, s.mu * lambda, tv);
}

}  // namespace bsgd
