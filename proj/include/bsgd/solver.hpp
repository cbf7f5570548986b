#pragma once

#include "bsgd/block_system.hpp"
#include "bsgd/cluster.hpp"
#include "bsgd/common.hpp"
#include "bsgd/partition.hpp"
#include "bsgd/tv.hpp"

#include <optional>
#include <vector>

namespace bsgd {

/// Everything the master node keeps between epochs.
struct SolverState {
  Vec y;                    // measured projections
  Vec x;                    // current estimate
  std::vector<Vec> z;       // z^j, one length-r vector per column block
  std::vector<Vec> g_hat;   // g^i, one length-c vector per row block
  Vec g;                    // sum_i g^i
  Vec r;                    // y - sum_j z^j
  double mu = 0.0;
  Index epoch = 0;
  Rng rng;
};

/// x = 0, z = 0, g = 0, r = y.
SolverState init_state(const BlockSystem& system, const Vec& y, double mu0, std::uint64_t seed);

/// Block pairs touched by one epoch. When `restricted_rows` is non-empty it
/// holds, for each (row block, column block) pair in row-major order, the
/// local rows of the block that take part.
struct EpochSelection {
  IndexList row_blocks;
  IndexList col_blocks;
  std::vector<IndexList> restricted_rows;
};

struct EpochOptions {
  int threads = 1;
  CostLedger* ledger = nullptr;
};

enum class TileSampling { Importance, Uniform };

/// Uniformly draws alpha*M row blocks then gamma*N column blocks without
/// replacement.
EpochSelection draw_selection(Rng& rng, const BlockSystem& system, const SamplingFractions& f);

/// Adds one sub-detector tile per angle of every selected pair, drawn from
/// the importance weights (or uniformly).
void draw_tiles(Rng& rng, const BlockSystem& system, TileSampling sampling, EpochSelection& sel);

/// One epoch body for an explicit selection: refresh z on the selected
/// pairs, rebuild r on the touched row blocks from all N memories, refresh
/// g^i on the selected pairs, re-aggregate g and step x on the selected
/// column blocks. Products within a phase may run concurrently; every
/// reduction runs in ascending block order.
void apply_epoch(SolverState& s, const BlockSystem& system, const EpochSelection& sel,
                 const EpochOptions& opts = {});

/// Block stochastic gradient descent epoch.
void bsgd_epoch(SolverState& s, const BlockSystem& system, const SamplingFractions& f,
                const EpochOptions& opts = {});

/// As bsgd_epoch, with one detector tile per angle sampled for every pair.
void bsgd_im_epoch(SolverState& s, const BlockSystem& system, const SamplingFractions& f,
                   TileSampling sampling, const EpochOptions& opts = {});

/// Epochs between two TV proximal steps: round(1 / (alpha * gamma)).
Index tv_period(const SamplingFractions& f);

/// bsgd_epoch followed, every tv_period epochs, by x = tv_prox(x, mu*lambda).
void bsgd_tv_epoch(SolverState& s, const BlockSystem& system, const SamplingFractions& f,
                   double lambda, const ImageShape& shape, const TvOptions& tv = {},
                   const EpochOptions& opts = {});

/// y - sum_j z^j for one global row, summing memories in block order.
double residual_entry(const SolverState& s, Index row);

}  // namespace bsgd
