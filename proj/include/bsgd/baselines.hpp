#pragma once

#include "bsgd/block_system.hpp"
#include "bsgd/cluster.hpp"
#include "bsgd/common.hpp"
#include "bsgd/tv.hpp"

#include <string>
#include <vector>

namespace bsgd {

enum class ClassicalMethod { Sirt, Cav, Gd, GdBb };
enum class StochasticMethod { Sag, Svrg };
enum class ProxMethod { Ista, Fista };

/// Iterate plus whatever memory the chosen method keeps.
struct BaselineState {
  Vec y;
  Vec x;
  double step = 0.0;
  Index iter = 0;
  Rng rng;

  // GD-BB
  Vec prev_x;
  Vec prev_grad;
  bool has_prev = false;

  // SAG: stored per-row-block gradients and their sum
  std::vector<Vec> table;

  // SVRG
  Vec anchor;
  Vec anchor_grad;

  // FISTA
  Vec momentum_point;
  Vec prev_iterate;
  double t = 1.0;
};

BaselineState init_baseline(const BlockSystem& system, const Vec& y, double step,
                            std::uint64_t seed);

/// Diagonal scalings used by SIRT and CAV.
struct ClassicalWeights {
  Vec inv_row_sums;  // 1 / sum_j a_ij (0 for empty rows)
  Vec inv_col_sums;  // 1 / sum_i a_ij (0 for empty columns)
  Vec cav_row;       // 1 / sum_j s_j a_ij^2, s_j = nonzeros in column j
};

ClassicalWeights classical_weights(const BlockSystem& system);

/// One whole-image iteration.
///   SIRT:  x += relax * C^-1 A^T R^-1 (y - A x)
///   CAV:   x += relax * A^T W (y - A x),  W_i = 1 / sum_j s_j a_ij^2
///   GD:    x += step * 2 A^T (y - A x)
///   GD-BB: GD with step = s^T s / s^T q from the last iterate/gradient pair
void classical_step(ClassicalMethod method, BaselineState& s, const BlockSystem& system,
                    const ClassicalWeights& w, double relaxation, CostLedger* ledger = nullptr);

/// SAG: refresh `rows_per_epoch` stored row-block gradients at the current
/// x (uniform without replacement) and step along their sum.
/// SVRG: one inner step on a uniformly drawn row block with the anchor
/// (and its full gradient) refreshed every M inner steps.
void stochastic_epoch(StochasticMethod method, BaselineState& s, const BlockSystem& system,
                      Index rows_per_epoch, CostLedger* ledger = nullptr);

/// ISTA: x = tv_prox(x + step * 2 A^T (y - A x), step * lambda).
/// FISTA: the same step taken at the momentum point with the usual
/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2 extrapolation.
void prox_step(ProxMethod method, BaselineState& s, const BlockSystem& system, double lambda,
               const ImageShape& shape, const TvOptions& tv = {}, CostLedger* ledger = nullptr);

/// FISTA's t_k, starting from t_1 = 1.
double fista_t(Index k);

}  // namespace bsgd
