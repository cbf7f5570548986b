#include "bsgd/baselines.hpp"

#include <cmath>
#include <iostream>

namespace bsgd {

BaselineState init_baseline(const BlockSystem& system, const Vec& y, double step,
                            std::uint64_t seed) {
  if (y.size() != system.rows()) throw DimensionError("init_baseline: y has wrong length");
  BaselineState s;
  s.y = y;
  s.x = Vec::Zero(system.cols());
  s.step = step;
  s.rng = Rng(seed);
  return s;
}

ClassicalWeights classical_weights(const BlockSystem& system) {
  const Index r = system.rows();
  const Index c = system.cols();
  Vec row_sums = Vec::Zero(r);
  Vec col_sums = Vec::Zero(c);
  Vec col_nnz = Vec::Zero(c);
  for (Index i = 0; i < system.row_block_count(); ++i) {
    for (Index j = 0; j < system.col_block_count(); ++j) {
      const auto& b = system.block(i, j);
      for (Index k = 0; k < b.rows(); ++k) {
        for (Index p = b.row_ptr[k]; p < b.row_ptr[k + 1]; ++p) {
          if (b.vals[p] == 0.0) continue;
          row_sums[b.row_ids[k]] += b.vals[p];
          col_sums[b.col_ids[b.cols[p]]] += b.vals[p];
          col_nnz[b.col_ids[b.cols[p]]] += 1.0;
        }
      }
    }
  }
  Vec cav_denominator = Vec::Zero(r);
  for (Index i = 0; i < system.row_block_count(); ++i) {
    for (Index j = 0; j < system.col_block_count(); ++j) {
      const auto& b = system.block(i, j);
      for (Index k = 0; k < b.rows(); ++k)
        for (Index p = b.row_ptr[k]; p < b.row_ptr[k + 1]; ++p)
          cav_denominator[b.row_ids[k]] += col_nnz[b.col_ids[b.cols[p]]] * b.vals[p] * b.vals[p];
    }
  }
  auto invert = [](const Vec& v) {
    Vec out(v.size());
    for (Index k = 0; k < v.size(); ++k) out[k] = v[k] > 0.0 ? 1.0 / v[k] : 0.0;
    return out;
  };
  return {invert(row_sums), invert(col_sums), invert(cav_denominator)};
}

void classical_step(ClassicalMethod method, BaselineState& s, const BlockSystem& system,
                    const ClassicalWeights& w, double relaxation, CostLedger* ledger) {
  const Vec r = s.y - system.forward(s.x, ledger);
  switch (method) {
    case ClassicalMethod::Sirt: {
      const Vec bp = system.back(w.inv_row_sums.cwiseProduct(r), ledger);
      s.x += relaxation * w.inv_col_sums.cwiseProduct(bp);
      break;
    }
    case ClassicalMethod::Cav: {
      s.x += relaxation * system.back(w.cav_row.cwiseProduct(r), ledger);
      break;
    }
    case ClassicalMethod::Gd: {
      const Vec g = 2.0 * system.back(r, ledger);
      s.x += s.step * g;
      break;
    }
    case ClassicalMethod::GdBb: {
      // Descent direction g = -grad f, grad f = -2 A^T r.
      const Vec g = 2.0 * system.back(r, ledger);
      if (s.has_prev) {
        const Vec ds = s.x - s.prev_x;
        const Vec dq = s.prev_grad - g;  // grad_k - grad_{k-1}
        const double denom = ds.dot(dq);
        if (denom != 0.0 && std::isfinite(denom)) {
          s.step = ds.squaredNorm() / denom;
        } else {
          std::cerr << "warning: Barzilai-Borwein denominator vanished at iteration " << s.iter
                    << "; keeping step " << s.step << "\n";
        }
      }
      s.prev_x = s.x;
      s.prev_grad = g;
      s.has_prev = true;
      s.x += s.step * g;
      break;
    }
  }
  ++s.iter;
}

void stochastic_epoch(StochasticMethod method, BaselineState& s, const BlockSystem& system,
                      Index rows_per_epoch, CostLedger* ledger) {
  const Index m = system.row_block_count();
  auto row_gradient = [&](Index i, const Vec& at) {
    const Vec ri = system.gather_rows(s.y, i) - system.forward_row_block(i, at, ledger);
    return Vec(2.0 * system.back_row_block(i, ri, ledger));
  };

  if (method == StochasticMethod::Sag) {
    if (s.table.empty()) s.table.assign(static_cast<std::size_t>(m), Vec::Zero(system.cols()));
    const IndexList rows = sample_without_replacement(s.rng, m, rows_per_epoch);
    for (Index i : rows) s.table[static_cast<std::size_t>(i)] = row_gradient(i, s.x);
    Vec g = Vec::Zero(system.cols());
    for (Index c = 0; c < system.cols(); ++c) {
      double acc = 0.0;
      for (const auto& gi : s.table) acc += gi[c];
      g[c] = acc;
    }
    s.x += s.step * g;
  } else {
    if (s.iter % m == 0) {
      s.anchor = s.x;
      s.anchor_grad = 2.0 * system.back(s.y - system.forward(s.anchor, ledger), ledger);
    }
    const auto i = static_cast<Index>(s.rng.below(static_cast<std::uint64_t>(m)));
    const Vec v = static_cast<double>(m) * (row_gradient(i, s.x) - row_gradient(i, s.anchor)) +
                  s.anchor_grad;
    s.x += s.step * v;
  }
  ++s.iter;
}

double fista_t(Index k) {
  double t = 1.0;
  for (Index q = 1; q < k; ++q) t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
  return t;
}

void prox_step(ProxMethod method, BaselineState& s, const BlockSystem& system, double lambda,
               const ImageShape& shape, const TvOptions& tv, CostLedger* ledger) {
  if (lambda < 0.0) throw Error("prox_step: lambda must be >= 0");
  if (method == ProxMethod::Ista) {
    const Vec g = 2.0 * system.back(s.y - system.forward(s.x, ledger), ledger);
    s.x = tv_prox(s.x + s.step * g, shape, s.step * lambda, tv);
  } else {
    if (s.momentum_point.size() == 0) {
      s.momentum_point = s.x;
      s.prev_iterate = s.x;
      s.t = 1.0;
    }
    const Vec& p = s.momentum_point;
    const Vec g = 2.0 * system.back(s.y - system.forward(p, ledger), ledger);
    const Vec next = tv_prox(p + s.step * g, shape, s.step * lambda, tv);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.t * s.t));
    s.momentum_point = next + ((s.t - 1.0) / t_next) * (next - s.prev_iterate);
    s.prev_iterate = next;
    s.x = next;
    s.t = t_next;
  }
  ++s.iter;
}

}  // namespace bsgd
