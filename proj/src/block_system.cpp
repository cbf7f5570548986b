#include "bsgd/block_system.hpp"

#include "bsgd/parallel.hpp"
#include "bsgd/siddon.hpp"

namespace bsgd {

BlockSystem::BlockSystem(const Geometry& geom, BlockPartition partition, int threads)
    : geom_(geom), part_(std::move(partition)) {
  const Index r = geom_.ray_count();
  std::vector<SparseRow> traced(static_cast<std::size_t>(r));
  parallel_for(static_cast<std::size_t>(r), threads,
               [&](std::size_t g) { traced[g] = siddon_trace(geom_, static_cast<Index>(g)); });

  const Index m = row_block_count();
  const Index n = col_block_count();
  blocks_.resize(static_cast<std::size_t>(m * n));
  parallel_for(static_cast<std::size_t>(m * n), threads, [&](std::size_t k) {
    const auto i = static_cast<Index>(k) / n;
    const auto j = static_cast<Index>(k) % n;
    blocks_[k] = assemble_block_from(traced, row_block(i), col_block(j), geom_.voxel_count());
  });

  if (part_.grouping == RowGrouping::Angles) {
    const Index per_angle = geom_.rays_per_angle();
    const Index tiles = part_.tiles_per_angle();
    tile_rows_.resize(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
      const auto& angles = part_.block_angles[static_cast<std::size_t>(i)];
      auto& slots = tile_rows_[static_cast<std::size_t>(i)];
      slots.resize(angles.size());
      for (std::size_t s = 0; s < angles.size(); ++s) {
        slots[s].resize(static_cast<std::size_t>(tiles));
        // Rows of one angle are contiguous inside the block.
        const Index base = static_cast<Index>(s) * per_angle;
        for (Index t = 0; t < tiles; ++t)
          for (Index local : part_.detector_tiles[static_cast<std::size_t>(t)])
            slots[s][static_cast<std::size_t>(t)].push_back(base + local);
      }
    }
    weights_.resize(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t j) {
      weights_[j].resize(static_cast<std::size_t>(geom_.angle_count()));
      for (Index a = 0; a < geom_.angle_count(); ++a)
        weights_[j][static_cast<std::size_t>(a)] =
            importance_weights(geom_, part_, static_cast<Index>(j), a);
    });
  }
}

const IndexList& BlockSystem::tile_rows(Index i, Index angle_slot, Index tile) const {
  if (tile_rows_.empty()) throw InvalidPartition("detector tiling requires angle-grouped row blocks");
  return tile_rows_.at(static_cast<std::size_t>(i))
      .at(static_cast<std::size_t>(angle_slot))
      .at(static_cast<std::size_t>(tile));
}

Index BlockSystem::angles_in_block(Index i) const {
  if (tile_rows_.empty()) throw InvalidPartition("detector tiling requires angle-grouped row blocks");
  return static_cast<Index>(tile_rows_.at(static_cast<std::size_t>(i)).size());
}

const std::vector<double>& BlockSystem::tile_weights(Index j, Index angle) const {
  if (weights_.empty()) throw InvalidPartition("detector tiling requires angle-grouped row blocks");
  return weights_.at(static_cast<std::size_t>(j)).at(static_cast<std::size_t>(angle));
}

Vec BlockSystem::gather(const Vec& x, Index j) const {
  const auto& cols = col_block(j);
  Vec out(static_cast<Index>(cols.size()));
  for (std::size_t l = 0; l < cols.size(); ++l) out[static_cast<Index>(l)] = x[cols[l]];
  return out;
}

Vec BlockSystem::gather_rows(const Vec& v, Index i) const {
  const auto& rows = row_block(i);
  Vec out(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) out[static_cast<Index>(k)] = v[rows[k]];
  return out;
}

void scatter_add(Vec& x, const IndexList& cols, const Vec& v) {
  for (std::size_t l = 0; l < cols.size(); ++l) x[cols[l]] += v[static_cast<Index>(l)];
}

Vec BlockSystem::forward_row_block(Index i, const Vec& x, CostLedger* ledger) const {
  if (x.size() != cols()) throw DimensionError("forward_row_block: x has wrong length");
  Vec out = Vec::Zero(static_cast<Index>(row_block(i).size()));
  for (Index j = 0; j < col_block_count(); ++j) {
    const Vec part = forward_block(block(i, j), gather(x, j), ledger);
    if (j == 0)
      out = part;
    else
      out += part;
  }
  return out;
}

Vec BlockSystem::back_row_block(Index i, const Vec& r_block, CostLedger* ledger) const {
  Vec out = Vec::Zero(cols());
  for (Index j = 0; j < col_block_count(); ++j)
    scatter_add(out, col_block(j), back_block(block(i, j), r_block, ledger));
  return out;
}

Vec BlockSystem::forward(const Vec& x, CostLedger* ledger) const {
  Vec y = Vec::Zero(rows());
  for (Index i = 0; i < row_block_count(); ++i) {
    const Vec part = forward_row_block(i, x, ledger);
    const auto& ids = row_block(i);
    for (std::size_t k = 0; k < ids.size(); ++k) y[ids[k]] = part[static_cast<Index>(k)];
  }
  return y;
}

Vec BlockSystem::back(const Vec& r, CostLedger* ledger) const {
  if (r.size() != rows()) throw DimensionError("back: r has wrong length");
  Vec g = Vec::Zero(cols());
  for (Index i = 0; i < row_block_count(); ++i) g += back_row_block(i, gather_rows(r, i), ledger);
  return g;
}

Eigen::MatrixXd BlockSystem::dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows(), cols());
  for (Index i = 0; i < row_block_count(); ++i) {
    for (Index j = 0; j < col_block_count(); ++j) {
      const auto& b = block(i, j);
      for (Index k = 0; k < b.rows(); ++k)
        for (Index p = b.row_ptr[k]; p < b.row_ptr[k + 1]; ++p)
          a(b.row_ids[k], b.col_ids[b.cols[p]]) += b.vals[p];
    }
  }
  return a;
}

Index BlockSystem::nnz() const {
  Index total = 0;
  for (const auto& b : blocks_) total += b.nnz();
  return total;
}

}  // namespace bsgd
