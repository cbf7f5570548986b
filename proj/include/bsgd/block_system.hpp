#pragma once

#include "bsgd/cluster.hpp"
#include "bsgd/common.hpp"
#include "bsgd/geometry.hpp"
#include "bsgd/partition.hpp"
#include "bsgd/sparse_block.hpp"

#include <Eigen/Core>

#include <vector>

namespace bsgd {

/// The partitioned system matrix: every A_{I_i}^{J_j} stored explicitly,
/// plus the per-angle detector tiling and cached importance weights used
/// by the sub-detector sampling variants.
class BlockSystem {
 public:
  BlockSystem(const Geometry& geom, BlockPartition partition, int threads = 1);

  const Geometry& geometry() const { return geom_; }
  const BlockPartition& partition() const { return part_; }
  Index rows() const { return geom_.ray_count(); }
  Index cols() const { return geom_.voxel_count(); }
  Index row_block_count() const { return part_.row_block_count(); }
  Index col_block_count() const { return part_.col_block_count(); }
  const IndexList& row_block(Index i) const { return part_.row_blocks[static_cast<std::size_t>(i)]; }
  const IndexList& col_block(Index j) const { return part_.col_blocks[static_cast<std::size_t>(j)]; }
  const SparseBlock& block(Index i, Index j) const {
    return blocks_[static_cast<std::size_t>(i * col_block_count() + j)];
  }

  /// Local rows of block row i that belong to detector tile t of the
  /// block's a-th angle. Requires angle-grouped row blocks.
  const IndexList& tile_rows(Index i, Index angle_slot, Index tile) const;
  Index angles_in_block(Index i) const;
  /// Importance weights of column block j at global angle `angle`.
  const std::vector<double>& tile_weights(Index j, Index angle) const;
  bool has_tiling() const { return !tile_rows_.empty(); }

  Vec gather(const Vec& x, Index j) const;
  Vec gather_rows(const Vec& v, Index i) const;

  /// A x as the sum over column blocks of the block products, per row
  /// block, in ascending block order.
  Vec forward(const Vec& x, CostLedger* ledger = nullptr) const;
  /// A^T r, summed over row blocks in ascending order.
  Vec back(const Vec& r, CostLedger* ledger = nullptr) const;
  /// A_{I_i} x (all column blocks of row block i).
  Vec forward_row_block(Index i, const Vec& x, CostLedger* ledger = nullptr) const;
  /// (A_{I_i})^T r_{I_i}, full length c.
  Vec back_row_block(Index i, const Vec& r_block, CostLedger* ledger = nullptr) const;

  Eigen::MatrixXd dense() const;
  Index nnz() const;

 private:
  Geometry geom_;
  BlockPartition part_;
  std::vector<SparseBlock> blocks_;
  // [row block][angle slot][tile] -> local rows
  std::vector<std::vector<std::vector<IndexList>>> tile_rows_;
  // [col block][angle] -> weights over tiles
  std::vector<std::vector<std::vector<double>>> weights_;
};

/// Adds `v` into `x` on the columns of block j.
void scatter_add(Vec& x, const IndexList& cols, const Vec& v);

}  // namespace bsgd
