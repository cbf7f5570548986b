#pragma once

#include "bsgd/cluster.hpp"
#include "bsgd/common.hpp"
#include "bsgd/geometry.hpp"
#include "bsgd/siddon.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace bsgd {

/// Explicit sub-matrix A_I^J in compressed sparse rows. Local row k is the
/// global row row_ids[k]; local column l is global column col_ids[l]. Rows
/// without geometric intersection are present but empty.
struct SparseBlock {
  IndexList row_ids;
  IndexList col_ids;
  std::vector<Index> row_ptr{0};
  std::vector<Index> cols;   // local column indices
  std::vector<double> vals;  // intersection lengths, >= 0

  Index rows() const { return static_cast<Index>(row_ids.size()); }
  Index cols_count() const { return static_cast<Index>(col_ids.size()); }
  Index nnz() const { return static_cast<Index>(vals.size()); }
};

/// Rows of A in I restricted to the columns in J. Throws InvalidPartition
/// on empty, out-of-range or duplicated indices.
SparseBlock assemble_block(const Geometry& geom, const IndexList& rows, const IndexList& cols);

/// Same as assemble_block, from rays already traced: traced[g] is the full
/// row of global row g. `total_cols` bounds the column ids.
SparseBlock assemble_block_from(const std::vector<SparseRow>& traced, const IndexList& rows,
                                const IndexList& cols, Index total_cols);

/// A_I^J x_J. Records one forward product with `ledger` when given.
Vec forward_block(const SparseBlock& block, const Vec& x_block, CostLedger* ledger = nullptr);

/// (A_I^J)^T r_I. Records one back product with `ledger` when given.
Vec back_block(const SparseBlock& block, const Vec& r_block, CostLedger* ledger = nullptr);

/// Forward product restricted to the listed local rows (a sub-detector
/// selection); the event is recorded with the restricted row count.
Vec forward_block_rows(const SparseBlock& block, std::span<const Index> local_rows,
                       const Vec& x_block, CostLedger* ledger = nullptr);

/// Transpose product over the listed local rows only; `r_rows` is aligned
/// with `local_rows`.
Vec back_block_rows(const SparseBlock& block, std::span<const Index> local_rows, const Vec& r_rows,
                    CostLedger* ledger = nullptr);

/// Matrix-free forward product: re-traces the rays of I on demand.
Vec trace_forward(const Geometry& geom, const IndexList& rows, const IndexList& cols,
                  const Vec& x_block);

/// Matrix-free transpose product.
Vec trace_back(const Geometry& geom, const IndexList& rows, const IndexList& cols,
               const Vec& r_block);

/// Dense copy of a block (tests and the fixed-point harness only).
Eigen::MatrixXd to_dense(const SparseBlock& block);

}  // namespace bsgd
