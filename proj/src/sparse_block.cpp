#include "bsgd/sparse_block.hpp"

#include <string>

namespace bsgd {

namespace {

void check_indices(const IndexList& ids, Index bound, const char* what) {
  if (ids.empty()) throw InvalidPartition(std::string(what) + " index set is empty");
  std::vector<char> seen(static_cast<std::size_t>(bound), 0);
  for (Index id : ids) {
    if (id < 0 || id >= bound)
      throw InvalidPartition(std::string(what) + " index " + std::to_string(id) + " out of range");
    if (seen[static_cast<std::size_t>(id)]++)
      throw InvalidPartition(std::string("duplicate ") + what + " index " + std::to_string(id));
  }
}

void record(CostLedger* ledger, ProductKind kind, Index rows, Index cols) {
  if (ledger) ledger->record({kind, rows, cols});
}

}  // namespace

SparseBlock assemble_block_from(const std::vector<SparseRow>& traced, const IndexList& rows,
                                const IndexList& cols, Index total_cols) {
  check_indices(rows, static_cast<Index>(traced.size()), "row");
  check_indices(cols, total_cols, "column");
  std::vector<Index> local(static_cast<std::size_t>(total_cols), -1);
  for (std::size_t l = 0; l < cols.size(); ++l) local[static_cast<std::size_t>(cols[l])] = static_cast<Index>(l);

  SparseBlock b;
  b.row_ids = rows;
  b.col_ids = cols;
  b.row_ptr.reserve(rows.size() + 1);
  for (Index g : rows) {
    for (const auto& e : traced[static_cast<std::size_t>(g)]) {
      const Index l = local[static_cast<std::size_t>(e.col)];
      if (l < 0) continue;
      b.cols.push_back(l);
      b.vals.push_back(e.length);
    }
    b.row_ptr.push_back(static_cast<Index>(b.vals.size()));
  }
  return b;
}

SparseBlock assemble_block(const Geometry& geom, const IndexList& rows, const IndexList& cols) {
  check_indices(rows, geom.ray_count(), "row");
  std::vector<SparseRow> traced(static_cast<std::size_t>(geom.ray_count()));
  for (Index g : rows) traced[static_cast<std::size_t>(g)] = siddon_trace(geom, g);
  return assemble_block_from(traced, rows, cols, geom.voxel_count());
}

Vec forward_block(const SparseBlock& block, const Vec& x_block, CostLedger* ledger) {
  if (x_block.size() != block.cols_count())
    throw DimensionError("forward_block: x has length " + std::to_string(x_block.size()) +
                         ", block has " + std::to_string(block.cols_count()) + " columns");
  Vec out(block.rows());
  for (Index k = 0; k < block.rows(); ++k) {
    double acc = 0.0;
    for (Index p = block.row_ptr[k]; p < block.row_ptr[k + 1]; ++p)
      acc += block.vals[p] * x_block[block.cols[p]];
    out[k] = acc;
  }
  record(ledger, ProductKind::Forward, block.rows(), block.cols_count());
  return out;
}

Vec back_block(const SparseBlock& block, const Vec& r_block, CostLedger* ledger) {
  if (r_block.size() != block.rows())
    throw DimensionError("back_block: r has length " + std::to_string(r_block.size()) +
                         ", block has " + std::to_string(block.rows()) + " rows");
  Vec out = Vec::Zero(block.cols_count());
  for (Index k = 0; k < block.rows(); ++k) {
    const double rk = r_block[k];
    for (Index p = block.row_ptr[k]; p < block.row_ptr[k + 1]; ++p)
      out[block.cols[p]] += block.vals[p] * rk;
  }
  record(ledger, ProductKind::Back, block.rows(), block.cols_count());
  return out;
}

Vec forward_block_rows(const SparseBlock& block, std::span<const Index> local_rows,
                       const Vec& x_block, CostLedger* ledger) {
  if (x_block.size() != block.cols_count())
    throw DimensionError("forward_block_rows: x length does not match block columns");
  Vec out(static_cast<Index>(local_rows.size()));
  for (std::size_t q = 0; q < local_rows.size(); ++q) {
    const Index k = local_rows[q];
    if (k < 0 || k >= block.rows()) throw DimensionError("forward_block_rows: row out of range");
    double acc = 0.0;
    for (Index p = block.row_ptr[k]; p < block.row_ptr[k + 1]; ++p)
      acc += block.vals[p] * x_block[block.cols[p]];
    out[static_cast<Index>(q)] = acc;
  }
  record(ledger, ProductKind::Forward, static_cast<Index>(local_rows.size()), block.cols_count());
  return out;
}

Vec back_block_rows(const SparseBlock& block, std::span<const Index> local_rows, const Vec& r_rows,
                    CostLedger* ledger) {
  if (r_rows.size() != static_cast<Index>(local_rows.size()))
    throw DimensionError("back_block_rows: r length does not match the row selection");
  Vec out = Vec::Zero(block.cols_count());
  for (std::size_t q = 0; q < local_rows.size(); ++q) {
    const Index k = local_rows[q];
    if (k < 0 || k >= block.rows()) throw DimensionError("back_block_rows: row out of range");
    const double rk = r_rows[static_cast<Index>(q)];
    for (Index p = block.row_ptr[k]; p < block.row_ptr[k + 1]; ++p)
      out[block.cols[p]] += block.vals[p] * rk;
  }
  record(ledger, ProductKind::Back, static_cast<Index>(local_rows.size()), block.cols_count());
  return out;
}

Vec trace_forward(const Geometry& geom, const IndexList& rows, const IndexList& cols,
                  const Vec& x_block) {
  if (x_block.size() != static_cast<Index>(cols.size()))
    throw DimensionError("trace_forward: x length does not match column set");
  std::vector<Index> local(static_cast<std::size_t>(geom.voxel_count()), -1);
  for (std::size_t l = 0; l < cols.size(); ++l) local[static_cast<std::size_t>(cols[l])] = static_cast<Index>(l);
  Vec out(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    double acc = 0.0;
    for (const auto& e : siddon_trace(geom, rows[k])) {
      const Index l = local[static_cast<std::size_t>(e.col)];
      if (l >= 0) acc += e.length * x_block[l];
    }
    out[static_cast<Index>(k)] = acc;
  }
  return out;
}

Vec trace_back(const Geometry& geom, const IndexList& rows, const IndexList& cols,
               const Vec& r_block) {
  if (r_block.size() != static_cast<Index>(rows.size()))
    throw DimensionError("trace_back: r length does not match row set");
  std::vector<Index> local(static_cast<std::size_t>(geom.voxel_count()), -1);
  for (std::size_t l = 0; l < cols.size(); ++l) local[static_cast<std::size_t>(cols[l])] = static_cast<Index>(l);
  Vec out = Vec::Zero(static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (const auto& e : siddon_trace(geom, rows[k])) {
      const Index l = local[static_cast<std::size_t>(e.col)];
      if (l >= 0) out[l] += e.length * r_block[static_cast<Index>(k)];
    }
  }
  return out;
}

Eigen::MatrixXd to_dense(const SparseBlock& block) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(block.rows(), block.cols_count());
  for (Index k = 0; k < block.rows(); ++k)
    for (Index p = block.row_ptr[k]; p < block.row_ptr[k + 1]; ++p) d(k, block.cols[p]) += block.vals[p];
  return d;
}

}  // namespace bsgd
