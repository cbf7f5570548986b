#pragma once

#include "bsgd/common.hpp"
#include "bsgd/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace bsgd {

enum class RowGrouping {
  Angles,  // each row block holds whole projection angles
  Rows,    // contiguous near-equal row ranges, ignoring angle boundaries
};

RowGrouping row_grouping_from_string(const std::string& text);

/// Splits `total` items into `parts` contiguous runs; the first
/// total % parts runs receive one extra item.
std::vector<Index> split_sizes(Index total, Index parts);

/// Tile counts per axis (x, y, z) for N column blocks. N is factored as
/// evenly as possible across the image axes, larger factors on lower axes.
std::array<Index, 3> tile_grid_shape(Index col_blocks, int ndim);

/// Detector tile counts per axis (u, v) for `tiles` sub-detectors.
std::array<Index, 2> detector_tile_shape(Index tiles, int ndim);

struct BlockPartition {
  RowGrouping grouping = RowGrouping::Angles;
  std::vector<IndexList> row_blocks;   // I_i, ascending global row ids
  std::vector<IndexList> col_blocks;   // J_j, ascending global column ids
  /// Angles covered by each row block (Angles grouping only).
  std::vector<IndexList> block_angles;
  /// Voxel index bounds [lo, hi) per axis of each column tile.
  std::vector<std::array<std::array<Index, 2>, 3>> tile_bounds;
  /// Detector tiles per angle: tile t owns these local detector readings
  /// (offsets within one angle's rays_per_angle range).
  std::vector<IndexList> detector_tiles;

  Index row_block_count() const { return static_cast<Index>(row_blocks.size()); }
  Index col_block_count() const { return static_cast<Index>(col_blocks.size()); }
  Index tiles_per_angle() const { return static_cast<Index>(detector_tiles.size()); }
};

/// Row blocks of whole angles (remainder angles go one per block from the
/// first block on), axis-aligned near-equal column tiles, and a grid of
/// detector tiles. Throws InvalidPartition for M > angle count (or row
/// count), N > voxel count, or more detector tiles than readings.
BlockPartition make_partition(const Geometry& geom, Index row_blocks, Index col_blocks,
                              Index tiles_per_angle, RowGrouping grouping = RowGrouping::Angles);

/// Probability of sampling each detector tile of `angle` for column block
/// `col_block`: the area of the projected bounding-box footprint falling in
/// each tile, normalised. Falls back to uniform weights (with a warning on
/// stderr) when the footprint misses the detector.
std::vector<double> importance_weights(const Geometry& geom, const BlockPartition& part,
                                       Index col_block, Index angle);

struct SamplingFractions {
  double alpha = 1.0;
  double gamma = 1.0;
  Index row_count = 1;  // alpha * M
  Index col_count = 1;  // gamma * N

  /// Fractions from explicit per-epoch block counts.
  static SamplingFractions from_counts(Index row_count, Index col_count, Index row_blocks,
                                       Index col_blocks);
  /// Fractions from explicit alpha/gamma (rounded half up, clamped to >= 1).
  static SamplingFractions from_fractions(double alpha, double gamma, Index row_blocks,
                                          Index col_blocks);
};

/// gamma = min(1, nodes / N), alpha = nodes / (M N gamma); block counts
/// rounded half up and clamped to [1, M] / [1, N].
SamplingFractions select_alpha_gamma(Index node_num, Index row_blocks, Index col_blocks);

}  // namespace bsgd
