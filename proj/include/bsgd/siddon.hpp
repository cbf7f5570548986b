#pragma once

#include "bsgd/common.hpp"
#include "bsgd/geometry.hpp"

#include <Eigen/Core>

#include <vector>

namespace bsgd {

struct RayEntry {
  Index col;
  double length;
};

/// Intersection lengths of one ray, sorted by column index.
using SparseRow = std::vector<RayEntry>;

/// Exact voxel intersection lengths of the segment p0 -> p1 with a cubic
/// grid of `side` voxels per axis spanning [lo, lo + side * voxel) on each
/// of the first `ndim` axes. Voxels are half-open intervals [low, high).
SparseRow trace_segment(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, int ndim,
                        Index side, double voxel, double lo);

/// Siddon trace of the ray from the source to the centre of the detector
/// element addressed by `ray_index`.
SparseRow siddon_trace(const Geometry& geom, Index ray_index);

}  // namespace bsgd
