#include "bsgd/siddon.hpp"

#include <algorithm>
#include <cmath>

namespace bsgd {

SparseRow trace_segment(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, int ndim,
                        Index side, double voxel, double lo) {
  const double hi = lo + static_cast<double>(side) * voxel;
  const Eigen::Vector3d d = p1 - p0;

  double a_min = 0.0;
  double a_max = 1.0;
  for (int ax = 0; ax < ndim; ++ax) {
    if (d[ax] == 0.0) {
      if (p0[ax] < lo || p0[ax] >= hi) return {};
      continue;
    }
    const double a0 = (lo - p0[ax]) / d[ax];
    const double a1 = (hi - p0[ax]) / d[ax];
    a_min = std::max(a_min, std::min(a0, a1));
    a_max = std::min(a_max, std::max(a0, a1));
  }
  if (!(a_min < a_max)) return {};

  std::vector<double> alphas;
  alphas.reserve(static_cast<std::size_t>(ndim * (side + 1) + 2));
  alphas.push_back(a_min);
  alphas.push_back(a_max);
  for (int ax = 0; ax < ndim; ++ax) {
    if (d[ax] == 0.0) continue;
    for (Index k = 0; k <= side; ++k) {
      const double a = (lo + static_cast<double>(k) * voxel - p0[ax]) / d[ax];
      if (a > a_min && a < a_max) alphas.push_back(a);
    }
  }
  std::sort(alphas.begin(), alphas.end());

  const double seg_len = d.head(ndim).norm();
  SparseRow row;
  row.reserve(alphas.size());
  for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
    const double da = alphas[k + 1] - alphas[k];
    if (da <= 0.0) continue;
    const double mid = 0.5 * (alphas[k] + alphas[k + 1]);
    Index col = 0;
    bool inside = true;
    for (int ax = ndim - 1; ax >= 0; --ax) {
      const double coord = p0[ax] + mid * d[ax];
      const auto idx = static_cast<Index>(std::floor((coord - lo) / voxel));
      if (idx < 0 || idx >= side) {
        inside = false;
        break;
      }
      col = col * side + idx;
    }
    if (!inside) continue;
    row.push_back({col, da * seg_len});
  }
  std::sort(row.begin(), row.end(),
            [](const RayEntry& a, const RayEntry& b) { return a.col < b.col; });
  // Merge the rare split of one voxel into two pieces by a coincident plane.
  SparseRow merged;
  merged.reserve(row.size());
  for (const auto& e : row) {
    if (!merged.empty() && merged.back().col == e.col)
      merged.back().length += e.length;
    else
      merged.push_back(e);
  }
  return merged;
}

SparseRow siddon_trace(const Geometry& geom, Index ray_index) {
  const Index angle = geom.angle_of_ray(ray_index);
  return trace_segment(geom.source_position(angle), geom.detector_point(ray_index), geom.ndim(),
                       geom.volume_side(), geom.voxel_size(), geom.grid_min());
}

}  // namespace bsgd
