#include "bsgd/partition.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace bsgd {

RowGrouping row_grouping_from_string(const std::string& text) {
  if (text == "angles") return RowGrouping::Angles;
  if (text == "rows") return RowGrouping::Rows;
  throw InvalidPartition("unknown row grouping '" + text + "' (expected angles or rows)");
}

std::vector<Index> split_sizes(Index total, Index parts) {
  if (parts < 1 || parts > total)
    throw InvalidPartition("cannot split " + std::to_string(total) + " items into " +
                           std::to_string(parts) + " parts");
  std::vector<Index> sizes(static_cast<std::size_t>(parts), total / parts);
  for (Index k = 0; k < total % parts; ++k) ++sizes[static_cast<std::size_t>(k)];
  return sizes;
}

namespace {

// Factors n over `axes` axes as evenly as possible, larger factors first.
std::vector<Index> balanced_factors(Index n, int axes) {
  std::vector<Index> out;
  Index remaining = n;
  for (int left = axes; left > 0; --left) {
    if (left == 1) {
      out.push_back(remaining);
      break;
    }
    const double root = std::pow(static_cast<double>(remaining), 1.0 / left);
    Index f = remaining;
    for (Index d = 1; d <= remaining; ++d) {
      if (remaining % d == 0 && static_cast<double>(d) >= root - 1e-9) {
        f = d;
        break;
      }
    }
    out.push_back(f);
    remaining /= f;
  }
  return out;
}

std::vector<Index> prefix_edges(const std::vector<Index>& sizes) {
  std::vector<Index> edges{0};
  for (Index s : sizes) edges.push_back(edges.back() + s);
  return edges;
}

}  // namespace

std::array<Index, 3> tile_grid_shape(Index col_blocks, int ndim) {
  const auto f = balanced_factors(col_blocks, ndim);
  std::array<Index, 3> shape{1, 1, 1};
  for (int ax = 0; ax < ndim; ++ax) shape[static_cast<std::size_t>(ax)] = f[static_cast<std::size_t>(ax)];
  return shape;
}

std::array<Index, 2> detector_tile_shape(Index tiles, int ndim) {
  if (ndim == 2) return {tiles, 1};
  const auto f = balanced_factors(tiles, 2);
  return {f[0], f[1]};
}

BlockPartition make_partition(const Geometry& geom, Index row_blocks, Index col_blocks,
                              Index tiles_per_angle, RowGrouping grouping) {
  const Index angles = geom.angle_count();
  const Index per_angle = geom.rays_per_angle();
  const Index side = geom.volume_side();
  const int ndim = geom.ndim();
  if (row_blocks < 1 || col_blocks < 1 || tiles_per_angle < 1)
    throw InvalidPartition("block counts must be >= 1");
  if (grouping == RowGrouping::Angles && row_blocks > angles)
    throw InvalidPartition("M=" + std::to_string(row_blocks) + " exceeds the angle count " +
                           std::to_string(angles));
  if (row_blocks > geom.ray_count())
    throw InvalidPartition("M exceeds the row count");
  if (col_blocks > geom.voxel_count())
    throw InvalidPartition("N=" + std::to_string(col_blocks) + " exceeds the voxel count");

  BlockPartition part;
  part.grouping = grouping;

  if (grouping == RowGrouping::Angles) {
    Index angle = 0;
    for (Index sz : split_sizes(angles, row_blocks)) {
      IndexList rows;
      IndexList block_angles;
      rows.reserve(static_cast<std::size_t>(sz * per_angle));
      for (Index a = angle; a < angle + sz; ++a) {
        block_angles.push_back(a);
        for (Index k = 0; k < per_angle; ++k) rows.push_back(a * per_angle + k);
      }
      angle += sz;
      part.row_blocks.push_back(std::move(rows));
      part.block_angles.push_back(std::move(block_angles));
    }
  } else {
    Index row = 0;
    for (Index sz : split_sizes(geom.ray_count(), row_blocks)) {
      IndexList rows(static_cast<std::size_t>(sz));
      std::iota(rows.begin(), rows.end(), row);
      row += sz;
      part.row_blocks.push_back(std::move(rows));
    }
  }

  const auto shape = tile_grid_shape(col_blocks, ndim);
  std::array<std::vector<Index>, 3> edges;
  for (int ax = 0; ax < 3; ++ax) {
    const Index extent = ax < ndim ? side : 1;
    if (shape[static_cast<std::size_t>(ax)] > extent)
      throw InvalidPartition("N=" + std::to_string(col_blocks) +
                             " cannot be tiled over a side of " + std::to_string(side));
    edges[static_cast<std::size_t>(ax)] =
        prefix_edges(split_sizes(extent, shape[static_cast<std::size_t>(ax)]));
  }
  for (Index tz = 0; tz < shape[2]; ++tz) {
    for (Index ty = 0; ty < shape[1]; ++ty) {
      for (Index tx = 0; tx < shape[0]; ++tx) {
        std::array<std::array<Index, 2>, 3> b{};
        b[0] = {edges[0][tx], edges[0][tx + 1]};
        b[1] = {edges[1][ty], edges[1][ty + 1]};
        b[2] = {edges[2][tz], edges[2][tz + 1]};
        IndexList cols;
        for (Index z = b[2][0]; z < b[2][1]; ++z)
          for (Index y = b[1][0]; y < b[1][1]; ++y)
            for (Index x = b[0][0]; x < b[0][1]; ++x) cols.push_back((z * side + y) * side + x);
        std::sort(cols.begin(), cols.end());
        part.col_blocks.push_back(std::move(cols));
        part.tile_bounds.push_back(b);
      }
    }
  }

  const Index nd = geom.detector_elements();
  const auto dshape = detector_tile_shape(tiles_per_angle, ndim);
  const Index v_extent = ndim == 2 ? 1 : nd;
  if (dshape[0] > nd || dshape[1] > v_extent)
    throw InvalidPartition("more detector tiles than detector elements");
  const auto u_edges = prefix_edges(split_sizes(nd, dshape[0]));
  const auto v_edges = prefix_edges(split_sizes(v_extent, dshape[1]));
  for (Index tv = 0; tv < dshape[1]; ++tv) {
    for (Index tu = 0; tu < dshape[0]; ++tu) {
      IndexList local;
      for (Index v = v_edges[tv]; v < v_edges[tv + 1]; ++v)
        for (Index u = u_edges[tu]; u < u_edges[tu + 1]; ++u) local.push_back(v * nd + u);
      part.detector_tiles.push_back(std::move(local));
    }
  }
  return part;
}

namespace {

struct Pt {
  double u, v;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Pt& a, const Pt& b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
  if (pts.size() < 3) return pts;
  std::vector<Pt> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Sutherland-Hodgman clip of a convex polygon against one half-plane.
std::vector<Pt> clip(const std::vector<Pt>& poly, int axis, double bound, bool keep_above) {
  std::vector<Pt> out;
  auto coord = [axis](const Pt& p) { return axis == 0 ? p.u : p.v; };
  auto inside = [&](const Pt& p) { return keep_above ? coord(p) >= bound : coord(p) <= bound; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % poly.size()];
    const bool ia = inside(a);
    const bool ib = inside(b);
    if (ia) out.push_back(a);
    if (ia != ib) {
      const double t = (bound - coord(a)) / (coord(b) - coord(a));
      out.push_back({a.u + t * (b.u - a.u), a.v + t * (b.v - a.v)});
    }
  }
  return out;
}

double polygon_area(const std::vector<Pt>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % poly.size()];
    s += a.u * b.v - b.u * a.v;
  }
  return 0.5 * std::abs(s);
}

}  // namespace

std::vector<double> importance_weights(const Geometry& geom, const BlockPartition& part,
                                       Index col_block, Index angle) {
  const Index tiles = part.tiles_per_angle();
  std::vector<double> w(static_cast<std::size_t>(tiles), 0.0);
  if (tiles == 1) {
    w[0] = 1.0;
    return w;
  }
  const int ndim = geom.ndim();
  const auto& b = part.tile_bounds.at(static_cast<std::size_t>(col_block));
  const double lo = geom.grid_min();
  const double vox = geom.voxel_size();

  std::vector<Pt> corners;
  bool ok = true;
  const int ncorner = ndim == 2 ? 4 : 8;
  for (int c = 0; c < ncorner && ok; ++c) {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    for (int ax = 0; ax < ndim; ++ax) {
      const Index idx = b[static_cast<std::size_t>(ax)][(c >> ax) & 1];
      p[ax] = lo + static_cast<double>(idx) * vox;
    }
    double u = 0.0, v = 0.0;
    ok = geom.project_to_detector(angle, p, u, v);
    corners.push_back({u, v});
  }

  const Index nd = geom.detector_elements();
  const double pitch = geom.detector_pitch();
  const auto dshape = detector_tile_shape(tiles, ndim);
  auto edge_coords = [&](Index parts, Index extent) {
    std::vector<double> out;
    for (Index e : prefix_edges(split_sizes(extent, parts)))
      out.push_back((static_cast<double>(e) - 0.5 * static_cast<double>(nd)) * pitch);
    return out;
  };
  const auto ue = edge_coords(dshape[0], nd);

  double total = 0.0;
  if (ok) {
    if (ndim == 2) {
      double umin = corners[0].u, umax = corners[0].u;
      for (const auto& p : corners) {
        umin = std::min(umin, p.u);
        umax = std::max(umax, p.u);
      }
      for (Index t = 0; t < tiles; ++t) {
        const double overlap = std::min(umax, ue[t + 1]) - std::max(umin, ue[t]);
        w[static_cast<std::size_t>(t)] = std::max(0.0, overlap);
      }
    } else {
      const auto ve = edge_coords(dshape[1], nd);
      const auto hull = convex_hull(corners);
      for (Index tv = 0; tv < dshape[1]; ++tv) {
        for (Index tu = 0; tu < dshape[0]; ++tu) {
          auto poly = clip(hull, 0, ue[tu], true);
          poly = clip(poly, 0, ue[tu + 1], false);
          poly = clip(poly, 1, ve[tv], true);
          poly = clip(poly, 1, ve[tv + 1], false);
          w[static_cast<std::size_t>(tv * dshape[0] + tu)] = poly.size() >= 3 ? polygon_area(poly) : 0.0;
        }
      }
    }
    for (double x : w) total += x;
  }
  if (!(total > 0.0)) {
    std::cerr << "warning: footprint of column block " << col_block << " misses the detector at angle "
              << angle << "; using uniform tile weights\n";
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(tiles));
    return w;
  }
  for (double& x : w) x /= total;
  return w;
}

namespace {

Index round_count(double fraction, Index blocks) {
  const auto n = static_cast<Index>(std::floor(fraction * static_cast<double>(blocks) + 0.5));
  return std::clamp<Index>(n, 1, blocks);
}

}  // namespace

SamplingFractions SamplingFractions::from_counts(Index row_count, Index col_count, Index row_blocks,
                                                 Index col_blocks) {
  if (row_count < 1 || row_count > row_blocks || col_count < 1 || col_count > col_blocks)
    throw InvalidPartition("per-epoch block counts out of range");
  SamplingFractions f;
  f.row_count = row_count;
  f.col_count = col_count;
  f.alpha = static_cast<double>(row_count) / static_cast<double>(row_blocks);
  f.gamma = static_cast<double>(col_count) / static_cast<double>(col_blocks);
  return f;
}

SamplingFractions SamplingFractions::from_fractions(double alpha, double gamma, Index row_blocks,
                                                    Index col_blocks) {
  if (!(alpha > 0.0 && alpha <= 1.0) || !(gamma > 0.0 && gamma <= 1.0))
    throw InvalidPartition("alpha and gamma must lie in (0, 1]");
  return from_counts(round_count(alpha, row_blocks), round_count(gamma, col_blocks), row_blocks,
                     col_blocks);
}

SamplingFractions select_alpha_gamma(Index node_num, Index row_blocks, Index col_blocks) {
  if (node_num < 1) throw InvalidPartition("node_num must be >= 1");
  const double nodes = static_cast<double>(node_num);
  const double gamma = std::min(1.0, nodes / static_cast<double>(col_blocks));
  const double alpha =
      std::min(1.0, nodes / (static_cast<double>(row_blocks) * static_cast<double>(col_blocks) * gamma));
  return SamplingFractions::from_fractions(alpha, gamma, row_blocks, col_blocks);
}

}  // namespace bsgd
