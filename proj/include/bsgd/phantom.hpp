#pragma once

#include "bsgd/common.hpp"

#include <array>
#include <vector>

namespace bsgd {

/// One row of an ellipse (2D) or ellipsoid (3D) phantom table. Centres and
/// semi-axes are in the unit cube [-1, 1]^d; angles in degrees.
struct Ellipsoid {
  double value;
  std::array<double, 3> axes;
  std::array<double, 3> center;
  double phi = 0.0;    // rotation about z
  double theta = 0.0;  // second Euler angle
  double psi = 0.0;    // third Euler angle
};

/// Toft's modified Shepp-Logan ellipses (intensities in [0, 1]).
const std::vector<Ellipsoid>& shepp_logan_table_2d();

/// Modified 3D Shepp-Logan ellipsoids (Kak-Slaney layout, Toft intensities).
const std::vector<Ellipsoid>& shepp_logan_table_3d();

/// Sums table values at every voxel centre whose coordinate lies inside the
/// (rotated) ellipsoid, then clips to [0, 1]. Voxel centres sit at
/// (2 k + 1) / K - 1 along every axis; ordering matches the geometry
/// (z-major, then y, then x).
Vec rasterize(const std::vector<Ellipsoid>& table, Index side, int ndim);

/// Shepp-Logan phantom on a K^ndim grid. Throws for K < 4 or ndim not 2/3.
Vec shepp_logan(Index side, int ndim);

/// A hollow shell cube with a soft interior and a few dense inclusions,
/// standing in for a skull scan. Not a model of any real data set.
Vec skull_cube(Index side);

/// y + e with e a seeded white Gaussian draw rescaled so that
/// 20 log10(||y|| / ||e||) equals `snr_db` up to rounding. An infinite
/// target returns y unchanged. Throws for a zero y.
Vec add_noise(const Vec& y, double snr_db, std::uint64_t seed);

/// 20 log10(||signal|| / ||noise||).
double snr_db(const Vec& signal, const Vec& noise);

}  // namespace bsgd
