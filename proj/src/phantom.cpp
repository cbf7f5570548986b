#include "bsgd/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bsgd {

const std::vector<Ellipsoid>& shepp_logan_table_2d() {
  static const std::vector<Ellipsoid> table = {
      {1.0, {0.69, 0.92, 1.0}, {0.0, 0.0, 0.0}, 0.0},
      {-0.8, {0.6624, 0.874, 1.0}, {0.0, -0.0184, 0.0}, 0.0},
      {-0.2, {0.11, 0.31, 1.0}, {0.22, 0.0, 0.0}, -18.0},
      {-0.2, {0.16, 0.41, 1.0}, {-0.22, 0.0, 0.0}, 18.0},
      {0.1, {0.21, 0.25, 1.0}, {0.0, 0.35, 0.0}, 0.0},
      {0.1, {0.046, 0.046, 1.0}, {0.0, 0.1, 0.0}, 0.0},
      {0.1, {0.046, 0.046, 1.0}, {0.0, -0.1, 0.0}, 0.0},
      {0.1, {0.046, 0.023, 1.0}, {-0.08, -0.605, 0.0}, 0.0},
      {0.1, {0.023, 0.023, 1.0}, {0.0, -0.606, 0.0}, 0.0},
      {0.1, {0.023, 0.046, 1.0}, {0.06, -0.605, 0.0}, 0.0},
  };
  return table;
}

const std::vector<Ellipsoid>& shepp_logan_table_3d() {
  static const std::vector<Ellipsoid> table = {
      {1.0, {0.69, 0.92, 0.81}, {0.0, 0.0, 0.0}, 0.0, 0.0, 0.0},
      {-0.8, {0.6624, 0.874, 0.78}, {0.0, -0.0184, 0.0}, 0.0, 0.0, 0.0},
      {-0.2, {0.11, 0.31, 0.22}, {0.22, 0.0, 0.0}, -18.0, 0.0, 10.0},
      {-0.2, {0.16, 0.41, 0.28}, {-0.22, 0.0, 0.0}, 18.0, 0.0, 10.0},
      {0.1, {0.21, 0.25, 0.41}, {0.0, 0.35, -0.15}, 0.0, 0.0, 0.0},
      {0.1, {0.046, 0.046, 0.05}, {0.0, 0.1, 0.25}, 0.0, 0.0, 0.0},
      {0.1, {0.046, 0.046, 0.05}, {0.0, -0.1, 0.25}, 0.0, 0.0, 0.0},
      {0.1, {0.046, 0.023, 0.05}, {-0.08, -0.605, 0.0}, 0.0, 0.0, 0.0},
      {0.1, {0.023, 0.023, 0.02}, {0.0, -0.606, 0.0}, 0.0, 0.0, 0.0},
      {0.1, {0.023, 0.046, 0.02}, {0.06, -0.605, 0.0}, 0.0, 0.0, 0.0},
  };
  return table;
}

namespace {

bool inside(const Ellipsoid& e, double x, double y, double z, int ndim) {
  const double deg = std::numbers::pi / 180.0;
  const double cphi = std::cos(e.phi * deg), sphi = std::sin(e.phi * deg);
  const double px = x - e.center[0], py = y - e.center[1], pz = z - e.center[2];
  if (ndim == 2) {
    const double u = px * cphi + py * sphi;
    const double v = -px * sphi + py * cphi;
    return (u * u) / (e.axes[0] * e.axes[0]) + (v * v) / (e.axes[1] * e.axes[1]) <= 1.0;
  }
  const double cth = std::cos(e.theta * deg), sth = std::sin(e.theta * deg);
  const double cpsi = std::cos(e.psi * deg), spsi = std::sin(e.psi * deg);
  const double r[3][3] = {
      {cpsi * cphi - cth * sphi * spsi, cpsi * sphi + cth * cphi * spsi, spsi * sth},
      {-spsi * cphi - cth * sphi * cpsi, -spsi * sphi + cth * cphi * cpsi, cpsi * sth},
      {sth * sphi, -sth * cphi, cth}};
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double q = r[a][0] * px + r[a][1] * py + r[a][2] * pz;
    s += (q * q) / (e.axes[a] * e.axes[a]);
  }
  return s <= 1.0;
}

}  // namespace

Vec rasterize(const std::vector<Ellipsoid>& table, Index side, int ndim) {
  if (ndim != 2 && ndim != 3) throw Error("rasterize: ndim must be 2 or 3");
  const Index nz = ndim == 3 ? side : 1;
  Vec out = Vec::Zero(side * side * nz);
  auto coord = [side](Index k) {
    return (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(side) - 1.0;
  };
  for (Index iz = 0; iz < nz; ++iz) {
    const double z = ndim == 3 ? coord(iz) : 0.0;
    for (Index iy = 0; iy < side; ++iy) {
      for (Index ix = 0; ix < side; ++ix) {
        double v = 0.0;
        for (const auto& e : table)
          if (inside(e, coord(ix), coord(iy), z, ndim)) v += e.value;
        out[(iz * side + iy) * side + ix] = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

Vec shepp_logan(Index side, int ndim) {
  if (side < 4) throw Error("shepp_logan: K must be >= 4");
  if (ndim != 2 && ndim != 3) throw Error("shepp_logan: ndim must be 2 or 3");
  return rasterize(ndim == 2 ? shepp_logan_table_2d() : shepp_logan_table_3d(), side, ndim);
}

Vec skull_cube(Index side) {
  if (side < 4) throw Error("skull_cube: K must be >= 4");
  Vec out = Vec::Zero(side * side * side);
  auto coord = [side](Index k) {
    return (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(side) - 1.0;
  };
  for (Index iz = 0; iz < side; ++iz) {
    for (Index iy = 0; iy < side; ++iy) {
      for (Index ix = 0; ix < side; ++ix) {
        const double x = coord(ix), y = coord(iy), z = coord(iz);
        const double m = std::max({std::abs(x), std::abs(y), std::abs(z)});
        double v = 0.0;
        if (m <= 0.8) v = m >= 0.65 ? 1.0 : 0.25;
        const double d1 = std::hypot(x - 0.3, y + 0.2, z - 0.1);
        const double d2 = std::hypot(x + 0.25, y - 0.3, z + 0.2);
        if (d1 <= 0.18) v = 0.6;
        if (d2 <= 0.12) v = 0.8;
        out[(iz * side + iy) * side + ix] = v;
      }
    }
  }
  return out;
}

double snr_db(const Vec& signal, const Vec& noise) {
  return 20.0 * std::log10(signal.norm() / noise.norm());
}

Vec add_noise(const Vec& y, double target_db, std::uint64_t seed) {
  if (y.norm() == 0.0) throw Error("add_noise: projections are identically zero");
  if (std::isinf(target_db) && target_db > 0.0) return y;
  if (!std::isfinite(target_db)) throw Error("add_noise: target SNR must be finite or +inf");
  Rng rng(seed);
  Vec e(y.size());
  for (Index k = 0; k < y.size(); ++k) e[k] = rng.normal();
  const double scale = y.norm() / (std::pow(10.0, target_db / 20.0) * e.norm());
  return y + scale * e;
}

}  // namespace bsgd
