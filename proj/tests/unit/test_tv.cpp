#include "bsgd/tv.hpp"

#include "instances.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>

using namespace bsgd;
using bsgd::testing::random_vec;

namespace {

/// Backward-difference operator as an explicit (ndim * n) x n matrix,
/// rows grouped by axis.
Eigen::MatrixXd difference_matrix(Index side, int ndim) {
  const Index n = ndim == 2 ? side * side : side * side * side;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ndim * n, n);
  for (Index k = 0; k < n; ++k) {
    const Index x = k % side, y = (k / side) % side, z = k / (side * side);
    const Index coord[3] = {x, y, z};
    const Index stride[3] = {1, side, side * side};
    for (int a = 0; a < ndim; ++a) {
      if (coord[a] == 0) continue;
      d(a * n + k, k) = 1.0;
      d(a * n + k, k - stride[a]) = -1.0;
    }
  }
  return d;
}

/// argmin ||t - x||^2 + 2 w TV(t) by ADMM on the split d = D t.
Vec admm_prox(const Vec& x, Index side, int ndim, double w, int iters) {
  const Eigen::MatrixXd dm = difference_matrix(side, ndim);
  const Index n = x.size();
  const double rho = 2.0;
  const Eigen::LDLT<Eigen::MatrixXd> solve(Eigen::MatrixXd::Identity(n, n) + rho * dm.transpose() * dm);
  Vec d = Vec::Zero(dm.rows()), b = Vec::Zero(dm.rows()), t = x;
  for (int it = 0; it < iters; ++it) {
    t = solve.solve(x + rho * dm.transpose() * (d - b));
    const Vec dt = dm * t + b;
    for (Index k = 0; k < n; ++k) {
      double mag = 0.0;
      for (int a = 0; a < ndim; ++a) mag += dt[a * n + k] * dt[a * n + k];
      mag = std::sqrt(mag);
      const double scale = mag > w / rho ? 1.0 - (w / rho) / mag : 0.0;
      for (int a = 0; a < ndim; ++a) d[a * n + k] = scale * dt[a * n + k];
    }
    b = dt - d;
  }
  return t;
}

}  // namespace

TEST(TotalVariation, StepEdge) {
  const ImageShape shape{4, 2};
  Vec x = Vec::Zero(16);
  for (Index k = 0; k < 16; ++k)
    if (k % 4 >= 2) x[k] = 1.0;
  EXPECT_DOUBLE_EQ(total_variation(x, shape), 4.0);
  EXPECT_DOUBLE_EQ(total_variation(Vec::Constant(16, 3.0), shape), 0.0);
}

TEST(TotalVariation, IsotropicCorner) {
  const ImageShape shape{3, 2};
  Vec x = Vec::Zero(9);
  x[4] = 1.0;  // centre pixel
  // centre: sqrt(1 + 1); right neighbour and lower neighbour: 1 each.
  EXPECT_DOUBLE_EQ(total_variation(x, shape), std::sqrt(2.0) + 2.0);
}

TEST(TotalVariation, MatchesDifferenceMatrix) {
  Rng rng(3);
  for (int ndim : {2, 3}) {
    const Index side = 4;
    const ImageShape shape{side, ndim};
    const Vec x = random_vec(rng, shape.size());
    const Vec dx = difference_matrix(side, ndim) * x;
    const Index n = shape.size();
    double tv = 0.0;
    for (Index k = 0; k < n; ++k) {
      double m = 0.0;
      for (int a = 0; a < ndim; ++a) m += dx[a * n + k] * dx[a * n + k];
      tv += std::sqrt(m);
    }
    EXPECT_NEAR(total_variation(x, shape), tv, 1e-12 * tv);
  }
}

TEST(TvProx, ConvergesToIndependentMinimiser) {
  Rng rng(17);
  for (int ndim : {2, 3}) {
    const Index side = ndim == 2 ? 4 : 3;
    const ImageShape shape{side, ndim};
    for (double w : {0.05, 0.3, 1.0}) {
      const Vec x = random_vec(rng, shape.size());
      const Vec ref = admm_prox(x, side, ndim, w, 20000);
      const Vec t = tv_prox(x, shape, w, {20000, 0.0});
      const double f_ref = tv_prox_objective(ref, x, shape, w);
      const double f = tv_prox_objective(t, x, shape, w);
      EXPECT_NEAR(f, f_ref, 1e-6 * f_ref) << ndim << " " << w;
      EXPECT_LE((t - ref).norm(), 1e-3 * (1.0 + ref.norm())) << ndim << " " << w;
    }
  }
}

TEST(TvProx, FewIterationsStillDescend) {
  Rng rng(5);
  const ImageShape shape{8, 2};
  const Vec x = random_vec(rng, shape.size());
  const double f0 = tv_prox_objective(x, x, shape, 0.5);
  double prev = f0;
  for (int iters : {1, 5, 20, 200}) {
    const double f = tv_prox_objective(tv_prox(x, shape, 0.5, {iters, 0.0}), x, shape, 0.5);
    EXPECT_LE(f, f0);
    EXPECT_LE(f, prev + 1e-9);
    prev = f;
  }
}

TEST(TvProx, TrivialCases) {
  const ImageShape shape{4, 2};
  Rng rng(1);
  const Vec x = random_vec(rng, 16);
  EXPECT_EQ(tv_prox(x, shape, 0.0), x);
  const Vec c = Vec::Constant(16, 2.5);
  EXPECT_LE((tv_prox(c, shape, 1.0) - c).norm(), 1e-12);
  EXPECT_THROW(tv_prox(x, ImageShape{5, 2}, 1.0), DimensionError);
  EXPECT_THROW(tv_prox(x, shape, -1.0), Error);
  // Huge weight flattens to the mean.
  const Vec flat = tv_prox(x, shape, 1e3, {5000, 0.0});
  EXPECT_LE((flat - Vec::Constant(16, x.mean())).norm(), 1e-3);
}
