#include "bsgd/lsqr.hpp"

#include "instances.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

using namespace bsgd;
using bsgd::testing::fan_params;
using bsgd::testing::make_system;
using bsgd::testing::random_vec;

TEST(Lsqr, TallFullRank) {
  Rng rng(2);
  Eigen::MatrixXd a(40, 12);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  const Vec y = random_vec(rng, 40);
  const Vec ref = a.colPivHouseholderQr().solve(y);
  const LsqrResult res = lsqr_solve(DenseOperator(a), y, 1e-12, 500);
  EXPECT_TRUE(res.converged);
  EXPECT_LE((res.x - ref).norm(), 1e-9 * ref.norm());
  EXPECT_NEAR(res.residual, (y - a * res.x).norm(), 1e-12 * y.norm());
  EXPECT_NEAR(res.normal_residual, (a.transpose() * (y - a * res.x)).norm(), 1e-12 * y.norm());
}

TEST(Lsqr, RankDeficientGivesMinimumNorm) {
  Rng rng(8);
  Eigen::MatrixXd b(30, 5), c(5, 10);
  for (Index i = 0; i < 30; ++i)
    for (Index j = 0; j < 5; ++j) b(i, j) = rng.normal();
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 10; ++j) c(i, j) = rng.normal();
  const Eigen::MatrixXd a = b * c;
  const Vec y = random_vec(rng, 30);
  const Vec ref = a.completeOrthogonalDecomposition().solve(y);
  const LsqrResult res = lsqr_solve(DenseOperator(a), y, 1e-12, 500);
  EXPECT_TRUE(res.converged);
  EXPECT_LE((res.x - ref).norm(), 1e-8 * ref.norm());
}

TEST(Lsqr, SystemOperatorMatchesNormalEquations) {
  const auto sys = make_system(fan_params(8, 12, 30.0), 2, 2);
  const Eigen::MatrixXd a = sys->dense();
  Rng rng(6);
  const Vec y = random_vec(rng, sys->rows());
  const Vec ref = a.completeOrthogonalDecomposition().solve(y);
  const LsqrResult res = lsqr_solve(SystemOperator(*sys), y, 1e-12, 5000);
  EXPECT_TRUE(res.converged);
  EXPECT_LE((res.x - ref).norm(), 1e-7 * ref.norm());
  EXPECT_LE(res.normal_residual, 1e-12 * (a.transpose() * y).norm());
}

TEST(Lsqr, IterationCapReportsBestIterate) {
  Rng rng(2);
  Eigen::MatrixXd a(60, 30);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal() * (1.0 + j);
  const Vec y = random_vec(rng, 60);
  const LsqrResult res = lsqr_solve(DenseOperator(a), y, 1e-14, 3);
  EXPECT_FALSE(res.converged);
  EXPECT_LE(res.iterations, 3);
  EXPECT_LT(res.normal_residual, (a.transpose() * y).norm());
}

TEST(Lsqr, ZeroData) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 3);
  const LsqrResult res = lsqr_solve(DenseOperator(a), Vec::Zero(4), 1e-12, 10);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.x.norm(), 0.0);
}
