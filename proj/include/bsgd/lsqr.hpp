#pragma once

#include "bsgd/block_system.hpp"
#include "bsgd/common.hpp"

#include <Eigen/Core>

namespace bsgd {

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual Vec apply(const Vec& x) const = 0;
  virtual Vec apply_transpose(const Vec& y) const = 0;
};

class SystemOperator final : public LinearOperator {
 public:
  explicit SystemOperator(const BlockSystem& system) : system_(system) {}
  Index rows() const override { return system_.rows(); }
  Index cols() const override { return system_.cols(); }
  Vec apply(const Vec& x) const override { return system_.forward(x); }
  Vec apply_transpose(const Vec& y) const override { return system_.back(y); }

 private:
  const BlockSystem& system_;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXd a) : a_(std::move(a)) {}
  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  Vec apply(const Vec& x) const override { return a_ * x; }
  Vec apply_transpose(const Vec& y) const override { return a_.transpose() * y; }

 private:
  Eigen::MatrixXd a_;
};

struct LsqrResult {
  Vec x;
  Index iterations = 0;
  bool converged = false;
  double normal_residual = 0.0;  // ||A^T (y - A x)||
  double residual = 0.0;         // ||y - A x||
};

/// Paige-Saunders LSQR from x = 0. Converged when
/// ||A^T (y - A x)|| <= tol * ||A^T y|| (checked exactly, not only through
/// the recurrence estimate). On hitting max_iters the iterate with the
/// smallest normal residual seen is returned with converged = false.
LsqrResult lsqr_solve(const LinearOperator& a, const Vec& y, double tol, Index max_iters);

}  // namespace bsgd
