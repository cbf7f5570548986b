#pragma once

#include "bsgd/common.hpp"

namespace bsgd {

struct ImageShape {
  Index side = 1;
  int ndim = 2;
  Index size() const { return ndim == 2 ? side * side : side * side * side; }
};

struct TvOptions {
  int iters = 20;
  double tol = 1e-4;
};

/// Isotropic total variation with backward differences,
/// sum over pixels of sqrt(sum_axis (x_p - x_{p - e_axis})^2); differences
/// that would leave the grid are zero.
double total_variation(const Vec& x, const ImageShape& shape);

/// ||t - x||^2 + 2 * weight * TV(t), the proximal objective.
double tv_prox_objective(const Vec& t, const Vec& x, const ImageShape& shape, double weight);

/// Approximate argmin_t ||t - x||^2 + 2 * weight * TV(t) by Chambolle's
/// dual projection iterations. Stops after `iters` sweeps or once the dual
/// variable moves less than `tol` (max norm). Never returns a point with a
/// larger objective than x itself.
Vec tv_prox(const Vec& x, const ImageShape& shape, double weight, const TvOptions& opts = {});

}  // namespace bsgd
