#include "bsgd/lsqr.hpp"

#include <cmath>

namespace bsgd {

LsqrResult lsqr_solve(const LinearOperator& a, const Vec& y, double tol, Index max_iters) {
  if (!(tol > 0.0)) throw Error("lsqr_solve: tol must be positive");
  if (y.size() != a.rows()) throw DimensionError("lsqr_solve: y has wrong length");

  LsqrResult out;
  out.x = Vec::Zero(a.cols());
  const double aty_norm = a.apply_transpose(y).norm();
  if (aty_norm == 0.0) {
    out.converged = true;
    out.residual = y.norm();
    return out;
  }

  auto exact_normal_residual = [&](const Vec& x) {
    const Vec r = y - a.apply(x);
    return std::pair{a.apply_transpose(r).norm(), r.norm()};
  };

  Vec u = y;
  double beta = u.norm();
  u /= beta;
  Vec v = a.apply_transpose(u);
  double alpha = v.norm();
  v /= alpha;
  Vec w = v;
  Vec x = Vec::Zero(a.cols());
  double phi_bar = beta;
  double rho_bar = alpha;

  double best = std::numeric_limits<double>::infinity();
  for (Index it = 1; it <= max_iters; ++it) {
    u = a.apply(v) - alpha * u;
    beta = u.norm();
    if (beta > 0.0) u /= beta;
    v = a.apply_transpose(u) - beta * v;
    alpha = v.norm();
    if (alpha > 0.0) v /= alpha;

    const double rho = std::hypot(rho_bar, beta);
    const double c = rho_bar / rho;
    const double sn = beta / rho;
    const double theta = sn * alpha;
    rho_bar = -c * alpha;
    const double phi = c * phi_bar;
    phi_bar = sn * phi_bar;
    x += (phi / rho) * w;
    w = v - (theta / rho) * w;
    out.iterations = it;

    const double estimate = phi_bar * alpha * std::abs(c);
    if (estimate <= tol * aty_norm || alpha == 0.0 || beta == 0.0) {
      const auto [normal, res] = exact_normal_residual(x);
      if (normal < best) {
        best = normal;
        out.x = x;
        out.normal_residual = normal;
        out.residual = res;
      }
      if (normal <= tol * aty_norm) {
        out.converged = true;
        return out;
      }
      if (alpha == 0.0 || beta == 0.0) break;
    } else if (it % 50 == 0 || it == max_iters) {
      const auto [normal, res] = exact_normal_residual(x);
      if (normal < best) {
        best = normal;
        out.x = x;
        out.normal_residual = normal;
        out.residual = res;
      }
    }
  }
  return out;
}

}  // namespace bsgd
