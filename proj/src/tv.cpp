#include "bsgd/tv.hpp"

#include <array>
#include <cmath>

namespace bsgd {

namespace {

std::array<Index, 3> strides(const ImageShape& s) { return {1, s.side, s.side * s.side}; }

Index coord(Index p, int axis, const ImageShape& s) {
  Index q = p;
  for (int a = 0; a < axis; ++a) q /= s.side;
  return q % s.side;
}

// Backward differences, one component block of length n per axis.
void gradient(const Vec& x, const ImageShape& s, std::vector<Vec>& out) {
  const auto st = strides(s);
  const Index n = s.size();
  for (int a = 0; a < s.ndim; ++a) {
    Vec& d = out[static_cast<std::size_t>(a)];
    d.resize(n);
    for (Index p = 0; p < n; ++p)
      d[p] = coord(p, a, s) > 0 ? x[p] - x[p - st[static_cast<std::size_t>(a)]] : 0.0;
  }
}

// Adjoint of `gradient`.
Vec gradient_adjoint(const std::vector<Vec>& q, const ImageShape& s) {
  const auto st = strides(s);
  const Index n = s.size();
  Vec out = Vec::Zero(n);
  for (int a = 0; a < s.ndim; ++a) {
    const Vec& d = q[static_cast<std::size_t>(a)];
    const Index step = st[static_cast<std::size_t>(a)];
    for (Index p = 0; p < n; ++p) {
      const Index c = coord(p, a, s);
      if (c > 0) out[p] += d[p];
      if (c + 1 < s.side) out[p] -= d[p + step];
    }
  }
  return out;
}

}  // namespace

double total_variation(const Vec& x, const ImageShape& shape) {
  std::vector<Vec> g(static_cast<std::size_t>(shape.ndim));
  gradient(x, shape, g);
  double tv = 0.0;
  for (Index p = 0; p < shape.size(); ++p) {
    double sq = 0.0;
    for (const auto& d : g) sq += d[p] * d[p];
    tv += std::sqrt(sq);
  }
  return tv;
}

double tv_prox_objective(const Vec& t, const Vec& x, const ImageShape& shape, double weight) {
  return (t - x).squaredNorm() + 2.0 * weight * total_variation(t, shape);
}

Vec tv_prox(const Vec& x, const ImageShape& shape, double weight, const TvOptions& opts) {
  if (x.size() != shape.size()) throw DimensionError("tv_prox: image length does not match shape");
  if (weight < 0.0) throw Error("tv_prox: weight must be >= 0");
  if (weight == 0.0) return x;

  const Index n = shape.size();
  const double tau = 1.0 / (4.0 * shape.ndim);
  std::vector<Vec> p(static_cast<std::size_t>(shape.ndim), Vec::Zero(n));
  std::vector<Vec> grad(static_cast<std::size_t>(shape.ndim));
  const Vec scaled = x / weight;
  for (int it = 0; it < opts.iters; ++it) {
    const Vec q = -gradient_adjoint(p, shape) - scaled;
    gradient(q, shape, grad);
    double moved = 0.0;
    for (Index k = 0; k < n; ++k) {
      double mag = 0.0;
      for (const auto& g : grad) mag += g[k] * g[k];
      const double denom = 1.0 + tau * std::sqrt(mag);
      for (int a = 0; a < shape.ndim; ++a) {
        auto& pa = p[static_cast<std::size_t>(a)];
        const double next = (pa[k] + tau * grad[static_cast<std::size_t>(a)][k]) / denom;
        moved = std::max(moved, std::abs(next - pa[k]));
        pa[k] = next;
      }
    }
    if (moved < opts.tol) break;
  }
  Vec t = x + weight * gradient_adjoint(p, shape);
  if (tv_prox_objective(t, x, shape, weight) > tv_prox_objective(x, x, shape, weight)) return x;
  return t;
}

}  // namespace bsgd
