#include "bsgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsgd {

double reconstruction_snr(const Vec& x, const Vec& x_true, bool* capped) {
  if (x.size() != x_true.size()) throw DimensionError("reconstruction_snr: length mismatch");
  const double err = (x - x_true).norm();
  const double sig = x_true.norm();
  double snr = kSnrCapDb;
  bool cap = true;
  if (std::isnan(err)) {
    snr = std::numeric_limits<double>::quiet_NaN();
    cap = false;
  } else if (err > 0.0) {
    snr = 20.0 * std::log10(sig / err);
    cap = snr > kSnrCapDb;
    snr = std::min(snr, kSnrCapDb);
  }
  if (capped) *capped = cap;
  return snr;
}

Metrics compute_metrics(const Vec& x, const Vec& x_true, const Vec* x_lsq,
                        const BlockSystem& system, const Vec& y) {
  if (x.size() != system.cols() || y.size() != system.rows())
    throw DimensionError("compute_metrics: vectors do not match the system");
  Metrics m;
  if (x_lsq) {
    if (x_lsq->size() != x.size()) throw DimensionError("compute_metrics: x_lsq has wrong length");
    m.ds = (x - *x_lsq).norm();
  }
  m.snr = reconstruction_snr(x, x_true, &m.snr_capped);
  m.gap = (y - system.forward(x)).norm();
  return m;
}

}  // namespace bsgd
