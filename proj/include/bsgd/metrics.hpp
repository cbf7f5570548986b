#pragma once

#include "bsgd/block_system.hpp"
#include "bsgd/common.hpp"

#include <optional>

namespace bsgd {

/// Reconstruction SNR reported when the error is exactly zero.
inline constexpr double kSnrCapDb = 300.0;

struct Metrics {
  std::optional<double> ds;  // ||x - x_lsq||, absent without x_lsq
  double snr = 0.0;          // 20 log10(||x_true|| / ||x - x_true||)
  double gap = 0.0;          // ||y - A x||
  bool snr_capped = false;
};

/// SNR in dB capped at kSnrCapDb; `capped` is set when the cap applies.
double reconstruction_snr(const Vec& x, const Vec& x_true, bool* capped = nullptr);

Metrics compute_metrics(const Vec& x, const Vec& x_true, const Vec* x_lsq,
                        const BlockSystem& system, const Vec& y);

}  // namespace bsgd
