#include "bsgd/fixedpoint.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

namespace bsgd {

namespace {

Vec row_mask(const BlockSystem& system, const IndexList& row_blocks, const IndexList& col_blocks) {
  const Index r = system.rows();
  Vec m = Vec::Zero(r * system.col_block_count());
  for (Index j : col_blocks)
    for (Index i : row_blocks)
      for (Index row : system.row_block(i)) m[j * r + row] = 1.0;
  return m;
}

Vec col_mask(const BlockSystem& system, const IndexList& row_blocks, const IndexList& col_blocks) {
  const Index c = system.cols();
  Vec m = Vec::Zero(c * system.row_block_count());
  for (Index i : row_blocks)
    for (Index j : col_blocks)
      for (Index col : system.col_block(j)) m[i * c + col] = 1.0;
  return m;
}

Vec x_mask(const BlockSystem& system, const IndexList& col_blocks) {
  Vec m = Vec::Zero(system.cols());
  for (Index j : col_blocks)
    for (Index col : system.col_block(j)) m[col] = 1.0;
  return m;
}

IndexList random_subset(Rng& rng, Index n) {
  const auto k = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  return sample_without_replacement(rng, n, k);
}

}  // namespace

SelectionMasks masks_from_selection(const BlockSystem& system, const IndexList& row_blocks,
                                    const IndexList& col_blocks) {
  return {row_mask(system, row_blocks, col_blocks), col_mask(system, row_blocks, col_blocks),
          x_mask(system, col_blocks)};
}

SelectionMasks independent_masks(const BlockSystem& system, Rng& rng) {
  const Index m = system.row_block_count();
  const Index n = system.col_block_count();
  SelectionMasks out;
  {
    const IndexList rb = random_subset(rng, m);
    const IndexList cb = random_subset(rng, n);
    out.r1 = row_mask(system, rb, cb);
  }
  {
    const IndexList rb = random_subset(rng, m);
    const IndexList cb = random_subset(rng, n);
    out.r2 = col_mask(system, rb, cb);
  }
  out.r3 = x_mask(system, random_subset(rng, n));
  return out;
}

Vec AugmentedState::stacked() const {
  Vec s(z.size() + g.size() + x.size());
  s << z, g, x;
  return s;
}

double AugmentedState::norm() const { return stacked().norm(); }

AugmentedSystem build_recursion(const BlockSystem& system, const SelectionMasks& masks, double mu,
                                const Vec& y, bool assemble) {
  const Index r = system.rows();
  const Index c = system.cols();
  const Index m = system.row_block_count();
  const Index n = system.col_block_count();
  if (c > kFixedPointMaxCols)
    throw SizeGuardError("build_recursion: image has " + std::to_string(c) +
                         " columns; the dense harness is limited to " +
                         std::to_string(kFixedPointMaxCols));
  const Index dim = n * r + m * c + c;
  if (assemble && dim > kFixedPointMaxMatrixDim)
    throw SizeGuardError("build_recursion: recursion matrix would be " + std::to_string(dim) +
                         " square; limit is " + std::to_string(kFixedPointMaxMatrixDim));
  if (masks.r1.size() != n * r || masks.r2.size() != m * c || masks.r3.size() != c)
    throw DimensionError("build_recursion: mask sizes do not match the system");
  if (y.size() != r) throw DimensionError("build_recursion: y has wrong length");

  AugmentedSystem aug;
  aug.rows = r;
  aug.cols = c;
  aug.row_blocks = m;
  aug.col_blocks = n;
  aug.mu = mu;
  aug.y = y;
  aug.masks = masks;

  const Eigen::MatrixXd a = system.dense();
  aug.a_bar = Eigen::MatrixXd::Zero(n * r, c);
  for (Index j = 0; j < n; ++j)
    for (Index col : system.col_block(j)) aug.a_bar.block(j * r, col, r, 1) = a.col(col);
  aug.at_bar = Eigen::MatrixXd::Zero(m * c, r);
  for (Index i = 0; i < m; ++i)
    for (Index row : system.row_block(i)) aug.at_bar.block(i * c, row, c, 1) = a.row(row).transpose();
  aug.i_nr = Eigen::MatrixXd::Zero(r, n * r);
  for (Index j = 0; j < n; ++j) aug.i_nr.block(0, j * r, r, r).setIdentity();
  aug.i_mc = Eigen::MatrixXd::Zero(c, m * c);
  for (Index i = 0; i < m; ++i) aug.i_mc.block(0, i * c, c, c).setIdentity();

  if (assemble) {
    const Index nz = n * r, ng = m * c;
    const auto r1 = masks.r1.asDiagonal();
    const auto r2 = masks.r2.asDiagonal();
    const auto r3 = masks.r3.asDiagonal();
    const Eigen::MatrixXd keep1 = (Vec::Ones(nz) - masks.r1).asDiagonal().toDenseMatrix();
    const Eigen::MatrixXd keep2 = (Vec::Ones(ng) - masks.r2).asDiagonal().toDenseMatrix();

    // Rows of z+ in terms of (z, g, x).
    const Eigen::MatrixXd zz = keep1;
    const Eigen::MatrixXd zx = r1 * aug.a_bar;
    // g+ = keep2 g + 2 R2 At_bar (y - I_Nr z+).
    const Eigen::MatrixXd gpre = -2.0 * (r2 * aug.at_bar) * aug.i_nr;
    const Eigen::MatrixXd gz = gpre * zz;
    const Eigen::MatrixXd gg = keep2;
    const Eigen::MatrixXd gx = gpre * zx;
    const Vec gb = 2.0 * (r2 * (aug.at_bar * y));
    // x+ = x + mu R3 I_Mc g+.
    const Eigen::MatrixXd xpre = mu * (r3 * aug.i_mc);

    aug.m_matrix = Eigen::MatrixXd::Zero(dim, dim);
    aug.m_matrix.block(0, 0, nz, nz) = zz;
    aug.m_matrix.block(0, nz + ng, nz, c) = zx;
    aug.m_matrix.block(nz, 0, ng, nz) = gz;
    aug.m_matrix.block(nz, nz, ng, ng) = gg;
    aug.m_matrix.block(nz, nz + ng, ng, c) = gx;
    aug.m_matrix.block(nz + ng, 0, c, nz) = xpre * gz;
    aug.m_matrix.block(nz + ng, nz, c, ng) = xpre * gg;
    aug.m_matrix.block(nz + ng, nz + ng, c, c) =
        Eigen::MatrixXd::Identity(c, c) + xpre * gx;
    aug.affine = Vec::Zero(dim);
    aug.affine.segment(nz, ng) = gb;
    aug.affine.segment(nz + ng, c) = xpre * gb;
  }
  return aug;
}

AugmentedState apply_recursion(const AugmentedSystem& aug, const AugmentedState& s) {
  AugmentedState out;
  out.z = s.z + aug.masks.r1.cwiseProduct(aug.a_bar * s.x - s.z);
  const Vec resid = aug.y - aug.i_nr * out.z;
  out.g = s.g + aug.masks.r2.cwiseProduct(2.0 * (aug.at_bar * resid) - s.g);
  out.x = s.x + aug.mu * aug.masks.r3.cwiseProduct(aug.i_mc * out.g);
  return out;
}

Vec apply_matrix(const AugmentedSystem& aug, const Vec& stacked) {
  if (aug.m_matrix.size() == 0) throw Error("apply_matrix: recursion matrix was not assembled");
  return aug.m_matrix * stacked + aug.affine;
}

AugmentedState stationary_state(const AugmentedSystem& aug, const Vec& x) {
  AugmentedState s;
  s.z = aug.a_bar * x;
  s.g = 2.0 * (aug.at_bar * (aug.y - aug.i_nr * s.z));
  s.x = x;
  return s;
}

std::string FixedPointReport::to_text() const {
  std::ostringstream out;
  out << std::setprecision(6) << std::scientific;
  out << "trials " << trials << "\n"
      << "state_norm " << state_norm << "\n"
      << "normal_residual " << normal_residual << "\n"
      << "aligned_change " << aligned_change << "\n"
      << "independent_change " << independent_change << "\n"
      << "perturbation " << perturbation << "\n"
      << "perturbed_aligned_change " << perturbed_aligned_change << "\n"
      << "perturbed_independent_change " << perturbed_independent_change << "\n";
  return out.str();
}

FixedPointReport verify_fixed_point(const BlockSystem& system, const Vec& y, const Vec& x_star,
                                    double mu, Index trials, std::uint64_t seed,
                                    double perturbation) {
  if (trials < 1) throw Error("verify_fixed_point: trials must be >= 1");
  if (x_star.size() != system.cols()) throw DimensionError("verify_fixed_point: x* has wrong length");
  Rng rng(seed);
  const Index m = system.row_block_count();
  const Index n = system.col_block_count();

  AugmentedSystem aug = build_recursion(
      system, masks_from_selection(system, {0}, {0}), mu, y, /*assemble=*/false);
  const AugmentedState star = stationary_state(aug, x_star);

  // Perturb every component of the lifted state.
  AugmentedState moved = star;
  {
    Vec delta(star.z.size() + star.g.size() + star.x.size());
    for (Index k = 0; k < delta.size(); ++k) delta[k] = rng.normal();
    delta *= perturbation / delta.norm();
    moved.z += delta.head(star.z.size());
    moved.g += delta.segment(star.z.size(), star.g.size());
    moved.x += delta.tail(star.x.size());
  }
  const double moved_dist = perturbation;

  FixedPointReport rep;
  rep.trials = trials;
  rep.perturbation = perturbation;
  rep.state_norm = star.norm();
  const Vec aty = system.back(y);
  rep.normal_residual = system.back(y - system.forward(x_star)).norm() / aty.norm();
  rep.perturbed_aligned_change = std::numeric_limits<double>::infinity();
  rep.perturbed_independent_change = std::numeric_limits<double>::infinity();

  auto change = [&](const AugmentedState& s) {
    return (apply_recursion(aug, s).stacked() - s.stacked()).norm();
  };
  for (Index t = 0; t < trials; ++t) {
    const IndexList rb = random_subset(rng, m);
    const IndexList cb = random_subset(rng, n);
    aug.masks = masks_from_selection(system, rb, cb);
    rep.aligned_change = std::max(rep.aligned_change, change(star) / rep.state_norm);
    rep.perturbed_aligned_change =
        std::min(rep.perturbed_aligned_change, change(moved) / moved_dist);

    aug.masks = independent_masks(system, rng);
    rep.independent_change = std::max(rep.independent_change, change(star) / rep.state_norm);
    rep.perturbed_independent_change =
        std::min(rep.perturbed_independent_change, change(moved) / moved_dist);
  }
  return rep;
}

}  // namespace bsgd
