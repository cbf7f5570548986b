#pragma once

#include "bsgd/block_system.hpp"
#include "bsgd/common.hpp"

#include <Eigen/Core>
#include <string>

namespace bsgd {

/// Largest image the augmented recursion may be built for.
inline constexpr Index kFixedPointMaxCols = 256;
/// Largest stacked state for which the dense recursion matrix is assembled.
inline constexpr Index kFixedPointMaxMatrixDim = 4096;

/// Diagonals of the 0/1 selection matrices R1 (Nr), R2 (Mc) and R3 (c).
struct SelectionMasks {
  Vec r1;
  Vec r2;
  Vec r3;
};

/// Masks of one epoch selecting the given row and column blocks: R1 keeps
/// rows I_i of every selected z^j, R2 keeps columns J_j of every selected
/// g^i, R3 keeps the selected columns of x.
SelectionMasks masks_from_selection(const BlockSystem& system, const IndexList& row_blocks,
                                    const IndexList& col_blocks);

/// R1, R2 and R3 each built from its own independent random block draw.
SelectionMasks independent_masks(const BlockSystem& system, Rng& rng);

/// Stacked recursion state: z (Nr), g (Mc), x (c).
struct AugmentedState {
  Vec z;
  Vec g;
  Vec x;

  Vec stacked() const;
  double norm() const;
};

/// The lifted system. With A^{J_j} the columns J_j of A (others zeroed) and
/// A_{I_i} the rows I_i,
///   A_bar   = [A^{J_1}; ...; A^{J_N}]            (Nr x c)
///   At_bar  = [A_{I_1}^T, ...; A_{I_M}^T]        (Mc x r)
///   I_Nr    = [I ... I]                           (r x Nr)
///   I_Mc    = [I ... I]                           (c x Mc)
/// and one step of the recursion is
///   z+ = z + R1 (A_bar x - z)
///   g+ = g + R2 (2 At_bar (y - I_Nr z+) - g)
///   x+ = x + mu R3 I_Mc g+
/// which is affine: s+ = M s + b.
struct AugmentedSystem {
  Index rows = 0;
  Index cols = 0;
  Index row_blocks = 0;
  Index col_blocks = 0;
  double mu = 0.0;
  Vec y;
  Eigen::MatrixXd a_bar;
  Eigen::MatrixXd at_bar;
  Eigen::MatrixXd i_nr;
  Eigen::MatrixXd i_mc;
  SelectionMasks masks;
  Eigen::MatrixXd m_matrix;  // empty unless assembled
  Vec affine;                // empty unless assembled
};

/// Builds the lifted matrices for the given masks. The dense recursion
/// matrix and affine term are assembled when `assemble` is set. Throws
/// SizeGuardError when c exceeds kFixedPointMaxCols or, with `assemble`,
/// the state exceeds kFixedPointMaxMatrixDim.
AugmentedSystem build_recursion(const BlockSystem& system, const SelectionMasks& masks, double mu,
                                const Vec& y, bool assemble = true);

/// One recursion step evaluated factor by factor.
AugmentedState apply_recursion(const AugmentedSystem& aug, const AugmentedState& s);

/// One recursion step as M s + b; requires an assembled system.
Vec apply_matrix(const AugmentedSystem& aug, const Vec& stacked);

/// (A_bar x, 2 At_bar (y - A x), x): the only form a fixed point can take.
AugmentedState stationary_state(const AugmentedSystem& aug, const Vec& x);

struct FixedPointReport {
  Index trials = 0;
  double state_norm = 0.0;
  double normal_residual = 0.0;  // ||A^T (y - A x*)|| / ||A^T y||
  // max over trials of ||T(s*) - s*|| / ||s*||
  double aligned_change = 0.0;
  double independent_change = 0.0;
  // min over trials of ||T(s) - s|| / ||s - s*|| at s = s* + delta, a
  // random perturbation of the whole lifted state, ||delta|| = perturbation
  double perturbed_aligned_change = 0.0;
  double perturbed_independent_change = 0.0;
  double perturbation = 0.0;

  std::string to_text() const;
};

/// Applies `trials` random epoch-consistent masks and `trials` independent
/// mask triples to the stationary state at x_star, and again to that state
/// plus a seeded perturbation of norm `perturbation`.
FixedPointReport verify_fixed_point(const BlockSystem& system, const Vec& y, const Vec& x_star,
                                    double mu, Index trials, std::uint64_t seed,
                                    double perturbation = 1e-3);

}  // namespace bsgd
