#pragma once

#include <utility>

#include "nsbmo/field.hpp"

namespace nsbmo::spectral {

// Homogeneous Littlewood-Paley decomposition. The profile is
//   phi(r) = chi(r / 2) - chi(r),
// where chi is a C-infinity radial step equal to 1 on [0, 4/5] and 0 on [1, inf).
// phi is supported in (4/5, 2), inside the annulus (3/4, 8/3), and equals 1 on
// [1, 8/5], so |k| = 2^j falls in exactly one block.

/// Smooth step: 1 for r <= 4/5, 0 for r >= 1.
double lp_cutoff(double r);
/// Unnormalized block profile phi(r).
double lp_profile(double r);
/// Weight of block j at radius |k|: phi(2^-j |k|) / sum_i phi(2^-i |k|).
double lp_weight(int j, double k_norm);

/// Inclusive range of block indices that touch some nonzero mode of the grid.
std::pair<int, int> active_blocks(const Grid& grid);

/// Delta_j f: each mode multiplied by lp_weight(j, |k|).
template <int C>
Field<C> dyadic_block(const Field<C>& f, int j);

}  // namespace nsbmo::spectral
