#pragma once

// Pieces shared by the parallel builder and the serial reference builder.
// Everything here is cheap and independent of how words are indexed.

#include <string>
#include <utility>
#include <vector>

#include "polarize/hierarchy.hpp"

namespace polarize::detail {

/// Range of a word given the per-coordinate ranges of each space.
Interval word_range(std::span<const StateSpace> spaces, const MomentIndex& index);

/// Coordinate letters of space s whose range is contained in [0, inf).
std::vector<bool> nonnegative_letters(const StateSpace& space);

/// Spaces touched by any term of output r (1 if used, else 0).
std::vector<int> slots_needed(const AffineMap& map, int output, int num_spaces);

/// Groups of (r, r') output pairs whose T_{r,r'} are summed into one
/// polarized equality, in row order.
std::vector<std::vector<std::pair<int, int>>> polarized_groups(const AffineMap& map, PolarizationKind kind);

/// Common argument checks. Throws LevelTooLow, ShapeRequired, CapacityError.
void check_spec(const Problem& problem, const HierarchySpec& spec);

/// True when a ">= 0" row is implied by nonnegative coefficients on
/// variables with nonnegative lower bounds.
bool implied_by_bounds(const std::vector<std::pair<int, double>>& entries, const std::vector<double>& lower);

}  // namespace polarize::detail
