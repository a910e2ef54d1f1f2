#pragma once

#include <span>

namespace tutorforge {

/// Sample Pearson correlation. Throws DegenerateInput when lengths differ,
/// n < 2, or either vector is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// Kendall tau-b (tie-corrected), computed in O(n log n) via merge-sort
/// discordance counting. Throws DegenerateInput when lengths differ, n < 2,
/// or all pairs are tied in either vector.
double kendall_tau(std::span<const double> a, std::span<const double> b);

}  // namespace tutorforge
