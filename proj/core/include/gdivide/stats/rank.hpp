#pragma once

#include <span>
#include <vector>

namespace gdivide::stats {

/// Descending ranks: the largest value gets rank 1, ties share the average
/// of the ranks they span. Throws DomainError for fewer than two values or
/// any non-finite value.
std::vector<double> rank_transform(std::span<const double> values);

/// Maps ranks affinely onto [0, 1] with rank n -> 0 and rank 1 -> 1,
/// i.e. (n - rank) / (n - 1). Throws DomainError for n < 2.
std::vector<double> rescale_unit(std::span<const double> ranks);

/// Ascending average ranks (rank 1 = smallest), as used by Spearman.
std::vector<double> ascending_ranks(std::span<const double> values);

}  // namespace gdivide::stats
