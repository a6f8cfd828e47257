#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace gdivide::stats {

struct Correlation {
  double r = 0;
  double ci_low = 0;
  double ci_high = 0;
  double p = 1;  // two-sided
  std::size_t n = 0;
};

/// Pearson's r with a Fisher-z 95% interval and a t-test p-value.
/// Needs equal lengths >= 4; throws DegenerateError for a constant vector.
Correlation pearson(std::span<const double> x, std::span<const double> y, double level = 0.95);

struct SpearmanOptions {
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: process default
  double level = 0.95;
};

/// Spearman's rho (Pearson on average ranks) with a percentile-bootstrap
/// interval. Resamples in which either vector is constant are dropped.
Correlation spearman(std::span<const double> x, std::span<const double> y, const SpearmanOptions& options);

/// sum(w * y) / sum(w) for 0/1 responses. Throws DegenerateError when the
/// weights sum to zero and DomainError for negative weights or bad lengths.
double weighted_proportion(std::span<const double> responses, std::span<const double> weights);

}  // namespace gdivide::stats
