#include "gdivide/stats/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gdivide/error.hpp"

namespace gdivide::stats {

namespace {

template <typename Less>
std::vector<double> average_ranks(std::span<const double> values, Less less) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return less(values[a], values[b]); });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

void check_values(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("rank transform needs at least two values");
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("rank transform of a non-finite value");
  }
}

}  // namespace

std::vector<double> rank_transform(std::span<const double> values) {
  check_values(values);
  return average_ranks(values, std::greater<double>());
}

std::vector<double> ascending_ranks(std::span<const double> values) {
  check_values(values);
  return average_ranks(values, std::less<double>());
}

std::vector<double> rescale_unit(std::span<const double> ranks) {
  const std::size_t n = ranks.size();
  if (n < 2) throw DomainError("rescale_unit needs at least two ranks");
  const double denom = static_cast<double>(n) - 1.0;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (static_cast<double>(n) - ranks[i]) / denom;
  return out;
}

}  // namespace gdivide::stats
