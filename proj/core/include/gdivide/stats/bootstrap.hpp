#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdivide/stats/frame.hpp"

namespace gdivide::stats {

/// R^2 of `conditioning` when fitted (with intercept) to the outcome after
/// residualizing it on `controls` (with intercept). Throws SingularityError
/// when the controls are rank deficient.
double partial_r2(const ModelFrame& frame, const std::string& conditioning, std::span<const std::string> controls);

struct BootstrapOptions {
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;               // 0: process default
  double max_skip_fraction = 0.01;
};

struct PartialR2Distribution {
  double point = 0;    // on the full sample
  double median = 0;
  std::vector<double> values;  // one per kept resample, in resample order
  std::size_t skipped = 0;
  std::size_t resamples = 0;
};

/// Row bootstrap of partial_r2. Resample b uses the generator
/// derive_seed(seed, b), so output is independent of the thread count.
/// Resamples whose controls lose rank are skipped; more than
/// max_skip_fraction skipped throws DegenerateError. Needs >= 1000
/// resamples and a conditioning term outside `controls`.
PartialR2Distribution bootstrap_partial_r2(const ModelFrame& frame, const std::string& conditioning,
                                           std::span<const std::string> controls, const BootstrapOptions& options);

}  // namespace gdivide::stats
