#pragma once

#include <cstdint>

#include "gdivide/stats/fit.hpp"
#include "gdivide/stats/frame.hpp"

namespace gdivide::stats {

struct BayesOptions {
  int iterations = 10000;  // retained draws, after burn-in
  int burn_in = 1000;
  std::uint64_t seed = 0;
  double prior_variance = 1e6;  // coefficients ~ N(0, prior_variance)
  double noise_shape = 1e-3;    // noise variance ~ InvGamma(shape, rate)
  double noise_rate = 1e-3;
  bool keep_draws = true;
};

/// Two-block Gibbs sampler for the normal linear model under vague
/// conjugate priors. Reports posterior medians, central 95% credible
/// intervals, and p = 2 min(Pr(b > 0), Pr(b < 0)). R^2 and residuals use the
/// posterior-median coefficients. Deterministic given the seed.
/// Throws ConfigError for iterations < 2000 and SamplerError on a
/// non-finite draw.
FitResult bayes_fit(const ModelFrame& frame, const BayesOptions& options);

}  // namespace gdivide::stats
