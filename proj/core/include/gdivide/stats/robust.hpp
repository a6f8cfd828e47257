#pragma once

#include <cstdint>
#include <span>

#include "gdivide/stats/fit.hpp"
#include "gdivide/stats/frame.hpp"

namespace gdivide::stats {

/// Tukey bisquare, normalized so rho(inf) = 1.
struct Bisquare {
  double c;

  double rho(double u) const;
  double psi(double u) const;         // derivative of c^2/6 * rho
  double psi_prime(double u) const;
  double weight(double u) const;      // psi(u) / u
};

struct MmOptions {
  // S step: 50% breakdown bisquare, mean rho = b.
  double s_tuning = 1.548;
  double s_breakdown = 0.5;
  int subsamples = 500;
  int refine_steps = 2;   // I-steps applied to every subsample candidate
  int keep_best = 5;      // candidates refined to convergence
  int s_max_iterations = 200;
  // M step: 95% Gaussian efficiency.
  double m_tuning = 4.685;
  int max_iterations = 200;
  double tolerance = 1e-8;  // max relative coefficient change
  std::uint64_t seed = 0x5EED5EEDULL;
};

/// M-scale s solving mean(rho(r / s)) = b; zero when more than a fraction
/// 1 - b of the residuals are exactly zero.
double m_scale(std::span<const double> residuals, double c, double b, double initial = 0.0);

/// MM regression: fast-S initial estimate (random elemental subsets,
/// I-step refinement) followed by bisquare IRLS at fixed scale. Standard
/// errors use the asymptotic M-estimator covariance; R^2 is the weighted
/// robust R^2 with the bisquare consistency correction. Throws
/// ConvergenceError with the iteration trace when the M step does not settle.
FitResult robust_mm_fit(const ModelFrame& frame, const MmOptions& options = {});

}  // namespace gdivide::stats
