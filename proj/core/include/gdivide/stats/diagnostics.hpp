#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdivide/stats/fit.hpp"
#include "gdivide/stats/frame.hpp"

namespace gdivide::stats {

struct VifEntry {
  std::string term;
  double vif = 1;
  bool collinear = false;  // perfectly explained by the other terms; vif is +inf
};

/// 1 / (1 - R^2_j), regressing each term on all the others. Needs at least
/// two terms.
std::vector<VifEntry> vif(const ModelFrame& frame);

/// Shapiro-Wilk W with Royston's (1995) p-value approximation.
/// 3 <= n <= 5000; throws DegenerateError for a constant sample.
ShapiroWilk shapiro_wilk(std::span<const double> sample);

/// Residual battery: Shapiro-Wilk, Pearson of residuals against every term
/// and the fitted values, sqrt|residual| against fitted values, and
/// optionally against an extra named column (e.g. Facebook penetration).
Diagnostics residual_diagnostics(const ModelFrame& frame, const FitResult& fit,
                                 std::optional<std::pair<std::string, Eigen::VectorXd>> extra = std::nullopt);

}  // namespace gdivide::stats
