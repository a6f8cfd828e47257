#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdivide/stats/correlation.hpp"

namespace gdivide::stats {

enum class Estimator { kOls, kHc, kRobustMm, kBayes };
enum class HcType { kHc0, kHc1, kHc2, kHc3 };

std::string_view to_string(Estimator e);
std::string_view to_string(HcType t);

struct TermEstimate {
  std::string name;
  double estimate = 0;
  double se = 0;          // posterior SD for kBayes
  double statistic = 0;   // t (or z) value; NaN for kBayes
  double ci_low = 0;      // 95% confidence or credible interval
  double ci_high = 0;
  double p = 1;
};

struct ShapiroWilk {
  double w = 0;
  double p = 1;
};

struct ResidualCheck {
  std::string against;
  Correlation correlation;
};

struct Diagnostics {
  std::optional<ShapiroWilk> shapiro;
  bool degenerate_residuals = false;  // all residuals (numerically) zero
  std::vector<ResidualCheck> checks;
};

struct FitResult {
  Estimator estimator = Estimator::kOls;
  std::string detail;  // e.g. "HC3", "MM bisquare 1.548/4.685", "Gibbs 10000+1000"
  std::vector<TermEstimate> terms;  // design order, intercept first
  double r2 = 0;
  double sigma = 0;  // residual scale
  std::size_t n = 0;
  long df_residual = 0;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd covariance;  // sampling or posterior covariance of coefficients
  Eigen::MatrixXd draws;       // posterior draws (kBayes only), one row per draw
  int iterations = 0;
  std::optional<Diagnostics> diagnostics;
  std::vector<std::string> notes;

  Eigen::VectorXd coefficients() const;
  const TermEstimate& term(std::string_view name) const;  // throws ConfigError
  std::optional<std::size_t> term_index(std::string_view name) const;
};

struct Interval {
  double estimate = 0;
  double se = 0;
  double low = 0;
  double high = 0;
};

/// weights . coefficients with an interval: posterior percentiles for
/// Bayesian fits, t-based otherwise.
Interval linear_combination(const FitResult& fit, const Eigen::VectorXd& weights, double level = 0.95);

/// Two-sided p-value for H0: coefficient == value (t-based, or the posterior
/// tail probability for Bayesian fits).
double test_coefficient(const FitResult& fit, std::string_view term, double value);

/// JSON object `{estimator, n, r2, terms:[{name, estimate, se_or_ci, p}], diagnostics}`.
/// Bayesian fits carry `se_or_ci` as a [low, high] pair, others as the SE.
std::string to_json(const FitResult& fit);

}  // namespace gdivide::stats
