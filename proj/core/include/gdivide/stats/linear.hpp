#pragma once

#include "gdivide/stats/fit.hpp"
#include "gdivide/stats/frame.hpp"

namespace gdivide::stats {

/// Least squares via column-pivoted QR with classical standard errors and
/// two-sided t p-values. Requires n > p; throws SingularityError naming the
/// dependent columns when the design is rank deficient.
FitResult ols_fit(const ModelFrame& frame);

/// Replaces the standard errors of an OLS fit by heteroskedasticity-consistent
/// sandwich estimates. Coefficients are copied unchanged. Throws
/// DegenerateError if any row has leverage 1.
FitResult hc_se(const ModelFrame& frame, const FitResult& ols, HcType type = HcType::kHc3);

/// Diagonal of the hat matrix.
Eigen::VectorXd leverage(const Eigen::MatrixXd& design);

/// Coefficient of determination for residuals of `y`; centered when
/// `intercept` is set.
double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& residuals, bool intercept);

struct FTest {
  double f = 0;
  double p = 1;
  long df1 = 0;
  long df2 = 0;
};

/// F test of one term against the model without it (type-II for a single
/// term): F = (RSS_reduced - RSS_full) / (RSS_full / df_full).
FTest anova_single_term(const ModelFrame& frame, std::string_view term);

// Distribution helpers shared by the estimators.
double student_t_two_sided(double t, double df);
double student_t_quantile(double prob, double df);
double normal_two_sided(double z);

}  // namespace gdivide::stats
