#pragma once

#include <string>
#include <vector>

#include "gdivide/stats/fit.hpp"

namespace gdivide::stats::detail {

// Fills fit.terms with t-based SEs, p-values and 95% intervals from `cov`,
// using fit.df_residual degrees of freedom.
void fill_terms(FitResult& fit, const std::vector<std::string>& names, const Eigen::VectorXd& beta,
                const Eigen::MatrixXd& cov);

}  // namespace gdivide::stats::detail
