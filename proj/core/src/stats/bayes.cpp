#include "gdivide/stats/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gdivide/error.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/stats/linear.hpp"

namespace gdivide::stats {

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

FitResult bayes_fit(const ModelFrame& frame, const BayesOptions& opt) {
  if (opt.iterations < 2000) throw ConfigError("bayes_fit needs at least 2000 iterations");
  if (opt.burn_in < 0) throw ConfigError("negative burn-in");
  // Same preconditions and singularity reporting as OLS; also the chain start.
  const FitResult ols = ols_fit(frame);

  const Eigen::MatrixXd x = frame.design();
  const Eigen::VectorXd& y = frame.outcome();
  const Eigen::Index n = x.rows(), p = x.cols();
  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::VectorXd xty = x.transpose() * y;
  const Eigen::MatrixXd prior_precision = Eigen::MatrixXd::Identity(p, p) / opt.prior_variance;

  Rng rng(opt.seed);
  Eigen::VectorXd beta = ols.coefficients();
  Eigen::MatrixXd draws(opt.iterations, p);
  std::vector<double> sigmas;
  sigmas.reserve(static_cast<std::size_t>(opt.iterations));
  Eigen::VectorXd z(p);

  const double shape = opt.noise_shape + 0.5 * static_cast<double>(n);
  const int total = opt.burn_in + opt.iterations;
  for (int it = 0; it < total; ++it) {
    const double rss = (y - x * beta).squaredNorm();
    const double rate = opt.noise_rate + 0.5 * rss;
    const double sigma2 = rate / rng.gamma(shape);
    if (!std::isfinite(sigma2) || !(sigma2 > 0)) {
      throw SamplerError("non-finite noise variance at iteration " + std::to_string(it));
    }
    const Eigen::MatrixXd precision = xtx / sigma2 + prior_precision;
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) {
      throw SamplerError("posterior precision not positive definite at iteration " + std::to_string(it));
    }
    const Eigen::VectorXd mean = llt.solve(xty / sigma2);
    for (Eigen::Index j = 0; j < p; ++j) z[j] = rng.normal();
    // precision = L L^T, so L^-T z has covariance precision^-1.
    beta = mean + llt.matrixU().solve(z);
    if (!beta.allFinite()) throw SamplerError("non-finite coefficient draw at iteration " + std::to_string(it));
    if (it >= opt.burn_in) {
      draws.row(it - opt.burn_in) = beta.transpose();
      sigmas.push_back(std::sqrt(sigma2));
    }
  }

  FitResult fit;
  fit.estimator = Estimator::kBayes;
  fit.detail = "Gibbs " + std::to_string(opt.iterations) + " draws after " + std::to_string(opt.burn_in) +
               " burn-in";
  fit.n = static_cast<std::size_t>(n);
  fit.df_residual = static_cast<long>(n - p);
  fit.iterations = total;

  const auto names = frame.design_names();
  Eigen::VectorXd median(p);
  std::vector<double> column(static_cast<std::size_t>(opt.iterations));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (int i = 0; i < opt.iterations; ++i) column[static_cast<std::size_t>(i)] = draws(i, j);
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    TermEstimate t;
    t.name = names[static_cast<std::size_t>(j)];
    t.estimate = quantile_sorted(sorted, 0.5);
    t.ci_low = quantile_sorted(sorted, 0.025);
    t.ci_high = quantile_sorted(sorted, 0.975);
    const double above = static_cast<double>(std::count_if(column.begin(), column.end(), [](double v) { return v > 0; }));
    const double below = static_cast<double>(std::count_if(column.begin(), column.end(), [](double v) { return v < 0; }));
    t.p = std::min(1.0, 2.0 * std::min(above, below) / static_cast<double>(opt.iterations));
    t.statistic = std::numeric_limits<double>::quiet_NaN();
    median[j] = t.estimate;
    fit.terms.push_back(std::move(t));
  }
  const Eigen::RowVectorXd mean_draw = draws.colwise().mean();
  const Eigen::MatrixXd centered = draws.rowwise() - mean_draw;
  fit.covariance = centered.transpose() * centered / static_cast<double>(opt.iterations - 1);
  for (Eigen::Index j = 0; j < p; ++j) fit.terms[static_cast<std::size_t>(j)].se = std::sqrt(fit.covariance(j, j));

  fit.fitted = x * median;
  fit.residuals = y - fit.fitted;
  fit.r2 = r_squared(y, fit.residuals, frame.has_intercept());
  std::sort(sigmas.begin(), sigmas.end());
  fit.sigma = quantile_sorted(sigmas, 0.5);
  if (opt.keep_draws) fit.draws = std::move(draws);
  return fit;
}

}  // namespace gdivide::stats
