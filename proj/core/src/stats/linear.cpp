#include "gdivide/stats/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "gdivide/error.hpp"
#include "stats/internal.hpp"

namespace gdivide::stats {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::kOls: return "ols";
    case Estimator::kHc: return "hc";
    case Estimator::kRobustMm: return "robust_mm";
    case Estimator::kBayes: return "bayes";
  }
  return "?";
}

std::string_view to_string(HcType t) {
  switch (t) {
    case HcType::kHc0: return "HC0";
    case HcType::kHc1: return "HC1";
    case HcType::kHc2: return "HC2";
    case HcType::kHc3: return "HC3";
  }
  return "?";
}

double student_t_two_sided(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double student_t_quantile(double prob, double df) {
  boost::math::students_t dist(df);
  return boost::math::quantile(dist, prob);
}

double normal_two_sided(double z) {
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(z)) return 0.0;
  boost::math::normal dist;
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(z)));
}

Eigen::VectorXd FitResult::coefficients() const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) b[static_cast<Eigen::Index>(i)] = terms[i].estimate;
  return b;
}

std::optional<std::size_t> FitResult::term_index(std::string_view name) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].name == name) return i;
  }
  return std::nullopt;
}

const TermEstimate& FitResult::term(std::string_view name) const {
  auto i = term_index(name);
  if (!i) throw ConfigError("fit has no term '" + std::string(name) + "'");
  return terms[*i];
}

double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& residuals, bool intercept) {
  const double rss = residuals.squaredNorm();
  const double tss = intercept ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
  if (!(tss > 0)) throw DegenerateError("outcome is constant; R^2 undefined");
  return 1.0 - rss / tss;
}

Eigen::VectorXd leverage(const Eigen::MatrixXd& design) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(design.rows(), design.cols());
  return q.rowwise().squaredNorm();
}

namespace {

struct LeastSquares {
  Eigen::VectorXd beta;
  Eigen::MatrixXd xtx_inv;
};

LeastSquares solve_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const std::vector<std::string>& names) {
  const Eigen::Index p = x.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  // Relative threshold on the pivots; the Eigen default is too permissive for
  // designs that are exactly collinear up to rounding.
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::string dependent;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < p; ++k) {
      const auto col = static_cast<std::size_t>(perm[k]);
      dependent += (dependent.empty() ? "" : ", ") + names[col];
    }
    throw SingularityError("design is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                           std::to_string(p) + "); linearly dependent: " + dependent);
  }
  LeastSquares out;
  out.beta = qr.solve(y);
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd perm_inv = r_inv * r_inv.transpose();
  const auto perm = qr.colsPermutation();
  out.xtx_inv = perm * perm_inv * perm.transpose();
  return out;
}

}  // namespace

namespace detail {

void fill_terms(FitResult& fit, const std::vector<std::string>& names, const Eigen::VectorXd& beta,
                const Eigen::MatrixXd& cov) {
  const double df = static_cast<double>(fit.df_residual);
  const double q = student_t_quantile(0.975, df);
  fit.terms.clear();
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    TermEstimate t;
    t.name = names[static_cast<std::size_t>(j)];
    t.estimate = beta[j];
    t.se = std::sqrt(std::max(cov(j, j), 0.0));
    t.statistic = t.se > 0 ? t.estimate / t.se : std::copysign(std::numeric_limits<double>::infinity(), t.estimate);
    t.p = student_t_two_sided(t.statistic, df);
    t.ci_low = t.estimate - q * t.se;
    t.ci_high = t.estimate + q * t.se;
    fit.terms.push_back(std::move(t));
  }
  fit.covariance = cov;
}

}  // namespace detail

FitResult ols_fit(const ModelFrame& frame) {
  const Eigen::MatrixXd x = frame.design();
  const Eigen::VectorXd& y = frame.outcome();
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n <= p) {
    throw SampleSizeError("OLS needs more rows than coefficients (n=" + std::to_string(n) +
                          ", p=" + std::to_string(p) + ")");
  }
  const auto names = frame.design_names();
  const auto ls = solve_least_squares(x, y, names);

  FitResult fit;
  fit.estimator = Estimator::kOls;
  fit.detail = "least squares";
  fit.n = static_cast<std::size_t>(n);
  fit.df_residual = static_cast<long>(n - p);
  fit.fitted = x * ls.beta;
  fit.residuals = y - fit.fitted;
  fit.r2 = r_squared(y, fit.residuals, frame.has_intercept());
  const double sigma2 = fit.residuals.squaredNorm() / static_cast<double>(fit.df_residual);
  fit.sigma = std::sqrt(sigma2);
  detail::fill_terms(fit, names, ls.beta, sigma2 * ls.xtx_inv);
  return fit;
}

FitResult hc_se(const ModelFrame& frame, const FitResult& ols, HcType type) {
  if (ols.estimator != Estimator::kOls) throw ConfigError("hc_se needs an OLS fit");
  const Eigen::MatrixXd x = frame.design();
  if (static_cast<std::size_t>(x.rows()) != ols.n || x.cols() != static_cast<Eigen::Index>(ols.terms.size())) {
    throw ConfigError("hc_se: frame does not match the OLS fit");
  }
  const Eigen::Index n = x.rows(), p = x.cols();
  const Eigen::VectorXd h = leverage(x);
  Eigen::VectorXd omega(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (h[i] >= 1.0 - 1e-10) {
      const auto& labels = frame.labels();
      const std::string row = labels.empty() ? std::to_string(i) : labels[static_cast<std::size_t>(i)];
      throw DegenerateError("leverage 1 at row " + row + "; HC standard errors undefined");
    }
    const double e2 = ols.residuals[i] * ols.residuals[i];
    switch (type) {
      case HcType::kHc0: omega[i] = e2; break;
      case HcType::kHc1: omega[i] = e2 * static_cast<double>(n) / static_cast<double>(n - p); break;
      case HcType::kHc2: omega[i] = e2 / (1.0 - h[i]); break;
      case HcType::kHc3: omega[i] = e2 / ((1.0 - h[i]) * (1.0 - h[i])); break;
    }
  }
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd meat = x.transpose() * omega.asDiagonal() * x;
  const Eigen::MatrixXd cov = xtx_inv * meat * xtx_inv;

  FitResult fit = ols;
  fit.estimator = Estimator::kHc;
  fit.detail = std::string(to_string(type));
  fit.diagnostics.reset();
  // Keep the exact OLS coefficients; only the uncertainty changes.
  const Eigen::VectorXd beta = ols.coefficients();
  detail::fill_terms(fit, frame.design_names(), beta, cov);
  return fit;
}

FTest anova_single_term(const ModelFrame& frame, std::string_view term) {
  const auto full = ols_fit(frame);
  std::vector<std::string> others;
  for (const auto& t : frame.terms()) {
    if (t.name != term) others.push_back(t.name);
  }
  if (others.size() == frame.terms().size()) throw ConfigError("no term named '" + std::string(term) + "'");
  const auto reduced_frame = frame.select_terms(others);
  const Eigen::MatrixXd xr = reduced_frame.design();
  double rss_reduced;
  if (xr.cols() == 0) {
    rss_reduced = frame.outcome().squaredNorm();
  } else {
    const Eigen::VectorXd b = xr.colPivHouseholderQr().solve(frame.outcome());
    rss_reduced = (frame.outcome() - xr * b).squaredNorm();
  }
  const double rss_full = full.residuals.squaredNorm();
  FTest out;
  out.df1 = 1;
  out.df2 = full.df_residual;
  out.f = (rss_reduced - rss_full) / (rss_full / static_cast<double>(out.df2));
  boost::math::fisher_f dist(static_cast<double>(out.df1), static_cast<double>(out.df2));
  out.p = out.f > 0 ? boost::math::cdf(boost::math::complement(dist, out.f)) : 1.0;
  return out;
}

Interval linear_combination(const FitResult& fit, const Eigen::VectorXd& weights, double level) {
  if (weights.size() != static_cast<Eigen::Index>(fit.terms.size())) {
    throw ConfigError("linear_combination: weight length does not match coefficients");
  }
  Interval out;
  const double alpha = 1.0 - level;
  if (fit.estimator == Estimator::kBayes && fit.draws.rows() > 0) {
    std::vector<double> values(static_cast<std::size_t>(fit.draws.rows()));
    for (Eigen::Index i = 0; i < fit.draws.rows(); ++i) values[static_cast<std::size_t>(i)] = fit.draws.row(i).dot(weights);
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(values.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, values.size() - 1);
      return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    out.estimate = quantile(0.5);
    out.low = quantile(alpha / 2);
    out.high = quantile(1 - alpha / 2);
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.se = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return out;
  }
  out.estimate = weights.dot(fit.coefficients());
  out.se = std::sqrt(std::max(0.0, weights.dot(fit.covariance * weights)));
  const double q = student_t_quantile(1 - alpha / 2, static_cast<double>(fit.df_residual));
  out.low = out.estimate - q * out.se;
  out.high = out.estimate + q * out.se;
  return out;
}

double test_coefficient(const FitResult& fit, std::string_view term, double value) {
  const auto idx = fit.term_index(term);
  if (!idx) throw ConfigError("fit has no term '" + std::string(term) + "'");
  if (fit.estimator == Estimator::kBayes && fit.draws.rows() > 0) {
    const auto col = fit.draws.col(static_cast<Eigen::Index>(*idx));
    const double above = static_cast<double>((col.array() > value).count()) / static_cast<double>(col.size());
    const double below = static_cast<double>((col.array() < value).count()) / static_cast<double>(col.size());
    return std::min(1.0, 2.0 * std::min(above, below));
  }
  const auto& t = fit.terms[*idx];
  return student_t_two_sided((t.estimate - value) / t.se, static_cast<double>(fit.df_residual));
}

}  // namespace gdivide::stats
