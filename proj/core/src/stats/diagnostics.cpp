#include "gdivide/stats/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "gdivide/error.hpp"

namespace gdivide::stats {

std::vector<VifEntry> vif(const ModelFrame& frame) {
  const auto& terms = frame.terms();
  if (terms.size() < 2) throw ConfigError("VIF needs at least two terms");
  const Eigen::Index n = frame.n();
  std::vector<VifEntry> out;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const Eigen::Index others = static_cast<Eigen::Index>(terms.size()) - 1 + (frame.has_intercept() ? 1 : 0);
    Eigen::MatrixXd x(n, others);
    Eigen::Index col = 0;
    if (frame.has_intercept()) x.col(col++).setOnes();
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (k != j) x.col(col++) = terms[k].values;
    }
    const Eigen::VectorXd& target = terms[j].values;
    const Eigen::VectorXd b = x.completeOrthogonalDecomposition().solve(target);
    const double rss = (target - x * b).squaredNorm();
    const double tss = frame.has_intercept() ? (target.array() - target.mean()).matrix().squaredNorm()
                                             : target.squaredNorm();
    VifEntry e;
    e.term = terms[j].name;
    if (!(tss > 0) || rss <= 1e-12 * tss) {
      e.vif = std::numeric_limits<double>::infinity();
      e.collinear = true;
    } else {
      e.vif = tss / rss;  // 1 / (1 - R^2)
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

double poly(const double* c, int order, double x) {
  double result = c[0];
  if (order > 1) {
    double p = x * c[order - 1];
    for (int j = order - 2; j > 0; --j) p = (p + c[j]) * x;
    result += p;
  }
  return result;
}

}  // namespace

ShapiroWilk shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) throw DomainError("Shapiro-Wilk needs 3 <= n <= 5000");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 0) || range < 1e-12 * std::max(std::fabs(x.back()), std::fabs(x.front()))) {
    throw DegenerateError("Shapiro-Wilk on a constant sample");
  }

  // Royston's polynomial approximations.
  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
  static constexpr double g[] = {-2.273, 0.459};

  const std::size_t half = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(half + 1);  // 1-based
  boost::math::normal stdnorm;

  if (n == 3) {
    a[1] = std::sqrt(0.5);
  } else {
    const double an25 = an + 0.25;
    std::vector<double> m(half + 1);
    double summ2 = 0;
    for (std::size_t i = 1; i <= half; ++i) {
      m[i] = boost::math::quantile(stdnorm, (static_cast<double>(i) - 0.375) / an25);
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - m[1] / ssumm2;
    std::size_t i1;
    double fac;
    if (n > 5) {
      i1 = 3;
      const double a2 = -m[2] / ssumm2 + poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[1] * m[1] - 2.0 * m[2] * m[2]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[2] = a2;
    } else {
      i1 = 2;
      fac = std::sqrt((summ2 - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1));
    }
    a[1] = a1;
    for (std::size_t i = i1; i <= half; ++i) a[i] = -m[i] / fac;
  }

  double mean = 0;
  for (double v : x) mean += v;
  mean /= an;
  double ssq = 0;
  for (double v : x) ssq += (v - mean) * (v - mean);
  double num = 0;
  for (std::size_t i = 1; i <= half; ++i) num += a[i] * (x[n - i] - x[i - 1]);
  double w = num * num / ssq;
  if (w > 1.0) w = 1.0;

  ShapiroWilk out;
  out.w = w;
  if (n == 3) {
    constexpr double pi6 = 6.0 / std::numbers::pi;
    constexpr double stqr = std::numbers::pi / 3.0;
    out.p = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    return out;
  }
  const double w1 = std::log1p(-w);
  double y, mu, sigma;
  if (n <= 11) {
    const double gamma = poly(g, 2, an);
    if (w1 >= gamma) {
      out.p = 1e-99;
      return out;
    }
    y = -std::log(gamma - w1);
    mu = poly(c3, 4, an);
    sigma = std::exp(poly(c4, 4, an));
  } else {
    const double xx = std::log(an);
    y = w1;
    mu = poly(c5, 4, xx);
    sigma = std::exp(poly(c6, 3, xx));
  }
  out.p = boost::math::cdf(boost::math::complement(stdnorm, (y - mu) / sigma));
  return out;
}

Diagnostics residual_diagnostics(const ModelFrame& frame, const FitResult& fit,
                                 std::optional<std::pair<std::string, Eigen::VectorXd>> extra) {
  Diagnostics d;
  const Eigen::VectorXd& r = fit.residuals;
  const double scale = std::max(frame.outcome().cwiseAbs().maxCoeff(), 1.0);
  if (r.size() == 0 || r.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
    d.degenerate_residuals = true;
    return d;
  }
  auto span_of = [](const Eigen::VectorXd& v) { return std::span<const double>(v.data(), static_cast<std::size_t>(v.size())); };
  try {
    d.shapiro = shapiro_wilk(span_of(r));
  } catch (const DegenerateError&) {
    d.degenerate_residuals = true;
    return d;
  } catch (const DomainError&) {
    // sample size outside the test's range
  }
  auto check = [&](const std::string& name, const Eigen::VectorXd& v) {
    try {
      d.checks.push_back({name, pearson(span_of(r), span_of(v))});
    } catch (const DegenerateError&) {
    } catch (const DomainError&) {
    }
  };
  for (const auto& t : frame.terms()) check(t.name, t.values);
  check("fitted", fit.fitted);
  if (extra) check(extra->first, extra->second);
  // Heteroskedasticity screen.
  const Eigen::VectorXd root_abs = r.cwiseAbs().cwiseSqrt();
  try {
    d.checks.push_back({"sqrt_abs_residual~fitted", pearson(span_of(root_abs), span_of(fit.fitted))});
  } catch (const Error&) {
  }
  return d;
}

}  // namespace gdivide::stats
