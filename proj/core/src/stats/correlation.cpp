#include "gdivide/stats/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "gdivide/error.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/stats/linear.hpp"
#include "gdivide/stats/rank.hpp"

namespace gdivide::stats {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("correlation of vectors with different lengths");
  if (x.size() < 4) throw DomainError("correlation needs at least 4 pairs");
}

// nullopt when either vector is constant.
std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0) || !(syy > 0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlation_p(double r, std::size_t n) {
  if (std::fabs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  return student_t_two_sided(t, df);
}

}  // namespace

Correlation pearson(std::span<const double> x, std::span<const double> y, double level) {
  check_pair(x, y);
  auto r = pearson_r(x, y);
  if (!r) throw DegenerateError("correlation with a constant vector");
  Correlation out;
  out.n = x.size();
  out.r = *r;
  out.p = correlation_p(*r, out.n);
  if (std::fabs(*r) >= 1.0) {
    out.ci_low = out.ci_high = *r;
  } else {
    boost::math::normal dist;
    const double q = boost::math::quantile(dist, 0.5 + level / 2);
    const double z = std::atanh(*r);
    const double se = 1.0 / std::sqrt(static_cast<double>(out.n) - 3.0);
    out.ci_low = std::tanh(z - q * se);
    out.ci_high = std::tanh(z + q * se);
  }
  return out;
}

Correlation spearman(std::span<const double> x, std::span<const double> y, const SpearmanOptions& options) {
  check_pair(x, y);
  const auto rx = ascending_ranks(x);
  const auto ry = ascending_ranks(y);
  auto rho = pearson_r(rx, ry);
  if (!rho) throw DegenerateError("correlation with a constant vector");
  Correlation out;
  out.n = x.size();
  out.r = *rho;
  out.p = correlation_p(*rho, out.n);

  const std::size_t n = x.size();
  std::vector<double> stats(options.resamples, std::nan(""));
  parallel_for(options.resamples, options.threads, [&](std::size_t b) {
    Rng rng(derive_seed(options.seed, b));
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = rng.index(n);
      xs[i] = x[k];
      ys[i] = y[k];
    }
    const auto bx = ascending_ranks(xs);
    const auto by = ascending_ranks(ys);
    if (auto r = pearson_r(bx, by)) stats[b] = *r;
  });
  std::vector<double> kept;
  kept.reserve(stats.size());
  for (double v : stats) {
    if (!std::isnan(v)) kept.push_back(v);
  }
  if (kept.empty()) {
    out.ci_low = out.ci_high = out.r;
    return out;
  }
  std::sort(kept.begin(), kept.end());
  auto q = [&](double prob) {
    const double pos = prob * static_cast<double>(kept.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, kept.size() - 1);
    return kept[lo] + (pos - static_cast<double>(lo)) * (kept[hi] - kept[lo]);
  };
  const double alpha = 1.0 - options.level;
  out.ci_low = q(alpha / 2);
  out.ci_high = q(1 - alpha / 2);
  return out;
}

double weighted_proportion(std::span<const double> responses, std::span<const double> weights) {
  if (responses.size() != weights.size()) throw DomainError("responses and weights differ in length");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (weights[i] < 0 || !std::isfinite(weights[i])) throw DomainError("negative or non-finite weight");
    if (responses[i] != 0.0 && responses[i] != 1.0) throw DomainError("responses must be 0 or 1");
    num += weights[i] * responses[i];
    den += weights[i];
  }
  if (!(den > 0)) throw DegenerateError("weights sum to zero");
  return num / den;
}

}  // namespace gdivide::stats
