#include "gdivide/stats/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gdivide/error.hpp"
#include "gdivide/metrics.hpp"
#include "gdivide/rng.hpp"

namespace gdivide::stats {

namespace {

// Residualize y on [1, controls] then regress on [1, cond]; nullopt when
// either step is degenerate for this sample.
std::optional<double> partial_r2_impl(const Eigen::VectorXd& y, const Eigen::VectorXd& cond,
                                      const Eigen::MatrixXd& controls) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd xc(n, controls.cols() + 1);
  xc.col(0).setOnes();
  xc.rightCols(controls.cols()) = controls;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
  qr.setThreshold(1e-10);
  if (qr.rank() < xc.cols() || n <= xc.cols()) return std::nullopt;
  const Eigen::VectorXd resid = y - xc * qr.solve(y);

  const double cm = cond.mean();
  const Eigen::VectorXd dc = cond.array() - cm;
  const double sxx = dc.squaredNorm();
  if (!(sxx > 1e-12 * std::max(1.0, cond.squaredNorm()))) return std::nullopt;
  const Eigen::VectorXd dr = resid.array() - resid.mean();
  const double syy = dr.squaredNorm();
  if (!(syy > 0)) return 0.0;
  const double sxy = dc.dot(dr);
  return (sxy * sxy) / (sxx * syy);
}

struct Columns {
  Eigen::VectorXd cond;
  Eigen::MatrixXd controls;
};

Columns gather(const ModelFrame& frame, const std::string& conditioning, std::span<const std::string> controls) {
  if (std::find(controls.begin(), controls.end(), conditioning) != controls.end()) {
    throw ConfigError("conditioning term '" + conditioning + "' is also a control");
  }
  Columns c;
  c.cond = frame.term(conditioning).values;
  c.controls.resize(frame.n(), static_cast<Eigen::Index>(controls.size()));
  for (std::size_t j = 0; j < controls.size(); ++j) {
    c.controls.col(static_cast<Eigen::Index>(j)) = frame.term(controls[j]).values;
  }
  return c;
}

}  // namespace

double partial_r2(const ModelFrame& frame, const std::string& conditioning, std::span<const std::string> controls) {
  const auto cols = gather(frame, conditioning, controls);
  auto r2 = partial_r2_impl(frame.outcome(), cols.cond, cols.controls);
  if (!r2) throw SingularityError("partial R^2: controls rank deficient or conditioning term constant");
  return *r2;
}

PartialR2Distribution bootstrap_partial_r2(const ModelFrame& frame, const std::string& conditioning,
                                           std::span<const std::string> controls, const BootstrapOptions& options) {
  if (options.resamples < 1000) throw ConfigError("bootstrap needs at least 1000 resamples");
  const auto cols = gather(frame, conditioning, controls);
  PartialR2Distribution out;
  out.resamples = options.resamples;
  out.point = partial_r2(frame, conditioning, controls);

  const Eigen::Index n = frame.n();
  const Eigen::VectorXd& y = frame.outcome();
  std::vector<double> values(options.resamples, std::nan(""));
  parallel_for(options.resamples, options.threads, [&](std::size_t b) {
    Rng rng(derive_seed(options.seed, b));
    Eigen::VectorXd yb(n), cb(n);
    Eigen::MatrixXd xb(n, cols.controls.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
      yb[i] = y[k];
      cb[i] = cols.cond[k];
      xb.row(i) = cols.controls.row(k);
    }
    if (auto r2 = partial_r2_impl(yb, cb, xb)) values[b] = *r2;
  });
  for (double v : values) {
    if (std::isnan(v)) {
      ++out.skipped;
    } else {
      out.values.push_back(v);
    }
  }
  if (static_cast<double>(out.skipped) > options.max_skip_fraction * static_cast<double>(options.resamples)) {
    throw DegenerateError("partial R^2 bootstrap skipped " + std::to_string(out.skipped) + " of " +
                          std::to_string(options.resamples) + " resamples (rank-deficient controls)");
  }
  out.median = median_of(out.values);
  return out;
}

}  // namespace gdivide::stats
