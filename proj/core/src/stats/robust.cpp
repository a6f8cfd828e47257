#include "gdivide/stats/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "gdivide/error.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/stats/linear.hpp"
#include "stats/internal.hpp"

namespace gdivide::stats {

double Bisquare::rho(double u) const {
  const double t = u / c;
  if (std::fabs(t) >= 1.0) return 1.0;
  const double a = 1.0 - t * t;
  return 1.0 - a * a * a;
}

double Bisquare::psi(double u) const {
  const double t = u / c;
  if (std::fabs(t) >= 1.0) return 0.0;
  const double a = 1.0 - t * t;
  return u * a * a;
}

double Bisquare::psi_prime(double u) const {
  const double t = u / c;
  if (std::fabs(t) >= 1.0) return 0.0;
  const double t2 = t * t;
  return (1.0 - t2) * (1.0 - 5.0 * t2);
}

double Bisquare::weight(double u) const {
  const double t = u / c;
  if (std::fabs(t) >= 1.0) return 0.0;
  const double a = 1.0 - t * t;
  return a * a;
}

double m_scale(std::span<const double> residuals, double c, double b, double initial) {
  const Bisquare rho{c};
  const std::size_t n = residuals.size();
  double s = initial;
  if (!(s > 0)) {
    std::vector<double> abs_r(n);
    for (std::size_t i = 0; i < n; ++i) abs_r[i] = std::fabs(residuals[i]);
    std::nth_element(abs_r.begin(), abs_r.begin() + static_cast<long>(n / 2), abs_r.end());
    s = abs_r[n / 2] / 0.6745;
    if (!(s > 0)) return 0.0;
  }
  for (int it = 0; it < 200; ++it) {
    double mean_rho = 0;
    for (double r : residuals) mean_rho += rho.rho(r / s);
    mean_rho /= static_cast<double>(n);
    const double next = s * std::sqrt(mean_rho / b);
    if (!(next > 0)) return 0.0;
    const bool done = std::fabs(next - s) <= 1e-12 * s;
    s = next;
    if (done) break;
  }
  return s;
}

namespace {

// E[psi'] and E[weight] under the standard normal, by composite Simpson on [-c, c].
std::pair<double, double> normal_expectations(const Bisquare& f) {
  constexpr int kSteps = 4000;
  const double h = 2.0 * f.c / kSteps;
  double e_psi_prime = 0, e_weight = 0;
  for (int i = 0; i <= kSteps; ++i) {
    const double u = -f.c + h * i;
    const double coef = (i == 0 || i == kSteps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double phi = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    e_psi_prime += coef * f.psi_prime(u) * phi;
    e_weight += coef * f.weight(u) * phi;
  }
  return {e_psi_prime * h / 3.0, e_weight * h / 3.0};
}

// Weighted least squares; nullopt when the weighted design loses rank.
std::optional<Eigen::VectorXd> weighted_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.array().sqrt();
  const Eigen::MatrixXd xw = sw.asDiagonal() * x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) return std::nullopt;
  return Eigen::VectorXd(qr.solve(sw.cwiseProduct(y)));
}

struct Candidate {
  Eigen::VectorXd beta;
  double scale = std::numeric_limits<double>::infinity();
};

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// One I-step: reweight by the current residuals, re-solve, update the scale.
bool s_refine_step(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MmOptions& opt, Candidate& cand) {
  const Bisquare f{opt.s_tuning};
  const Eigen::VectorXd r = y - x * cand.beta;
  Eigen::VectorXd w(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) w[i] = f.weight(r[i] / cand.scale);
  auto beta = weighted_solve(x, y, w);
  if (!beta) return false;
  const Eigen::VectorXd r_new = y - x * *beta;
  cand.beta = *beta;
  cand.scale = m_scale(as_span(r_new), opt.s_tuning, opt.s_breakdown, cand.scale);
  return cand.scale > 0;
}

Candidate fast_s(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MmOptions& opt) {
  const Eigen::Index n = x.rows(), p = x.cols();
  Rng rng(opt.seed);
  std::vector<Candidate> best;
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));

  for (int k = 0; k < opt.subsamples; ++k) {
    Candidate cand;
    bool found = false;
    for (int attempt = 0; attempt < 50 && !found; ++attempt) {
      for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
      Eigen::MatrixXd xs(p, p);
      Eigen::VectorXd ys(p);
      for (Eigen::Index j = 0; j < p; ++j) {
        const std::size_t pick = static_cast<std::size_t>(j) + rng.index(static_cast<std::size_t>(n - j));
        std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
        xs.row(j) = x.row(pool[static_cast<std::size_t>(j)]);
        ys[j] = y[pool[static_cast<std::size_t>(j)]];
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
      qr.setThreshold(1e-10);
      if (qr.rank() < p) continue;
      cand.beta = qr.solve(ys);
      found = true;
    }
    if (!found) continue;
    const Eigen::VectorXd r = y - x * cand.beta;
    cand.scale = m_scale(as_span(r), opt.s_tuning, opt.s_breakdown);
    if (!(cand.scale > 0)) {
      // Exact fit of at least half the data: the S-estimate is this subset fit.
      return cand;
    }
    bool ok = true;
    for (int step = 0; step < opt.refine_steps && ok; ++step) ok = s_refine_step(x, y, opt, cand);
    if (!ok) continue;
    best.push_back(std::move(cand));
    std::sort(best.begin(), best.end(), [](const Candidate& a, const Candidate& b) { return a.scale < b.scale; });
    if (best.size() > static_cast<std::size_t>(opt.keep_best)) best.pop_back();
  }
  if (best.empty()) throw ConvergenceError("S-estimate: no non-singular elemental subset found");

  Candidate winner;
  for (auto& cand : best) {
    for (int it = 0; it < opt.s_max_iterations; ++it) {
      const Eigen::VectorXd previous = cand.beta;
      if (!s_refine_step(x, y, opt, cand)) break;
      const double change = (cand.beta - previous).cwiseAbs().maxCoeff();
      if (change <= 1e-10 * std::max(cand.beta.cwiseAbs().maxCoeff(), 1e-12)) break;
    }
    if (cand.scale < winner.scale) winner = cand;
  }
  return winner;
}

}  // namespace

FitResult robust_mm_fit(const ModelFrame& frame, const MmOptions& opt) {
  const Eigen::MatrixXd x = frame.design();
  const Eigen::VectorXd& y = frame.outcome();
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n <= p) {
    throw SampleSizeError("MM regression needs more rows than coefficients (n=" + std::to_string(n) +
                          ", p=" + std::to_string(p) + ")");
  }
  // Surface rank deficiency with the same diagnostics as OLS.
  (void)ols_fit(frame);

  const Candidate s_est = fast_s(x, y, opt);
  if (!(s_est.scale > 0)) {
    throw DegenerateError("S-scale is zero: at least half of the rows are fitted exactly");
  }
  const double scale = s_est.scale;
  const Bisquare m{opt.m_tuning};

  Eigen::VectorXd beta = s_est.beta;
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
  for (; iterations < opt.max_iterations; ++iterations) {
    const Eigen::VectorXd r = y - x * beta;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = m.weight(r[i] / scale);
    auto next = weighted_solve(x, y, w);
    if (!next) throw ConvergenceError("M-step: weighted design became singular at iteration " +
                                      std::to_string(iterations));
    const double change = (*next - beta).cwiseAbs().maxCoeff() / std::max(next->cwiseAbs().maxCoeff(), 1e-12);
    trace.push_back(change);
    beta = *next;
    if (change < opt.tolerance) {
      converged = true;
      ++iterations;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "M-step did not converge in " << opt.max_iterations << " iterations; relative changes:";
    const std::size_t from = trace.size() > 10 ? trace.size() - 10 : 0;
    for (std::size_t i = from; i < trace.size(); ++i) msg << ' ' << trace[i];
    throw ConvergenceError(msg.str());
  }

  FitResult fit;
  fit.estimator = Estimator::kRobustMm;
  {
    std::ostringstream d;
    d << "MM bisquare S(c=" << opt.s_tuning << ") M(c=" << opt.m_tuning << ")";
    fit.detail = d.str();
  }
  fit.n = static_cast<std::size_t>(n);
  fit.df_residual = static_cast<long>(n - p);
  fit.iterations = iterations;
  fit.fitted = x * beta;
  fit.residuals = y - fit.fitted;
  fit.sigma = scale;

  double sum_psi2 = 0, sum_dpsi = 0;
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = fit.residuals[i] / scale;
    sum_psi2 += m.psi(u) * m.psi(u);
    sum_dpsi += m.psi_prime(u);
    w[i] = m.weight(u);
  }
  const double mean_dpsi = sum_dpsi / static_cast<double>(n);
  if (!(mean_dpsi > 0)) throw DegenerateError("MM covariance undefined: mean psi' <= 0");
  const double tau = (sum_psi2 / static_cast<double>(n - p)) / (mean_dpsi * mean_dpsi);
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  detail::fill_terms(fit, frame.design_names(), beta, scale * scale * tau * xtx_inv);

  // Weighted robust R^2 with the consistency correction E[w] / E[psi'].
  const auto [e_dpsi, e_w] = normal_expectations(m);
  const double correction = e_w / e_dpsi;
  const double sw = w.sum();
  const double center = frame.has_intercept() ? w.dot(y) / sw : 0.0;
  const double ymy = (w.array() * (y.array() - center).square()).sum();
  const double rmr = (w.array() * fit.residuals.array().square()).sum();
  if (!(ymy > 0)) throw DegenerateError("outcome is constant; robust R^2 undefined");
  fit.r2 = (ymy - rmr) / (ymy + rmr * (correction - 1.0));
  return fit;
}

}  // namespace gdivide::stats
