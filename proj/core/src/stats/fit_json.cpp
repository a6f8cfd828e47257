#include <cmath>

#include <json.hpp>

#include "gdivide/stats/fit.hpp"

namespace gdivide::stats {

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

nlohmann::ordered_json correlation_json(const Correlation& c) {
  return {{"r", number(c.r)}, {"ci", {number(c.ci_low), number(c.ci_high)}}, {"p", number(c.p)}, {"n", c.n}};
}

}  // namespace

std::string to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["estimator"] = std::string(to_string(fit.estimator));
  j["detail"] = fit.detail;
  j["n"] = fit.n;
  j["r2"] = number(fit.r2);
  j["sigma"] = number(fit.sigma);
  auto& terms = j["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : fit.terms) {
    nlohmann::ordered_json term;
    term["name"] = t.name;
    term["estimate"] = number(t.estimate);
    if (fit.estimator == Estimator::kBayes) {
      term["se_or_ci"] = {number(t.ci_low), number(t.ci_high)};
    } else {
      term["se_or_ci"] = number(t.se);
    }
    term["p"] = number(t.p);
    terms.push_back(std::move(term));
  }
  nlohmann::ordered_json diag = nullptr;
  if (fit.diagnostics) {
    const auto& d = *fit.diagnostics;
    diag = nlohmann::ordered_json::object();
    diag["degenerate_residuals"] = d.degenerate_residuals;
    if (d.shapiro) {
      diag["shapiro_wilk"] = {{"w", number(d.shapiro->w)}, {"p", number(d.shapiro->p)}};
    } else {
      diag["shapiro_wilk"] = nullptr;
    }
    auto& checks = diag["residual_correlations"] = nlohmann::ordered_json::array();
    for (const auto& c : d.checks) {
      auto entry = correlation_json(c.correlation);
      entry["against"] = c.against;
      checks.push_back(std::move(entry));
    }
  }
  j["diagnostics"] = std::move(diag);
  if (!fit.notes.empty()) j["notes"] = fit.notes;
  return j.dump();
}

}  // namespace gdivide::stats
