#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gdivide/csv.hpp"
#include "gdivide/models.hpp"

namespace gdivide {

namespace {

using json = nlohmann::ordered_json;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

json report_json(const ModelReport& r) {
  json j;
  j["model"] = std::string(to_string(r.model));
  j["variant"] = std::string(to_string(r.variant));
  j["stratum"] = r.stratum;
  j["n"] = r.frame.n();
  j["outcome"] = r.frame.outcome_name();
  auto& terms = j["terms"] = json::array();
  for (const auto& t : r.frame.terms()) {
    terms.push_back({{"name", t.name}, {"kind", std::string(stats::to_string(t.kind))}});
  }
  j["rows"] = r.frame.labels();
  j["excluded"] = r.excluded;
  auto& fits = j["fits"] = json::array();
  for (const auto& f : r.fits) fits.push_back(json::parse(stats::to_json(f)));
  auto& vif = j["vif"] = json::array();
  for (const auto& v : r.vif) {
    vif.push_back({{"term", v.term}, {"vif", number(v.vif)}, {"collinear", v.collinear}});
  }
  if (r.anova) {
    j["anova"] = {{"term", r.conditioning_term},
                  {"f", number(r.anova->f)},
                  {"p", number(r.anova->p)},
                  {"df1", r.anova->df1},
                  {"df2", r.anova->df2}};
  }
  if (r.partial_r2) {
    const auto& d = *r.partial_r2;
    j["partial_r2"] = {{"conditioning", r.conditioning_term},
                       {"point", number(d.point)},
                       {"median", number(d.median)},
                       {"ci", {number(percentile(d.values, 0.025)), number(percentile(d.values, 0.975))}},
                       {"resamples", d.resamples},
                       {"skipped", d.skipped}};
  }
  if (!r.network.empty()) {
    auto& net = j["network"] = json::array();
    for (std::size_t i = 0; i < r.network.size(); ++i) {
      const auto& s = r.network[i];
      net.push_back({{"estimator", std::string(stats::to_string(r.fits[i].estimator))},
                     {"female_exponent",
                      {{"estimate", number(s.female_exponent.estimate)},
                       {"se", number(s.female_exponent.se)},
                       {"ci", {number(s.female_exponent.low), number(s.female_exponent.high)}}}},
                     {"r2_log", number(s.r2_log)},
                     {"r2_linear", number(s.r2_linear)},
                     {"alpha_vs_one_p", number(s.alpha_vs_one_p)},
                     {"excluded_rows", s.excluded_rows}});
    }
  }
  return j;
}

}  // namespace

std::string to_json(const ModelReport& report) { return report_json(report).dump(2) + "\n"; }

std::string to_csv(const ModelReport& report) {
  std::ostringstream out;
  out << "estimator,term,estimate,se,ci_low,ci_high,p\n";
  for (const auto& f : report.fits) {
    for (const auto& t : f.terms) {
      out << stats::to_string(f.estimator) << ',' << t.name << ',' << csv::fixed(t.estimate) << ','
          << csv::fixed(t.se) << ',' << csv::fixed(t.ci_low) << ',' << csv::fixed(t.ci_high) << ','
          << csv::fixed(t.p) << '\n';
    }
  }
  return out.str();
}

std::string to_json(const StratifiedReport& report) {
  json j;
  j["by"] = report.kind == StrataKind::kMonth ? "month" : "age";
  j["r2_range"] = {number(report.r2_min), number(report.r2_max)};
  j["skipped"] = report.skipped;
  auto& stab = j["stability"] = json::array();
  for (const auto& s : report.stability) {
    stab.push_back({{"estimator", std::string(stats::to_string(s.estimator))},
                    {"term", s.term},
                    {"min", number(s.min_estimate)},
                    {"max", number(s.max_estimate)},
                    {"significant", s.significant},
                    {"strata", s.strata}});
  }
  auto& reps = j["strata"] = json::array();
  for (const auto& r : report.reports) reps.push_back(report_json(r));
  return j.dump(2) + "\n";
}

std::string stability_csv(const StratifiedReport& report) {
  std::ostringstream out;
  out << "estimator,term,min_estimate,max_estimate,significant,strata\n";
  for (const auto& s : report.stability) {
    out << stats::to_string(s.estimator) << ',' << s.term << ',' << csv::fixed(s.min_estimate) << ','
        << csv::fixed(s.max_estimate) << ',' << s.significant << ',' << s.strata << '\n';
  }
  return out.str();
}

}  // namespace gdivide
