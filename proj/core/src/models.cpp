#include "gdivide/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gdivide/error.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/stats/rank.hpp"

namespace gdivide {

using stats::Estimator;
using stats::FitResult;
using stats::ModelFrame;
using stats::TermKind;

std::string_view to_string(ModelId m) {
  switch (m) {
    case ModelId::kFgd: return "fgd";
    case ModelId::kNetwork: return "network";
    case ModelId::kDeltaEco: return "delta_eco";
    case ModelId::kDeltaFgd: return "delta_fgd";
    case ModelId::kDeltaEdu: return "delta_edu";
  }
  return "?";
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kDefault: return "default";
    case Variant::kInternet: return "internet";
    case Variant::kGdp: return "gdp";
    case Variant::kFull: return "full";
    case Variant::kEquality: return "equality";
    case Variant::kHofstede: return "hofstede";
  }
  return "?";
}

std::optional<ModelId> parse_model(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), '-', '_');
  for (auto m : {ModelId::kFgd, ModelId::kNetwork, ModelId::kDeltaEco, ModelId::kDeltaFgd, ModelId::kDeltaEdu}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view text) {
  for (auto v : {Variant::kDefault, Variant::kInternet, Variant::kGdp, Variant::kFull, Variant::kEquality,
                 Variant::kHofstede}) {
    if (text == to_string(v)) return v;
  }
  if (text == "base") return Variant::kGdp;
  return std::nullopt;
}

std::optional<Estimator> parse_estimator(std::string_view text) {
  if (text == "ols") return Estimator::kOls;
  if (text == "hc") return Estimator::kHc;
  if (text == "robust" || text == "mm") return Estimator::kRobustMm;
  if (text == "bayes") return Estimator::kBayes;
  return std::nullopt;
}

namespace {

bool is_delta(ModelId m) {
  return m == ModelId::kDeltaEco || m == ModelId::kDeltaFgd || m == ModelId::kDeltaEdu;
}

ConfigError bad_variant(ModelId model, Variant variant) {
  return ConfigError("variant '" + std::string(to_string(variant)) + "' is not defined for model '" +
                     std::string(to_string(model)) + "'");
}

}  // namespace

Variant resolve_variant(ModelId model, Variant variant) {
  switch (model) {
    case ModelId::kFgd:
      if (variant == Variant::kDefault) return Variant::kInternet;
      if (variant == Variant::kInternet || variant == Variant::kGdp) return variant;
      throw bad_variant(model, variant);
    case ModelId::kNetwork:
      if (variant == Variant::kDefault) return variant;
      throw bad_variant(model, variant);
    default:
      if (variant == Variant::kDefault) return Variant::kGdp;
      return variant;
  }
}

std::string requirement_name(ModelId model, Variant variant) {
  variant = resolve_variant(model, variant);
  if (model == ModelId::kFgd) return variant == Variant::kGdp ? "fgd_gdp" : "fgd";
  if (model == ModelId::kNetwork) return "network";
  std::string name(to_string(model));
  switch (variant) {
    case Variant::kGdp: return name;
    case Variant::kFull: return name + "_full";
    case Variant::kInternet: return name + "_internet";
    case Variant::kEquality: return name + "_equality";
    case Variant::kHofstede: return name + "_hofstede";
    default: throw bad_variant(model, variant);
  }
}

const FitResult& ModelReport::fit(Estimator e) const {
  for (const auto& f : fits) {
    if (f.estimator == e) return f;
  }
  throw ConfigError("report has no '" + std::string(stats::to_string(e)) + "' fit");
}

namespace {

using F = IndicatorField;

std::vector<double> ranked(const std::vector<double>& raw, bool rescale) {
  auto r = stats::rank_transform(raw);
  return rescale ? stats::rescale_unit(r) : r;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Per-country inputs gathered before ranking.
struct Row {
  std::string country;
  const CountryAggregate* base = nullptr;
  double fgd = 0;
  double fgd_next = 0;
};

double indicator(const IndicatorTable& t, const std::string& c, int year, F f) {
  return *t.value(c, year, f);
}

/// Rows of the panel with a defined FGD (and, when `next` is given, also
/// present with a defined FGD there) that meet the indicator requirement.
std::vector<Row> complete_rows(const CountryGenderPanel& panel, const CountryGenderPanel* next,
                               const IndicatorTable& indicators, const ModelRequirement& req, int base_year,
                               std::vector<std::string>& excluded) {
  std::vector<Row> rows;
  for (const auto& agg : panel.countries) {
    Row row{agg.country, &agg};
    try {
      row.fgd = fgd(agg);
    } catch (const UndefinedMetricError&) {
      excluded.push_back(agg.country + ": fgd undefined");
      continue;
    }
    if (next) {
      const auto* later = next->find(agg.country);
      if (!later) {
        excluded.push_back(agg.country + ": absent from " + next->month + " panel");
        continue;
      }
      try {
        row.fgd_next = fgd(*later);
      } catch (const UndefinedMetricError&) {
        excluded.push_back(agg.country + ": fgd undefined in " + next->month);
        continue;
      }
    }
    if (!meets_requirement(indicators, agg.country, req, base_year)) {
      excluded.push_back(agg.country + ": missing indicators");
      continue;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void require_rows(std::size_t n, std::size_t min, std::string_view model) {
  if (n < min) {
    throw SampleSizeError(std::string(model) + " needs at least " + std::to_string(min) +
                          " listwise-complete countries, got " + std::to_string(n));
  }
}

template <typename Fn>
std::vector<double> column(const std::vector<Row>& rows, Fn fn) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(fn(r));
  return out;
}

std::vector<std::string> countries_of(const std::vector<Row>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.country);
  return out;
}

}  // namespace

FrameBuild build_fgd_frame(const CountryGenderPanel& panel, const IndicatorTable& indicators, Variant variant,
                           const FitSettings& settings) {
  variant = resolve_variant(ModelId::kFgd, variant);
  const auto& req = model_requirement(requirement_name(ModelId::kFgd, variant));
  FrameBuild out;
  const int year = settings.base_year;
  auto rows = complete_rows(panel, nullptr, indicators, req, year, out.excluded);
  require_rows(rows.size(), settings.min_countries, "fgd model");

  auto field = [&](F f) { return column(rows, [&](const Row& r) { return indicator(indicators, r.country, year, f); }); };
  auto fgd_values = column(rows, [](const Row& r) { return r.fgd; });
  ModelFrame frame("fgd_rank", to_vector(ranked(fgd_values, false)), countries_of(rows));
  frame.add(terms::kEduRank, ranked(field(F::kEdu), false), TermKind::kRanked);
  frame.add(terms::kHealthRank, ranked(field(F::kHealth), false), TermKind::kRanked);
  frame.add(terms::kEcoRank, ranked(field(F::kEco), false), TermKind::kRanked);
  frame.add(terms::kPolRank, ranked(field(F::kPol), false), TermKind::kRanked);
  if (variant == Variant::kGdp) {
    frame.add(terms::kGdpRank, ranked(field(F::kGdpPpp), false), TermKind::kRanked);
  } else {
    frame.add(terms::kInternetRank, ranked(field(F::kInternetPenetration), false), TermKind::kRanked);
  }
  frame.add(terms::kIneqRank, ranked(field(F::kQuintileRatio), false), TermKind::kRanked);
  frame.add(terms::kPopRank, ranked(field(F::kPopulation), false), TermKind::kRanked);
  auto pen = column(rows, [](const Row& r) { return penetration(*r.base); });
  frame.add(terms::kFbPenetrationRank, ranked(pen, false), TermKind::kRanked);
  frame.add(terms::kMeanAgeRank, ranked(column(rows, [](const Row& r) { return r.base->mean_active_age; }), false),
            TermKind::kRanked);
  out.frame = std::move(frame);
  out.penetration = to_vector(pen);
  return out;
}

FrameBuild build_network_frame(const CountryGenderPanel& panel, const FitSettings& settings) {
  FrameBuild out;
  std::vector<double> y, logp, female, interaction, pen;
  std::vector<std::string> labels;
  std::size_t total = 0, dropped = 0, complete = 0;
  for (const auto& agg : panel.countries) {
    const double p = penetration(agg);
    int kept = 0;
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      ++total;
      const double r = agg[g].ratio;
      if (!(r > 0) || !(p > 0) || !std::isfinite(r) || !std::isfinite(p)) {
        ++dropped;
        out.excluded.push_back(agg.country + ":" + std::string(to_string(g)) + ": non-positive ratio or penetration");
        continue;
      }
      const double is_female = g == Gender::kFemale ? 1.0 : 0.0;
      y.push_back(std::log(r));
      logp.push_back(std::log(p));
      female.push_back(is_female);
      interaction.push_back(is_female * std::log(p));
      pen.push_back(p);
      labels.push_back(agg.country + ":" + std::string(to_string(g)));
      ++kept;
    }
    if (kept == 2) ++complete;
  }
  if (total > 0 && static_cast<double>(dropped) > 0.05 * static_cast<double>(total)) {
    throw DataQualityError("network model: " + std::to_string(dropped) + " of " + std::to_string(total) +
                           " rows have a non-positive ratio or penetration (limit 5%)");
  }
  require_rows(complete, settings.min_countries, "network model");
  ModelFrame frame("log_ratio", to_vector(y), std::move(labels));
  frame.add(terms::kLogPenetration, logp);
  frame.add(terms::kFemale, female);
  frame.add(terms::kFemaleLogPenetration, interaction);
  out.frame = std::move(frame);
  out.penetration = to_vector(pen);
  return out;
}

FrameBuild build_delta_frame(ModelId model, const CountryGenderPanel& base, const CountryGenderPanel* next,
                             const IndicatorTable& indicators, Variant variant, const FitSettings& settings) {
  if (!is_delta(model)) throw ConfigError("not a changes model: " + std::string(to_string(model)));
  variant = resolve_variant(model, variant);
  const auto& req = model_requirement(requirement_name(model, variant));
  if (model == ModelId::kDeltaFgd && !next) {
    throw MissingDataError("delta_fgd model needs the panel one year after " + base.month);
  }
  FrameBuild out;
  const int year = settings.base_year;
  auto rows = complete_rows(base, model == ModelId::kDeltaFgd ? next : nullptr, indicators, req, year, out.excluded);
  require_rows(rows.size(), variant == Variant::kHofstede ? settings.min_countries_hofstede : settings.min_countries,
               to_string(model));

  auto field = [&](F f, int offset = 0) {
    return column(rows, [&](const Row& r) { return indicator(indicators, r.country, year + offset, f); });
  };
  auto fgd_values = column(rows, [](const Row& r) { return r.fgd; });

  std::vector<double> outcome;
  std::string outcome_name;
  ModelFrame frame;
  switch (model) {
    case ModelId::kDeltaEco: {
      auto now = field(F::kEco), later = field(F::kEco, 1);
      for (std::size_t i = 0; i < rows.size(); ++i) outcome.push_back(later[i] - now[i]);
      frame = ModelFrame("delta_eco", to_vector(outcome), countries_of(rows));
      frame.add(terms::kFgdRank, ranked(fgd_values, true), TermKind::kRankedRescaled);
      frame.add("eco_level", now);
      out.conditioning_term = terms::kFgdRank;
      break;
    }
    case ModelId::kDeltaFgd: {
      for (const auto& r : rows) outcome.push_back(r.fgd_next - r.fgd);
      frame = ModelFrame("delta_fgd", to_vector(outcome), countries_of(rows));
      frame.add(terms::kEcoRank, ranked(field(F::kEco), true), TermKind::kRankedRescaled);
      frame.add("fgd_level", fgd_values);
      out.conditioning_term = terms::kEcoRank;
      break;
    }
    default: {
      auto now = field(F::kEdu), later = field(F::kEdu, 1);
      for (std::size_t i = 0; i < rows.size(); ++i) outcome.push_back(later[i] - now[i]);
      frame = ModelFrame("delta_edu", to_vector(outcome), countries_of(rows));
      frame.add(terms::kFgdRank, ranked(fgd_values, true), TermKind::kRankedRescaled);
      frame.add("edu_level", now);
      out.conditioning_term = terms::kFgdRank;
      break;
    }
  }
  const auto [lo, hi] = std::minmax_element(outcome.begin(), outcome.end());
  if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) {
    throw DegenerateError(frame.outcome_name() + " is constant across all " + std::to_string(outcome.size()) +
                          " countries");
  }

  auto rank_control = [&](const char* name, const std::vector<double>& raw) {
    frame.add(name, ranked(raw, true), TermKind::kRankedRescaled);
  };
  auto pen = column(rows, [](const Row& r) { return penetration(*r.base); });
  auto age = column(rows, [](const Row& r) { return r.base->mean_active_age; });
  switch (variant) {
    case Variant::kGdp:
      rank_control(terms::kGdpRank, field(F::kGdpPpp));
      break;
    case Variant::kFull:
    case Variant::kInternet:
      rank_control(terms::kIneqRank, field(F::kQuintileRatio));
      rank_control(terms::kPopRank, field(F::kPopulation));
      rank_control(terms::kMeanAgeRank, age);
      rank_control(terms::kFbPenetrationRank, pen);
      if (variant == Variant::kFull) {
        rank_control(terms::kGdpRank, field(F::kGdpPpp));
      } else {
        rank_control(terms::kInternetRank, field(F::kInternetPenetration));
      }
      break;
    case Variant::kEquality:
      rank_control(terms::kGdpRank, field(F::kGdpPpp));
      rank_control(terms::kEduRank, field(F::kEdu));
      rank_control(terms::kPolRank, field(F::kPol));
      rank_control(terms::kHealthRank, field(F::kHealth));
      break;
    case Variant::kHofstede:
      // Cultural dimensions enter as raw index scores.
      frame.add("pdi", field(F::kPdi));
      frame.add("idv", field(F::kIdv));
      frame.add("mas", field(F::kMas));
      frame.add("uai", field(F::kUai));
      break;
    default:
      throw bad_variant(model, variant);
  }
  for (const auto& t : frame.terms()) {
    if (t.name != out.conditioning_term) out.controls.push_back(t.name);
  }
  out.frame = std::move(frame);
  out.penetration = to_vector(pen);
  return out;
}

std::vector<FitResult> fit_frame(const ModelFrame& frame, const FitSettings& settings,
                                 const Eigen::VectorXd* penetration) {
  std::vector<Estimator> wanted;
  for (auto e : settings.estimators) {
    if (std::find(wanted.begin(), wanted.end(), e) == wanted.end()) wanted.push_back(e);
  }
  if (wanted.empty()) throw ConfigError("no estimator requested");

  std::optional<FitResult> ols;
  auto base = [&]() -> const FitResult& {
    if (!ols) ols = stats::ols_fit(frame);
    return *ols;
  };
  std::vector<FitResult> fits;
  for (auto e : wanted) {
    switch (e) {
      case Estimator::kOls:
        fits.push_back(base());
        break;
      case Estimator::kHc:
        fits.push_back(stats::hc_se(frame, base(), settings.hc));
        break;
      case Estimator::kRobustMm: {
        auto opts = settings.mm;
        opts.seed = derive_seed(settings.seed, 2);
        fits.push_back(stats::robust_mm_fit(frame, opts));
        break;
      }
      case Estimator::kBayes: {
        stats::BayesOptions opts;
        opts.iterations = settings.bayes_iterations;
        opts.burn_in = settings.bayes_burn_in;
        opts.seed = derive_seed(settings.seed, 1);
        fits.push_back(stats::bayes_fit(frame, opts));
        break;
      }
    }
  }
  std::optional<std::pair<std::string, Eigen::VectorXd>> extra;
  if (penetration && penetration->size() == frame.n()) extra.emplace("fb_penetration", *penetration);
  for (auto& f : fits) {
    try {
      f.diagnostics = stats::residual_diagnostics(frame, f, extra);
    } catch (const Error& err) {
      f.notes.push_back(std::string("diagnostics unavailable: ") + err.what());
    }
  }
  return fits;
}

namespace {

ModelReport assemble(ModelId model, Variant variant, FrameBuild build, const FitSettings& settings,
                     const std::string& stratum) {
  ModelReport report;
  report.model = model;
  report.variant = variant;
  report.stratum = stratum;
  report.excluded = std::move(build.excluded);
  report.fits = fit_frame(build.frame, settings, &build.penetration);
  if (build.frame.terms().size() >= 2) report.vif = stats::vif(build.frame);
  report.conditioning_term = build.conditioning_term;
  report.frame = std::move(build.frame);
  return report;
}

NetworkSummary summarize_network(const ModelReport& report, const FitResult& fit, std::size_t excluded_rows) {
  const auto& frame = report.frame;
  const auto names = frame.design_names();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == terms::kLogPenetration || names[j] == terms::kFemaleLogPenetration) w(j) = 1.0;
  }
  NetworkSummary s;
  s.female_exponent = stats::linear_combination(fit, w);
  s.r2_log = fit.r2;
  s.alpha_vs_one_p = stats::test_coefficient(fit, terms::kLogPenetration, 1.0);
  s.excluded_rows = excluded_rows;
  const Eigen::VectorXd ratio = frame.outcome().array().exp();
  const Eigen::VectorXd predicted = fit.fitted.array().exp();
  const double tss = (ratio.array() - ratio.mean()).square().sum();
  s.r2_linear = tss > 0 ? 1.0 - (ratio - predicted).squaredNorm() / tss : std::nan("");
  return s;
}

}  // namespace

ModelReport fit_fgd_model(const CountryGenderPanel& panel, const IndicatorTable& indicators, Variant variant,
                          const FitSettings& settings) {
  variant = resolve_variant(ModelId::kFgd, variant);
  return assemble(ModelId::kFgd, variant, build_fgd_frame(panel, indicators, variant, settings), settings, "");
}

ModelReport fit_network_model(const CountryGenderPanel& panel, const FitSettings& settings) {
  auto build = build_network_frame(panel, settings);
  const auto excluded_rows = build.excluded.size();
  auto report = assemble(ModelId::kNetwork, Variant::kDefault, std::move(build), settings, "");
  for (const auto& f : report.fits) report.network.push_back(summarize_network(report, f, excluded_rows));
  return report;
}

ModelReport fit_delta_model(ModelId model, const CountryGenderPanel& base, const CountryGenderPanel* next,
                            const IndicatorTable& indicators, Variant variant, const FitSettings& settings) {
  variant = resolve_variant(model, variant);
  auto build = build_delta_frame(model, base, next, indicators, variant, settings);
  const auto controls = build.controls;
  auto report = assemble(model, variant, std::move(build), settings, "");
  report.anova = stats::anova_single_term(report.frame, report.conditioning_term);
  if (settings.bootstrap > 0) {
    stats::BootstrapOptions opts;
    opts.resamples = settings.bootstrap;
    opts.seed = derive_seed(settings.seed, 16 + static_cast<std::uint64_t>(model));
    opts.threads = settings.threads;
    report.partial_r2 = stats::bootstrap_partial_r2(report.frame, report.conditioning_term, controls, opts);
  }
  return report;
}

ModelReport fit_delta_edu_model(const CountryGenderPanel& base, const IndicatorTable& indicators, Variant variant,
                                const FitSettings& settings) {
  return fit_delta_model(ModelId::kDeltaEdu, base, nullptr, indicators, variant, settings);
}

ChangesReport fit_changes_models(const CountryGenderPanel& base, const CountryGenderPanel& next,
                                 const IndicatorTable& indicators, Variant variant, const FitSettings& settings) {
  return {fit_delta_model(ModelId::kDeltaEco, base, &next, indicators, variant, settings),
          fit_delta_model(ModelId::kDeltaFgd, base, &next, indicators, variant, settings)};
}

ModelReport fit_model(ModelId model, Variant variant, const ModelInputs& inputs, const FitSettings& settings) {
  if (!inputs.panel) throw ConfigError("fit_model needs a panel");
  if (model == ModelId::kNetwork) {
    resolve_variant(model, variant);
    return fit_network_model(*inputs.panel, settings);
  }
  if (!inputs.indicators) throw ConfigError("model '" + std::string(to_string(model)) + "' needs indicators");
  if (model == ModelId::kFgd) return fit_fgd_model(*inputs.panel, *inputs.indicators, variant, settings);
  return fit_delta_model(model, *inputs.panel, inputs.next_panel, *inputs.indicators, variant, settings);
}

void diagnostics(ModelReport& report) {
  std::optional<std::pair<std::string, Eigen::VectorXd>> extra;
  if (report.model == ModelId::kNetwork) {
    extra.emplace("fb_penetration", report.frame.term(terms::kLogPenetration).values.array().exp());
  }
  for (auto& f : report.fits) f.diagnostics = stats::residual_diagnostics(report.frame, f, extra);
}

std::vector<AgeWindow> default_age_groups() { return {{18, 24}, {25, 34}, {35, 44}, {45, 54}, {55, 65}}; }

namespace {

std::optional<std::string> year_later(const std::string& month) {
  if (month.size() != 7 || month[4] != '-') return std::nullopt;
  try {
    return std::to_string(std::stoi(month.substr(0, 4)) + 1) + month.substr(4);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void summarize_strata(StratifiedReport& out) {
  if (out.reports.empty()) return;
  std::vector<Estimator> estimators;
  for (const auto& f : out.reports.front().fits) estimators.push_back(f.estimator);
  for (auto e : estimators) {
    std::vector<std::string> names;
    std::map<std::string, TermStability> by_term;
    for (const auto& rep : out.reports) {
      const auto& fit = rep.fit(e);
      for (const auto& t : fit.terms) {
        auto [it, fresh] = by_term.try_emplace(t.name);
        auto& s = it->second;
        if (fresh) {
          names.push_back(t.name);
          s.term = t.name;
          s.estimator = e;
          s.min_estimate = s.max_estimate = t.estimate;
        }
        s.min_estimate = std::min(s.min_estimate, t.estimate);
        s.max_estimate = std::max(s.max_estimate, t.estimate);
        if (t.p < 0.05) ++s.significant;
        ++s.strata;
      }
    }
    for (const auto& n : names) out.stability.push_back(by_term.at(n));
  }
  const auto first = estimators.front();
  out.r2_min = out.r2_max = out.reports.front().fit(first).r2;
  for (const auto& rep : out.reports) {
    out.r2_min = std::min(out.r2_min, rep.fit(first).r2);
    out.r2_max = std::max(out.r2_max, rep.fit(first).r2);
  }
}

}  // namespace

StratifiedReport stratify(ModelId model, Variant variant, StrataKind kind, const StrataInputs& inputs,
                          const FitSettings& settings, std::vector<std::string> months,
                          std::vector<AgeWindow> age_groups) {
  if (!inputs.snapshots || !inputs.census) throw ConfigError("stratify needs snapshots and census");
  if (model != ModelId::kNetwork && !inputs.indicators) throw ConfigError("stratify needs indicators");
  variant = resolve_variant(model, variant);

  struct Stratum {
    std::string label, month, next_month;
    AgeWindow window;
  };
  std::vector<Stratum> strata;
  if (kind == StrataKind::kMonth) {
    if (months.empty()) months = inputs.snapshots->months();
    for (const auto& m : months) {
      strata.push_back({m, m, year_later(m).value_or(inputs.next_month), inputs.window});
    }
  } else {
    if (age_groups.empty()) age_groups = default_age_groups();
    for (const auto& w : age_groups) {
      w.check();
      strata.push_back({w.label(), inputs.month, inputs.next_month, w});
    }
  }

  StratifiedReport out;
  out.kind = kind;
  for (const auto& s : strata) {
    try {
      const auto panel = build_panel(*inputs.snapshots, *inputs.census, s.month, s.window);
      std::optional<CountryGenderPanel> next;
      if (model == ModelId::kDeltaFgd) next = build_panel(*inputs.snapshots, *inputs.census, s.next_month, s.window);
      ModelInputs mi{&panel, next ? &*next : nullptr, inputs.indicators};
      auto report = fit_model(model, variant, mi, settings);
      report.stratum = s.label;
      out.reports.push_back(std::move(report));
    } catch (const MissingDataError& e) {
      out.skipped.push_back(s.label + ": " + e.what());
    } catch (const SampleSizeError& e) {
      out.skipped.push_back(s.label + ": " + e.what());
    } catch (const ConfigError& e) {
      // build_panel reports an empty panel as a configuration problem.
      out.skipped.push_back(s.label + ": " + e.what());
    }
  }
  summarize_strata(out);
  return out;
}

}  // namespace gdivide
