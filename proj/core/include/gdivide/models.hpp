#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdivide/dataset.hpp"
#include "gdivide/metrics.hpp"
#include "gdivide/stats/bayes.hpp"
#include "gdivide/stats/bootstrap.hpp"
#include "gdivide/stats/diagnostics.hpp"
#include "gdivide/stats/fit.hpp"
#include "gdivide/stats/frame.hpp"
#include "gdivide/stats/linear.hpp"
#include "gdivide/stats/robust.hpp"

namespace gdivide {

enum class ModelId { kFgd, kNetwork, kDeltaEco, kDeltaFgd, kDeltaEdu };

/// Control sets. kDefault resolves to kInternet for the FGD model and to the
/// GDP-only base set for the changes models.
enum class Variant { kDefault, kInternet, kGdp, kFull, kEquality, kHofstede };

std::string_view to_string(ModelId m);
std::string_view to_string(Variant v);
std::optional<ModelId> parse_model(std::string_view text);    // "fgd", "delta-eco", "delta_eco", ...
std::optional<Variant> parse_variant(std::string_view text);
std::optional<stats::Estimator> parse_estimator(std::string_view text);  // ols|hc|robust|bayes

/// Name used in model_requirements(), e.g. "delta_eco_hofstede".
std::string requirement_name(ModelId model, Variant variant);
Variant resolve_variant(ModelId model, Variant variant);

struct FitSettings {
  std::vector<stats::Estimator> estimators{stats::Estimator::kOls};
  stats::HcType hc = stats::HcType::kHc3;
  stats::MmOptions mm;
  int bayes_iterations = 10000;
  int bayes_burn_in = 1000;
  std::uint64_t seed = 0;
  /// Partial-R^2 bootstrap resamples for the changes models; 0 disables.
  std::size_t bootstrap = 0;
  unsigned threads = 0;
  int base_year = 2015;
  std::size_t min_countries = 30;
  std::size_t min_countries_hofstede = 50;
};

/// Derived quantities of the network externalities model, per fit.
struct NetworkSummary {
  stats::Interval female_exponent;  // alpha + alpha_F
  double r2_log = 0;
  double r2_linear = 0;
  double alpha_vs_one_p = 1;  // H0: alpha == 1
  std::size_t excluded_rows = 0;
};

struct ModelReport {
  ModelId model = ModelId::kFgd;
  Variant variant = Variant::kDefault;
  std::string stratum;  // month or age window label; empty when unstratified
  stats::ModelFrame frame;
  std::vector<stats::FitResult> fits;  // one per requested estimator, each with diagnostics
  std::vector<stats::VifEntry> vif;
  std::vector<std::string> excluded;  // countries dropped listwise
  std::string conditioning_term;      // changes models
  std::optional<stats::FTest> anova;
  std::optional<stats::PartialR2Distribution> partial_r2;
  std::vector<NetworkSummary> network;  // aligned with fits (network model only)

  const stats::FitResult& fit(stats::Estimator e) const;  // throws ConfigError
};

/// A frame plus the bookkeeping the report needs.
struct FrameBuild {
  stats::ModelFrame frame;
  std::vector<std::string> excluded;
  Eigen::VectorXd penetration;  // per row, for the residual check
  std::string conditioning_term;
  std::vector<std::string> controls;  // partial-R^2 controls (changes models)
};

// Term names used in frames and reports.
namespace terms {
inline constexpr const char* kFgdRank = "fgd_rank";
inline constexpr const char* kEduRank = "edu_rank";
inline constexpr const char* kHealthRank = "health_rank";
inline constexpr const char* kEcoRank = "eco_rank";
inline constexpr const char* kPolRank = "pol_rank";
inline constexpr const char* kInternetRank = "internet_rank";
inline constexpr const char* kGdpRank = "gdp_rank";
inline constexpr const char* kIneqRank = "ineq_rank";
inline constexpr const char* kPopRank = "pop_rank";
inline constexpr const char* kFbPenetrationRank = "fb_penetration_rank";
inline constexpr const char* kMeanAgeRank = "mean_age_rank";
inline constexpr const char* kLogPenetration = "log_penetration";  // alpha
inline constexpr const char* kFemale = "female";                   // beta_F
inline constexpr const char* kFemaleLogPenetration = "female_x_log_penetration";  // alpha_F
}  // namespace terms

/// rank(FGD) on ranks of the four equality indices plus controls.
FrameBuild build_fgd_frame(const CountryGenderPanel& panel, const IndicatorTable& indicators, Variant variant,
                           const FitSettings& settings = {});

/// log R_{g,c} on log P_c, a female indicator, and their interaction; two
/// rows per country. Throws DataQualityError when more than 5% of rows have
/// a non-positive ratio or penetration.
FrameBuild build_network_frame(const CountryGenderPanel& panel, const FitSettings& settings = {});

/// Changes models. `next` is the panel one year after `base` and is only
/// read for kDeltaFgd.
FrameBuild build_delta_frame(ModelId model, const CountryGenderPanel& base, const CountryGenderPanel* next,
                             const IndicatorTable& indicators, Variant variant, const FitSettings& settings = {});

/// Runs every requested estimator on a frame and attaches diagnostics.
std::vector<stats::FitResult> fit_frame(const stats::ModelFrame& frame, const FitSettings& settings,
                                        const Eigen::VectorXd* penetration = nullptr);

ModelReport fit_fgd_model(const CountryGenderPanel& panel, const IndicatorTable& indicators, Variant variant,
                          const FitSettings& settings);
ModelReport fit_network_model(const CountryGenderPanel& panel, const FitSettings& settings);
ModelReport fit_delta_model(ModelId model, const CountryGenderPanel& base, const CountryGenderPanel* next,
                            const IndicatorTable& indicators, Variant variant, const FitSettings& settings);
ModelReport fit_delta_edu_model(const CountryGenderPanel& base, const IndicatorTable& indicators, Variant variant,
                                const FitSettings& settings);

struct ChangesReport {
  ModelReport delta_eco;
  ModelReport delta_fgd;
};

/// Both directions of the equality/FGD changes analysis, each with its ANOVA
/// and (when settings.bootstrap > 0) bootstrap partial R^2.
ChangesReport fit_changes_models(const CountryGenderPanel& base, const CountryGenderPanel& next,
                                 const IndicatorTable& indicators, Variant variant, const FitSettings& settings);

struct ModelInputs {
  const CountryGenderPanel* panel = nullptr;
  const CountryGenderPanel* next_panel = nullptr;
  const IndicatorTable* indicators = nullptr;
};

ModelReport fit_model(ModelId model, Variant variant, const ModelInputs& inputs, const FitSettings& settings);

/// Re-runs the residual battery of every fit in the report.
void diagnostics(ModelReport& report);

enum class StrataKind { kMonth, kAge };

struct StrataInputs {
  const SnapshotSet* snapshots = nullptr;
  const CensusTable* census = nullptr;
  const IndicatorTable* indicators = nullptr;
  std::string month = "2015-07";       // base month for age strata
  std::string next_month = "2016-07";  // for kDeltaFgd
  AgeWindow window;                    // window for month strata
};

struct TermStability {
  std::string term;
  stats::Estimator estimator = stats::Estimator::kOls;
  double min_estimate = 0;
  double max_estimate = 0;
  std::size_t significant = 0;  // strata with p < 0.05
  std::size_t strata = 0;
};

struct StratifiedReport {
  StrataKind kind = StrataKind::kMonth;
  std::vector<ModelReport> reports;
  std::vector<std::string> skipped;  // "stratum: reason"
  std::vector<TermStability> stability;
  double r2_min = 0;
  double r2_max = 0;
};

/// Age groups used when none are given.
std::vector<AgeWindow> default_age_groups();

/// One report per month (all months in the snapshots when `months` is
/// empty) or per age window. Strata whose panel cannot be built or whose
/// frame is too small are skipped with a notice.
StratifiedReport stratify(ModelId model, Variant variant, StrataKind kind, const StrataInputs& inputs,
                          const FitSettings& settings, std::vector<std::string> months = {},
                          std::vector<AgeWindow> age_groups = {});

// Serialization (model_io.cpp).
std::string to_json(const ModelReport& report);
/// `estimator,term,estimate,se,ci_low,ci_high,p` at 6 decimals.
std::string to_csv(const ModelReport& report);
std::string to_json(const StratifiedReport& report);
std::string stability_csv(const StratifiedReport& report);

}  // namespace gdivide
