#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gdivide {

enum class Gender { kMale, kFemale };

std::string_view to_string(Gender g);
std::optional<Gender> parse_gender(std::string_view text);

/// One API age segment: single years 13..64, plus the open-ended "65plus" bin.
/// The open bin is its own value and never compares equal to an integer age.
class AgeBin {
 public:
  static constexpr int kFirst = 13;
  static constexpr int kLastSingle = 64;

  static AgeBin single(int age);  // throws RangeError outside 13..64
  static AgeBin open_ended() { return AgeBin(kOpenValue); }
  static std::optional<AgeBin> parse(std::string_view text);
  /// All bins in API order.
  static std::vector<AgeBin> all();

  bool is_open_ended() const { return value_ == kOpenValue; }
  /// Lower bound of the bin in years (65 for the open bin).
  int lower_age() const { return value_; }
  /// Age used when averaging over bins.
  double representative_age() const { return value_; }
  std::string to_string() const;

  auto operator<=>(const AgeBin&) const = default;

 private:
  static constexpr int kOpenValue = 65;
  explicit AgeBin(int v) : value_(v) {}
  int value_;
};

/// Calendar day; ISO 8601 (YYYY-MM-DD) on the wire.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;
  /// "YYYY-MM".
  std::string month_label() const;
  auto operator<=>(const Date&) const = default;
};

/// ISO-3166 alpha-2 shape check (two ASCII upper-case letters).
bool is_iso_alpha2(std::string_view code);

struct AudienceCell {
  std::string country;
  Gender gender = Gender::kMale;
  AgeBin age_bin = AgeBin::single(AgeBin::kFirst);
  Date date;
  std::int64_t total_accounts = 0;
  std::int64_t dau = 0;
};

enum class SnapshotSource { kLive, kReplay };

struct SnapshotMetadata {
  std::string retrieval_label;
  SnapshotSource source = SnapshotSource::kReplay;
  std::vector<Date> dates;  // sorted, unique
  bool contiguous = true;   // false when `dates` has gaps
};

struct SnapshotSet {
  std::vector<AudienceCell> cells;
  SnapshotMetadata metadata;

  /// Sorted unique "YYYY-MM" labels present.
  std::vector<std::string> months() const;
  /// Sorted unique country codes present.
  std::vector<std::string> countries() const;
};

/// Checks every AudienceCell invariant, fills metadata.dates/contiguous.
/// Throws IntegrityError naming the first violation.
void validate(SnapshotSet& set);

struct CensusRow {
  std::string country;
  Gender gender = Gender::kMale;
  int age = 0;
  std::int64_t population = 0;
};

class CensusTable {
 public:
  CensusTable() = default;
  explicit CensusTable(std::vector<CensusRow> rows);  // throws IntegrityError on duplicates

  const std::vector<CensusRow>& rows() const { return rows_; }
  /// nullopt when no row exists for the key.
  std::optional<std::int64_t> population(const std::string& country, Gender g, int age) const;
  bool has_gender(const std::string& country, Gender g) const;
  std::vector<std::string> countries() const;

  /// Source names the alias map could not resolve (rows were not loaded).
  std::vector<std::string> unmapped_names;

 private:
  std::vector<CensusRow> rows_;
  std::map<std::tuple<std::string, Gender, int>, std::int64_t> index_;
};

enum class IndicatorField {
  kEco,
  kEdu,
  kHealth,
  kPol,
  kGdpPpp,
  kInternetPenetration,
  kQuintileRatio,
  kPopulation,
  kPdi,
  kIdv,
  kMas,
  kUai,
};

std::string_view to_string(IndicatorField f);

struct IndicatorRecord {
  std::string country;
  int year = 0;
  std::optional<double> eco, edu, health, pol;
  std::optional<double> gdp_ppp, internet_penetration, quintile_ratio, population;
  std::optional<double> pdi, idv, mas, uai;

  std::optional<double> get(IndicatorField f) const;
};

class IndicatorTable {
 public:
  IndicatorTable() = default;
  explicit IndicatorTable(std::vector<IndicatorRecord> records);  // throws on duplicate keys

  const std::vector<IndicatorRecord>& records() const { return records_; }
  const IndicatorRecord* find(const std::string& country, int year) const;
  std::optional<double> value(const std::string& country, int year, IndicatorField f) const;
  std::vector<int> years() const;

  std::vector<std::string> unmapped_names;

 private:
  std::vector<IndicatorRecord> records_;
  std::map<std::pair<std::string, int>, std::size_t> index_;
};

/// Country-name reconciliation between census/indicator sources and the
/// audience codes. Codes already in alpha-2 form pass through unchanged.
class AliasMap {
 public:
  /// Built-in aliases for common naming variants.
  static AliasMap defaults();
  /// CSV `name,iso2`, merged over the defaults.
  static AliasMap load(const std::string& path);

  void add(std::string name, std::string iso2);
  std::optional<std::string> resolve(std::string_view name) const;

 private:
  std::map<std::string, std::string, std::less<>> names_;
};

// Loaders. Headers are matched exactly; numbers are parsed with the C locale
// rules regardless of the process locale.
SnapshotSet load_audience(const std::string& path);
CensusTable load_census(const std::string& path, const AliasMap& aliases = AliasMap::defaults());
IndicatorTable load_indicators(const std::string& path,
                               const AliasMap& aliases = AliasMap::defaults());

// Serializers write the same column contracts the loaders read.
std::string to_csv(const SnapshotSet& set);
std::string to_csv(const CensusTable& census);
std::string to_csv(const IndicatorTable& indicators);

inline constexpr std::string_view kAudienceHeader = "country,gender,age_bin,date,total_accounts,dau";
inline constexpr std::string_view kCensusHeader = "country,gender,age,population";
inline constexpr std::string_view kIndicatorHeader =
    "country,year,eco,edu,health,pol,gdp_ppp,internet_penetration,quintile_ratio,population,pdi,"
    "idv,mas,uai";

/// Indicator columns a named model needs, relative to its base year.
struct ModelRequirement {
  std::string model;  // e.g. "fgd", "delta_eco_hofstede"
  std::vector<std::pair<IndicatorField, int>> fields;  // (field, year offset)
  bool needs_next_panel = false;  // model also needs a panel one year later
};

/// The requirement list for every named model variant; shared by the
/// coverage report and the model frame builders.
const std::vector<ModelRequirement>& model_requirements();
const ModelRequirement& model_requirement(std::string_view model);

struct ValidationReport {
  std::vector<std::string> audience_countries;
  /// In audience data but without census rows for both genders.
  std::vector<std::string> no_normalization;
  /// Audience+census countries lacking each indicator field (base year).
  std::map<std::string, std::vector<std::string>> missing_indicator;
  std::vector<std::string> unmapped_names;
  /// Candidate listwise-complete N per named model.
  std::map<std::string, std::size_t> model_n;
  int base_year = 2015;
};

ValidationReport coverage_report(const SnapshotSet& audience, const CensusTable& census,
                                 const IndicatorTable& indicators, int base_year = 2015);

/// Countries that pass the audience and census side of coverage: present in
/// audience data and in census for both genders.
std::vector<std::string> normalizable_countries(const SnapshotSet& audience,
                                                const CensusTable& census);

/// True when `country` has every field of `req` at base_year (+offset).
bool meets_requirement(const IndicatorTable& indicators, const std::string& country,
                       const ModelRequirement& req, int base_year);

std::string to_json(const ValidationReport& report);

}  // namespace gdivide
