#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdivide/dataset.hpp"

namespace gdivide {

/// Inclusive age window in years, 13 <= lo <= hi <= 65.
/// The "65plus" bin counts as inside the window only when hi == 65.
struct AgeWindow {
  int lo = 13;
  int hi = 65;

  bool contains(AgeBin bin) const;
  bool contains_age(int age) const { return age >= lo && age <= hi; }
  std::string label() const;
  void check() const;  // throws ConfigError
  auto operator<=>(const AgeWindow&) const = default;
};

/// Median daily DAU of one segment over a "YYYY-MM" month. Even day counts
/// average the two middle values. Throws MissingDataError when the month has
/// no observation for the key.
double median_dau(const SnapshotSet& set, const std::string& country, Gender gender, AgeBin bin,
                  const std::string& month);

/// Median of a non-empty sample (mean of the middle pair for even sizes).
double median_of(std::vector<double> values);

struct GenderAggregate {
  double active = 0;      // A: summed median DAU over in-window bins
  double population = 0;  // P: census population in window
  double ratio = 0;       // R = A / P
};

struct CountryAggregate {
  std::string country;
  GenderAggregate male;
  GenderAggregate female;
  double accounts_total = 0;    // registered accounts, both genders, in window
  double population_total = 0;  // census, both genders, in window
  double mean_active_age = 0;   // DAU-weighted over bins

  const GenderAggregate& operator[](Gender g) const { return g == Gender::kMale ? male : female; }
};

struct PanelExclusion {
  std::string country;
  std::string reason;
};

struct CountryGenderPanel {
  std::string month;
  AgeWindow window;
  std::vector<CountryAggregate> countries;  // sorted by country code
  std::vector<PanelExclusion> excluded;

  const CountryAggregate* find(const std::string& country) const;
  const CountryAggregate& at(const std::string& country) const;  // throws MissingDataError
};

/// Aggregates one month of snapshots against census. Countries lacking census
/// rows or audience data for either gender, or with zero population in the
/// window, are excluded and listed. Throws MissingDataError if the month has
/// no data and ConfigError if nothing survives.
CountryGenderPanel build_panel(const SnapshotSet& set, const CensusTable& census, const std::string& month,
                               AgeWindow window = {});

/// log(R_male / R_female), natural log. Throws UndefinedMetricError when
/// either ratio is zero or the country is absent.
double fgd(const CountryGenderPanel& panel, const std::string& country);
double fgd(const CountryAggregate& row);

/// accounts_total / population_total; deliberately not clamped at 1.
double penetration(const CountryGenderPanel& panel, const std::string& country);
double penetration(const CountryAggregate& row);

double mean_active_age(const CountryGenderPanel& panel, const std::string& country);
/// DAU-weighted mean representative age of a country's bins for one month.
double mean_active_age(const SnapshotSet& set, const std::string& country, const std::string& month,
                       AgeWindow window = {});

struct DivideMetrics {
  std::string country;
  std::optional<double> fgd;  // nullopt when undefined
  double penetration = 0;
  double mean_active_age = 0;
  bool penetration_above_one = false;
};

std::vector<DivideMetrics> compute_metrics(const CountryGenderPanel& panel);

/// `fgd.csv`: country,fgd,penetration,mean_active_age,A_male,A_female,P_male,P_female
/// at 6 decimals; an undefined FGD is written as an empty field.
std::string fgd_csv(const CountryGenderPanel& panel);

/// Lossless panel artifact written by `ingest`.
std::string panel_csv(const CountryGenderPanel& panel);
CountryGenderPanel load_panel(const std::string& path);

}  // namespace gdivide
