#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gdivide/dataset.hpp"
#include "gdivide/metrics.hpp"

// Seeded generators for fixtures and generative-recovery checks. Countries
// get placeholder two-letter codes "AA", "AB", ...
namespace gdivide::synthetic {

std::vector<std::string> country_codes(std::size_t n);

struct WorldOptions {
  std::size_t countries = 60;
  std::uint64_t seed = 1;
  std::vector<std::string> months{"2015-07", "2016-07"};
  int days_per_month = 3;
  int base_year = 2015;
  // log R_g = alpha log P + beta + [female] (alpha_f log P + beta_f) + N(0, noise)
  double alpha = 1.3;
  double alpha_female = 0.2;
  double beta = -0.5;
  double beta_female = 0.1;
  double noise = 0.05;
  double daily_noise = 0.02;       // relative day-to-day DAU jitter
  double hofstede_fraction = 0.8;  // share of countries with cultural scores
};

/// Audience snapshots, census by single year of age (65 = 65 and over) and
/// indicators for base_year and base_year + 1, all mutually consistent.
struct World {
  SnapshotSet audience;
  CensusTable census;
  IndicatorTable indicators;
};

World make_world(const WorldOptions& options);

struct NetworkPanelOptions {
  std::size_t countries = 150;
  std::uint64_t seed = 1;
  double alpha = 1.3;
  double alpha_female = 0.2;
  double beta = -0.5;
  double beta_female = 0.1;
  double noise = 0.05;
};

/// Panel whose ratios follow the network model exactly up to Gaussian noise
/// on the log scale. Penetrations are drawn log-uniform on [0.02, 0.8].
CountryGenderPanel network_panel(const NetworkPanelOptions& options);

struct ChangesOptions {
  std::size_t countries = 80;
  std::uint64_t seed = 1;
  int base_year = 2015;
  /// Slope of the year-over-year change of Eco (resp. Edu) on the rescaled
  /// FGD rank. Zero gives the null model.
  double eco_effect = 0.0;
  double edu_effect = 0.0;
  double change_noise = 0.02;
};

struct ChangesWorld {
  CountryGenderPanel panel;       // base month
  CountryGenderPanel next_panel;  // one year later
  IndicatorTable indicators;      // base_year and base_year + 1
};

ChangesWorld changes_world(const ChangesOptions& options);

}  // namespace gdivide::synthetic
