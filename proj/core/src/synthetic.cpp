#include "gdivide/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gdivide/error.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/stats/rank.hpp"

namespace gdivide::synthetic {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double clamp01(double x, double lo = 0.0, double hi = 1.0) { return std::clamp(x, lo, hi); }

std::int64_t count(double x) { return std::max<std::int64_t>(0, std::llround(x)); }

/// Development-linked indicators shared by the generators.
IndicatorRecord indicators_for(const std::string& country, int year, double d, double population, Rng& rng,
                               bool hofstede) {
  IndicatorRecord r;
  r.country = country;
  r.year = year;
  r.eco = clamp01(0.62 + 0.06 * d + rng.normal(0, 0.04), 0.3, 0.9);
  r.edu = clamp01(0.88 + 0.025 * d + rng.normal(0, 0.015), 0.6, 0.97);
  r.health = clamp01(0.96 + 0.005 * d + rng.normal(0, 0.005), 0.9, 0.985);
  r.pol = clamp01(0.18 + 0.04 * d + rng.normal(0, 0.08), 0.0, 0.7);
  r.gdp_ppp = std::exp(9.3 + 0.9 * d + rng.normal(0, 0.3));
  r.internet_penetration = clamp01(logistic(0.2 + 1.2 * d + rng.normal(0, 0.3)), 0.01, 0.99);
  r.quintile_ratio = std::exp(1.8 - 0.2 * d + rng.normal(0, 0.25));
  r.population = population;
  if (hofstede) {
    r.pdi = std::clamp(60 - 12 * d + rng.normal(0, 12), 0.0, 100.0);
    r.idv = std::clamp(40 + 15 * d + rng.normal(0, 12), 0.0, 100.0);
    r.mas = std::clamp(50 + rng.normal(0, 15), 0.0, 100.0);
    r.uai = std::clamp(65 + rng.normal(0, 18), 0.0, 100.0);
  }
  return r;
}

std::vector<double> rescaled_ranks(const std::vector<double>& v) {
  return stats::rescale_unit(stats::rank_transform(v));
}

}  // namespace

std::vector<std::string> country_codes(std::size_t n) {
  if (n > 26 * 26) throw ConfigError("at most 676 synthetic countries");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({static_cast<char>('A' + i / 26), static_cast<char>('A' + i % 26)});
  }
  return out;
}

World make_world(const WorldOptions& o) {
  if (o.countries < 3) throw ConfigError("synthetic world needs at least 3 countries");
  if (o.days_per_month < 1 || o.days_per_month > 28) throw ConfigError("days_per_month must be in 1..28");
  std::vector<Date> month_starts;
  for (const auto& m : o.months) {
    auto d = Date::parse(m + "-01");
    if (!d) throw ConfigError("bad month label '" + m + "'");
    month_starts.push_back(*d);
  }
  const auto codes = country_codes(o.countries);
  const auto bins = AgeBin::all();

  World world;
  std::vector<CensusRow> census;
  std::vector<IndicatorRecord> records;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    Rng rng(derive_seed(o.seed, i));
    const auto& code = codes[i];
    const double d = rng.normal();
    const double scale = std::exp(rng.normal(11.0, 1.2));
    const double male_share = 0.5 + rng.normal(0, 0.01);

    // Census by single year of age; 65 holds everyone aged 65 and over.
    std::array<std::vector<double>, 2> pop;
    for (int g = 0; g < 2; ++g) {
      for (int age = AgeBin::kFirst; age <= 65; ++age) {
        double p = scale * std::exp(-0.015 * (age - AgeBin::kFirst)) * (1 + 0.05 * rng.normal());
        if (age == 65) p *= 10;
        p *= g == 0 ? male_share : 1 - male_share;
        pop[g].push_back(std::max(1.0, std::round(p)));
        census.push_back({code, g == 0 ? Gender::kMale : Gender::kFemale, age,
                          static_cast<std::int64_t>(pop[g].back())});
      }
    }
    double pop_total = 0;
    for (int g = 0; g < 2; ++g) {
      for (double p : pop[g]) pop_total += p;
    }

    const double base_pen = 0.02 + 0.85 * logistic(-0.3 + 0.9 * d + rng.normal(0, 0.3));
    const double eps_m = rng.normal(0, o.noise);
    const double eps_f = rng.normal(0, o.noise);
    const bool hofstede = rng.uniform() < o.hofstede_fraction;

    for (std::size_t m = 0; m < month_starts.size(); ++m) {
      const double growth = std::pow(1.05, month_starts[m].year - o.base_year);
      const double pen = std::min(0.95, base_pen * growth);
      const double log_pen = std::log(pen);
      for (int g = 0; g < 2; ++g) {
        const bool female = g == 1;
        const double log_r = o.alpha * log_pen + o.beta + (female ? o.alpha_female * log_pen + o.beta_female : 0.0) +
                             (female ? eps_f : eps_m) + rng.normal(0, 0.005);
        const double ratio = std::exp(log_r);
        double pop_g = 0;
        for (double p : pop[g]) pop_g += p;
        // Younger bins are slightly more active than they are registered.
        std::vector<double> w(bins.size()), v(bins.size());
        double wsum = 0, vsum = 0;
        for (std::size_t b = 0; b < bins.size(); ++b) {
          const double age = bins[b].representative_age();
          const double p = pop[g][static_cast<std::size_t>(bins[b].lower_age() - AgeBin::kFirst)];
          w[b] = p * std::exp(-0.02 * (age - AgeBin::kFirst));
          v[b] = p * std::exp(-0.01 * (age - AgeBin::kFirst));
          wsum += w[b];
          vsum += v[b];
        }
        const double active = ratio * pop_g;
        const double accounts = pen * pop_g;
        for (std::size_t b = 0; b < bins.size(); ++b) {
          const double acc_bin = accounts * v[b] / vsum;
          const double dau_bin = std::min(active * w[b] / wsum, acc_bin);
          for (int day = 1; day <= o.days_per_month; ++day) {
            AudienceCell cell;
            cell.country = code;
            cell.gender = female ? Gender::kFemale : Gender::kMale;
            cell.age_bin = bins[b];
            cell.date = month_starts[m];
            cell.date.day = day;
            cell.total_accounts = count(acc_bin * (1 + rng.normal(0, 0.002)));
            cell.dau = std::min(cell.total_accounts, count(dau_bin * (1 + rng.normal(0, o.daily_noise))));
            world.audience.cells.push_back(std::move(cell));
          }
        }
      }
    }

    auto base = indicators_for(code, o.base_year, d, pop_total, rng, hofstede);
    auto next = base;
    next.year = o.base_year + 1;
    next.eco = clamp01(*base.eco + rng.normal(0, 0.02));
    next.edu = clamp01(*base.edu + rng.normal(0, 0.005));
    next.health = clamp01(*base.health + rng.normal(0, 0.002));
    next.pol = clamp01(*base.pol + rng.normal(0, 0.02));
    next.gdp_ppp = *base.gdp_ppp * std::exp(rng.normal(0.02, 0.02));
    next.internet_penetration = clamp01(*base.internet_penetration * 1.03);
    next.population = *base.population * 1.01;
    records.push_back(std::move(base));
    records.push_back(std::move(next));
  }
  world.audience.metadata.retrieval_label = "synthetic seed " + std::to_string(o.seed);
  world.audience.metadata.source = SnapshotSource::kReplay;
  validate(world.audience);
  world.census = CensusTable(std::move(census));
  world.indicators = IndicatorTable(std::move(records));
  return world;
}

CountryGenderPanel network_panel(const NetworkPanelOptions& o) {
  CountryGenderPanel panel;
  panel.month = "2015-07";
  Rng rng(o.seed);
  const double lo = std::log(0.02), hi = std::log(0.8);
  for (const auto& code : country_codes(o.countries)) {
    CountryAggregate row;
    row.country = code;
    const double pen = std::exp(lo + (hi - lo) * rng.uniform());
    const double log_pen = std::log(pen);
    row.male.population = std::round(1e6 * (1 + rng.uniform()));
    row.female.population = std::round(1e6 * (1 + rng.uniform()));
    row.male.ratio = std::exp(o.alpha * log_pen + o.beta + rng.normal(0, o.noise));
    row.female.ratio =
        std::exp((o.alpha + o.alpha_female) * log_pen + o.beta + o.beta_female + rng.normal(0, o.noise));
    row.male.active = row.male.ratio * row.male.population;
    row.female.active = row.female.ratio * row.female.population;
    row.population_total = row.male.population + row.female.population;
    row.accounts_total = pen * row.population_total;
    row.mean_active_age = 30 + rng.normal(0, 4);
    panel.countries.push_back(std::move(row));
  }
  return panel;
}

ChangesWorld changes_world(const ChangesOptions& o) {
  if (o.countries < 3) throw ConfigError("changes world needs at least 3 countries");
  Rng rng(o.seed);
  const auto codes = country_codes(o.countries);
  ChangesWorld out;
  out.panel.month = std::to_string(o.base_year) + "-07";
  out.next_panel.month = std::to_string(o.base_year + 1) + "-07";

  std::vector<double> dev, fgd_now;
  std::vector<IndicatorRecord> base_records;
  for (const auto& code : codes) {
    const double d = rng.normal();
    const double pen = 0.02 + 0.85 * logistic(-0.3 + 0.9 * d + rng.normal(0, 0.3));
    const double fgd = 0.3 - 0.4 * d + rng.normal(0, 0.3);
    const double fgd_next = fgd + rng.normal(0, 0.05);
    for (auto* panel : {&out.panel, &out.next_panel}) {
      const double g = panel == &out.panel ? fgd : fgd_next;
      CountryAggregate row;
      row.country = code;
      row.male.population = 1e6;
      row.female.population = 1e6;
      row.male.ratio = std::pow(pen, 1.2) * 0.6;
      row.female.ratio = row.male.ratio * std::exp(-g);
      row.male.active = row.male.ratio * row.male.population;
      row.female.active = row.female.ratio * row.female.population;
      row.population_total = 2e6;
      row.accounts_total = pen * row.population_total;
      row.mean_active_age = 30 + 3 * d + rng.normal(0, 2);
      panel->countries.push_back(std::move(row));
    }
    dev.push_back(d);
    fgd_now.push_back(fgd);
    base_records.push_back(indicators_for(code, o.base_year, d, std::exp(rng.normal(15, 1.5)), rng, true));
  }

  const auto fgd_rank = rescaled_ranks(fgd_now);
  std::vector<IndicatorRecord> records;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    auto base = base_records[i];
    auto next = base;
    next.year = o.base_year + 1;
    next.eco = clamp01(*base.eco + o.eco_effect * fgd_rank[i] + rng.normal(0, o.change_noise));
    next.edu = clamp01(*base.edu + o.edu_effect * fgd_rank[i] + rng.normal(0, o.change_noise / 4));
    records.push_back(std::move(base));
    records.push_back(std::move(next));
  }
  out.indicators = IndicatorTable(std::move(records));
  return out;
}

}  // namespace gdivide::synthetic
