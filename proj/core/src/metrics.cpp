#include "gdivide/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "gdivide/csv.hpp"
#include "gdivide/error.hpp"

namespace gdivide {

bool AgeWindow::contains(AgeBin bin) const {
  if (bin.is_open_ended()) return hi == 65 && lo <= 65;
  return contains_age(bin.lower_age());
}

std::string AgeWindow::label() const { return std::to_string(lo) + "-" + std::to_string(hi); }

void AgeWindow::check() const {
  if (lo < 13 || hi > 65 || lo > hi) {
    throw ConfigError("age window [" + std::to_string(lo) + "," + std::to_string(hi) + "] outside [13,65]");
  }
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw MissingDataError("median of an empty sample");
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

double median_dau(const SnapshotSet& set, const std::string& country, Gender gender, AgeBin bin,
                  const std::string& month) {
  std::vector<double> days;
  for (const auto& c : set.cells) {
    if (c.country == country && c.gender == gender && c.age_bin == bin && c.date.month_label() == month) {
      days.push_back(static_cast<double>(c.dau));
    }
  }
  if (days.empty()) {
    throw MissingDataError("no DAU observations for (" + country + ", " + std::string(to_string(gender)) + ", " +
                           bin.to_string() + ") in " + month);
  }
  return median_of(std::move(days));
}

namespace {

struct SegmentDays {
  std::vector<double> dau;
  std::vector<double> accounts;
};

using SegmentKey = std::tuple<std::string, Gender, AgeBin>;

// Groups one month's cells by segment. A std::map keeps iteration order fixed
// regardless of the order cells arrive in.
std::map<SegmentKey, SegmentDays> group_month(const SnapshotSet& set, const std::string& month, AgeWindow window) {
  std::map<SegmentKey, SegmentDays> groups;
  for (const auto& c : set.cells) {
    if (c.date.month_label() != month || !window.contains(c.age_bin)) continue;
    auto& g = groups[{c.country, c.gender, c.age_bin}];
    g.dau.push_back(static_cast<double>(c.dau));
    g.accounts.push_back(static_cast<double>(c.total_accounts));
  }
  return groups;
}

}  // namespace

CountryGenderPanel build_panel(const SnapshotSet& set, const CensusTable& census, const std::string& month,
                               AgeWindow window) {
  window.check();
  bool month_seen = false;
  for (const auto& c : set.cells) {
    if (c.date.month_label() == month) {
      month_seen = true;
      break;
    }
  }
  if (!month_seen) throw MissingDataError("no audience data for month " + month);

  const auto groups = group_month(set, month, window);

  struct Partial {
    double active[2] = {0, 0};
    double accounts = 0;
    double weighted_age = 0;
    bool seen[2] = {false, false};
  };
  std::map<std::string, Partial> partial;
  for (const auto& [key, days] : groups) {
    const auto& [country, gender, bin] = key;
    auto& p = partial[country];
    const int gi = gender == Gender::kMale ? 0 : 1;
    // Per-segment medians, summed in key order.
    const double dau = median_of(days.dau);
    p.active[gi] += dau;
    p.accounts += median_of(days.accounts);
    p.weighted_age += dau * bin.representative_age();
    p.seen[gi] = true;
  }

  CountryGenderPanel panel;
  panel.month = month;
  panel.window = window;
  std::set<std::string> considered;
  for (const auto& c : set.countries()) considered.insert(c);

  for (const auto& country : considered) {
    auto it = partial.find(country);
    if (it == partial.end()) {
      panel.excluded.push_back({country, "no audience data in window for " + month});
      continue;
    }
    const auto& p = it->second;
    if (!p.seen[0] || !p.seen[1]) {
      panel.excluded.push_back({country, "audience data for one gender only"});
      continue;
    }
    if (!census.has_gender(country, Gender::kMale) || !census.has_gender(country, Gender::kFemale)) {
      panel.excluded.push_back({country, "no census for both genders"});
      continue;
    }
    double pop[2] = {0, 0};
    for (int gi = 0; gi < 2; ++gi) {
      const Gender g = gi == 0 ? Gender::kMale : Gender::kFemale;
      for (int age = window.lo; age <= window.hi; ++age) {
        if (auto v = census.population(country, g, age)) pop[gi] += static_cast<double>(*v);
      }
    }
    if (pop[0] <= 0 || pop[1] <= 0) {
      panel.excluded.push_back({country, "zero census population in window"});
      continue;
    }
    CountryAggregate row;
    row.country = country;
    row.male = {p.active[0], pop[0], p.active[0] / pop[0]};
    row.female = {p.active[1], pop[1], p.active[1] / pop[1]};
    row.accounts_total = p.accounts;
    row.population_total = pop[0] + pop[1];
    const double total_active = p.active[0] + p.active[1];
    row.mean_active_age = total_active > 0 ? p.weighted_age / total_active : std::nan("");
    panel.countries.push_back(std::move(row));
  }
  if (panel.countries.empty()) {
    throw ConfigError("panel for " + month + " window " + window.label() + " is empty");
  }
  return panel;
}

const CountryAggregate* CountryGenderPanel::find(const std::string& country) const {
  auto it = std::lower_bound(countries.begin(), countries.end(), country,
                             [](const CountryAggregate& a, const std::string& c) { return a.country < c; });
  return it != countries.end() && it->country == country ? &*it : nullptr;
}

const CountryAggregate& CountryGenderPanel::at(const std::string& country) const {
  const auto* row = find(country);
  if (!row) throw MissingDataError("country " + country + " not in panel");
  return *row;
}

double fgd(const CountryAggregate& row) {
  if (!(row.male.ratio > 0) || !(row.female.ratio > 0)) {
    throw UndefinedMetricError("FGD undefined for " + row.country + ": zero activity ratio");
  }
  return std::log(row.male.ratio / row.female.ratio);
}

double fgd(const CountryGenderPanel& panel, const std::string& country) {
  const auto* row = panel.find(country);
  if (!row) throw UndefinedMetricError("FGD undefined for " + country + ": not in panel");
  return fgd(*row);
}

double penetration(const CountryAggregate& row) {
  if (!(row.population_total > 0)) {
    throw UndefinedMetricError("penetration undefined for " + row.country + ": zero population");
  }
  return row.accounts_total / row.population_total;
}

double penetration(const CountryGenderPanel& panel, const std::string& country) {
  const auto* row = panel.find(country);
  if (!row) throw UndefinedMetricError("penetration undefined for " + country + ": not in panel");
  return penetration(*row);
}

double mean_active_age(const CountryGenderPanel& panel, const std::string& country) {
  const auto& row = panel.at(country);
  if (!std::isfinite(row.mean_active_age)) {
    throw UndefinedMetricError("mean active age undefined for " + country + ": no active users");
  }
  return row.mean_active_age;
}

double mean_active_age(const SnapshotSet& set, const std::string& country, const std::string& month,
                       AgeWindow window) {
  window.check();
  std::map<AgeBin, std::vector<double>> per_bin[2];
  for (const auto& c : set.cells) {
    if (c.country != country || c.date.month_label() != month || !window.contains(c.age_bin)) continue;
    per_bin[c.gender == Gender::kMale ? 0 : 1][c.age_bin].push_back(static_cast<double>(c.dau));
  }
  double weight = 0, weighted = 0;
  for (auto& bins : per_bin) {
    for (auto& [bin, days] : bins) {
      const double m = median_of(days);
      weight += m;
      weighted += m * bin.representative_age();
    }
  }
  if (!(weight > 0)) {
    throw UndefinedMetricError("mean active age undefined for " + country + " in " + month);
  }
  return weighted / weight;
}

std::vector<DivideMetrics> compute_metrics(const CountryGenderPanel& panel) {
  std::vector<DivideMetrics> out;
  out.reserve(panel.countries.size());
  for (const auto& row : panel.countries) {
    DivideMetrics m;
    m.country = row.country;
    if (row.male.ratio > 0 && row.female.ratio > 0) m.fgd = fgd(row);
    m.penetration = penetration(row);
    m.penetration_above_one = m.penetration > 1.0;
    m.mean_active_age = row.mean_active_age;
    out.push_back(std::move(m));
  }
  return out;
}

std::string fgd_csv(const CountryGenderPanel& panel) {
  std::string out = "country,fgd,penetration,mean_active_age,A_male,A_female,P_male,P_female\n";
  for (const auto& row : panel.countries) {
    std::string fgd_text;
    if (row.male.ratio > 0 && row.female.ratio > 0) fgd_text = csv::fixed(fgd(row));
    out += row.country + ',' + fgd_text + ',' + csv::fixed(penetration(row)) + ',' +
           csv::fixed(row.mean_active_age) + ',' + csv::fixed(row.male.active) + ',' + csv::fixed(row.female.active) +
           ',' + csv::fixed(row.male.population) + ',' + csv::fixed(row.female.population) + '\n';
  }
  return out;
}

namespace {
constexpr std::string_view kPanelHeader =
    "country,month,age_lo,age_hi,A_male,A_female,P_male,P_female,accounts_total,population_total,mean_active_age";
}

std::string panel_csv(const CountryGenderPanel& panel) {
  std::string out(kPanelHeader);
  out += '\n';
  for (const auto& row : panel.countries) {
    out += row.country + ',' + panel.month + ',' + std::to_string(panel.window.lo) + ',' +
           std::to_string(panel.window.hi) + ',' + csv::shortest(row.male.active) + ',' +
           csv::shortest(row.female.active) + ',' + csv::shortest(row.male.population) + ',' +
           csv::shortest(row.female.population) + ',' + csv::shortest(row.accounts_total) + ',' +
           csv::shortest(row.population_total) + ',' + csv::shortest(row.mean_active_age) + '\n';
  }
  return out;
}

CountryGenderPanel load_panel(const std::string& path) {
  const auto table = csv::read(path);
  csv::require_header(table, csv::split(kPanelHeader));
  CountryGenderPanel panel;
  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      throw ParseError(path, row.line, "row", "wrong field count");
    }
    auto num = [&](std::size_t i) {
      auto v = csv::parse_double(row.fields[i]);
      if (!v) throw ParseError(path, row.line, table.header[i], "not a number");
      return *v;
    };
    const auto lo = static_cast<int>(num(2));
    const auto hi = static_cast<int>(num(3));
    if (panel.countries.empty()) {
      panel.month = row.fields[1];
      panel.window = {lo, hi};
    } else if (row.fields[1] != panel.month || lo != panel.window.lo || hi != panel.window.hi) {
      throw IntegrityError(path + ":" + std::to_string(row.line) + ": mixed month or window in panel");
    }
    CountryAggregate agg;
    agg.country = row.fields[0];
    agg.male.active = num(4);
    agg.female.active = num(5);
    agg.male.population = num(6);
    agg.female.population = num(7);
    if (!(agg.male.population > 0) || !(agg.female.population > 0)) {
      throw IntegrityError(path + ":" + std::to_string(row.line) + ": non-positive population");
    }
    agg.male.ratio = agg.male.active / agg.male.population;
    agg.female.ratio = agg.female.active / agg.female.population;
    agg.accounts_total = num(8);
    agg.population_total = num(9);
    agg.mean_active_age = row.fields[10] == "nan" ? std::nan("") : num(10);
    panel.countries.push_back(std::move(agg));
  }
  std::sort(panel.countries.begin(), panel.countries.end(),
            [](const auto& a, const auto& b) { return a.country < b.country; });
  return panel;
}

}  // namespace gdivide
