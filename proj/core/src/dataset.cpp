#include "gdivide/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "gdivide/csv.hpp"
#include "gdivide/error.hpp"

namespace gdivide {

namespace {

std::vector<std::string> header_fields(std::string_view header) {
  return csv::split(header);
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

// Days since 1970-01-01 (civil calendar).
long days_from_civil(const Date& d) {
  const int y = d.year - (d.month <= 2 ? 1 : 0);
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned mp = static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9));
  const unsigned doy = (153 * mp + 2) / 5 + static_cast<unsigned>(d.day) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

std::string field_name(const std::vector<std::string>& header, std::size_t i) {
  return i < header.size() ? header[i] : "column " + std::to_string(i + 1);
}

void require_width(const csv::Table& t, const csv::Row& row) {
  if (row.fields.size() != t.header.size()) {
    throw ParseError(t.path, row.line, field_name(t.header, std::min(row.fields.size(), t.header.size() - 1)),
                     "expected " + std::to_string(t.header.size()) + " fields, got " +
                         std::to_string(row.fields.size()));
  }
}

std::int64_t parse_count(const csv::Table& t, const csv::Row& row, std::size_t col) {
  auto v = csv::parse_int(row.fields[col]);
  if (!v) throw ParseError(t.path, row.line, t.header[col], "not an integer: '" + row.fields[col] + "'");
  if (*v < 0) throw ParseError(t.path, row.line, t.header[col], "negative count");
  return *v;
}

Gender parse_gender_field(const csv::Table& t, const csv::Row& row, std::size_t col) {
  auto g = parse_gender(row.fields[col]);
  if (!g) throw ParseError(t.path, row.line, t.header[col], "expected male|female, got '" + row.fields[col] + "'");
  return *g;
}

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::string_view to_string(Gender g) { return g == Gender::kMale ? "male" : "female"; }

std::optional<Gender> parse_gender(std::string_view text) {
  if (text == "male") return Gender::kMale;
  if (text == "female") return Gender::kFemale;
  return std::nullopt;
}

AgeBin AgeBin::single(int age) {
  if (age < kFirst || age > kLastSingle) {
    throw RangeError("age bin " + std::to_string(age) + " outside 13..64");
  }
  return AgeBin(age);
}

std::optional<AgeBin> AgeBin::parse(std::string_view text) {
  if (text == "65plus") return open_ended();
  auto v = csv::parse_int(text);
  if (!v || *v < kFirst || *v > kLastSingle) return std::nullopt;
  return AgeBin(static_cast<int>(*v));
}

std::vector<AgeBin> AgeBin::all() {
  std::vector<AgeBin> bins;
  for (int a = kFirst; a <= kLastSingle; ++a) bins.push_back(AgeBin(a));
  bins.push_back(open_ended());
  return bins;
}

std::string AgeBin::to_string() const {
  return is_open_ended() ? std::string("65plus") : std::to_string(value_);
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = csv::parse_int(text.substr(0, 4));
  auto m = csv::parse_int(text.substr(5, 2));
  auto d = csv::parse_int(text.substr(8, 2));
  if (!y || !m || !d || *m < 1 || *m > 12) return std::nullopt;
  if (*d < 1 || *d > days_in_month(static_cast<int>(*y), static_cast<int>(*m))) return std::nullopt;
  return Date{static_cast<int>(*y), static_cast<int>(*m), static_cast<int>(*d)};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string Date::month_label() const { return to_string().substr(0, 7); }

bool is_iso_alpha2(std::string_view code) {
  return code.size() == 2 && code[0] >= 'A' && code[0] <= 'Z' && code[1] >= 'A' && code[1] <= 'Z';
}

std::vector<std::string> SnapshotSet::months() const {
  std::vector<std::string> out;
  for (const auto& d : metadata.dates) out.push_back(d.month_label());
  if (metadata.dates.empty()) {
    for (const auto& c : cells) out.push_back(c.date.month_label());
  }
  sort_unique(out);
  return out;
}

std::vector<std::string> SnapshotSet::countries() const {
  std::vector<std::string> out;
  for (const auto& c : cells) out.push_back(c.country);
  sort_unique(out);
  return out;
}

void validate(SnapshotSet& set) {
  std::set<std::tuple<std::string, Gender, AgeBin, Date>> keys;
  std::vector<Date> dates;
  for (const auto& c : set.cells) {
    if (!is_iso_alpha2(c.country)) throw IntegrityError("country '" + c.country + "' is not ISO alpha-2");
    if (c.total_accounts < 0 || c.dau < 0) throw IntegrityError("negative count for " + c.country);
    if (c.dau > c.total_accounts) {
      throw IntegrityError("dau > total_accounts for (" + c.country + ", " +
                           std::string(to_string(c.gender)) + ", " + c.age_bin.to_string() + ", " +
                           c.date.to_string() + ")");
    }
    if (!keys.emplace(c.country, c.gender, c.age_bin, c.date).second) {
      throw IntegrityError("duplicate key (" + c.country + ", " + std::string(to_string(c.gender)) +
                           ", " + c.age_bin.to_string() + ", " + c.date.to_string() + ")");
    }
    dates.push_back(c.date);
  }
  sort_unique(dates);
  set.metadata.contiguous = true;
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (days_from_civil(dates[i]) - days_from_civil(dates[i - 1]) != 1) set.metadata.contiguous = false;
  }
  set.metadata.dates = std::move(dates);
}

SnapshotSet load_audience(const std::string& path) {
  const auto table = csv::read(path);
  csv::require_header(table, header_fields(kAudienceHeader));
  SnapshotSet set;
  set.metadata.retrieval_label = path;
  set.metadata.source = SnapshotSource::kReplay;
  set.cells.reserve(table.rows.size());
  std::set<std::tuple<std::string, Gender, AgeBin, Date>> keys;
  for (const auto& row : table.rows) {
    require_width(table, row);
    AudienceCell cell;
    cell.country = row.fields[0];
    if (!is_iso_alpha2(cell.country)) {
      throw ParseError(path, row.line, "country", "expected ISO alpha-2 code, got '" + cell.country + "'");
    }
    cell.gender = parse_gender_field(table, row, 1);
    auto bin = AgeBin::parse(row.fields[2]);
    if (!bin) throw ParseError(path, row.line, "age_bin", "expected 13..64 or 65plus, got '" + row.fields[2] + "'");
    cell.age_bin = *bin;
    auto date = Date::parse(row.fields[3]);
    if (!date) throw ParseError(path, row.line, "date", "expected YYYY-MM-DD, got '" + row.fields[3] + "'");
    cell.date = *date;
    cell.total_accounts = parse_count(table, row, 4);
    cell.dau = parse_count(table, row, 5);
    if (cell.dau > cell.total_accounts) {
      throw IntegrityError(path + ":" + std::to_string(row.line) + ": dau > total_accounts");
    }
    if (!keys.emplace(cell.country, cell.gender, cell.age_bin, cell.date).second) {
      throw IntegrityError(path + ":" + std::to_string(row.line) + ": duplicate key (" + cell.country +
                           ", " + std::string(to_string(cell.gender)) + ", " + cell.age_bin.to_string() +
                           ", " + cell.date.to_string() + ")");
    }
    set.cells.push_back(std::move(cell));
  }
  validate(set);
  return set;
}

CensusTable::CensusTable(std::vector<CensusRow> rows) : rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (r.population < 0) throw IntegrityError("negative census population for " + r.country);
    if (!index_.emplace(std::make_tuple(r.country, r.gender, r.age), r.population).second) {
      throw IntegrityError("duplicate census key (" + r.country + ", " + std::string(to_string(r.gender)) +
                           ", " + std::to_string(r.age) + ")");
    }
  }
}

std::optional<std::int64_t> CensusTable::population(const std::string& country, Gender g, int age) const {
  auto it = index_.find(std::make_tuple(country, g, age));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool CensusTable::has_gender(const std::string& country, Gender g) const {
  auto it = index_.lower_bound(std::make_tuple(country, g, std::numeric_limits<int>::min()));
  return it != index_.end() && std::get<0>(it->first) == country && std::get<1>(it->first) == g;
}

std::vector<std::string> CensusTable::countries() const {
  std::vector<std::string> out;
  for (const auto& r : rows_) out.push_back(r.country);
  sort_unique(out);
  return out;
}

CensusTable load_census(const std::string& path, const AliasMap& aliases) {
  const auto table = csv::read(path);
  csv::require_header(table, header_fields(kCensusHeader));
  std::vector<CensusRow> rows;
  std::vector<std::string> unmapped;
  std::set<std::tuple<std::string, Gender, int>> keys;
  for (const auto& row : table.rows) {
    require_width(table, row);
    CensusRow r;
    r.gender = parse_gender_field(table, row, 1);
    auto age = csv::parse_int(row.fields[2]);
    if (!age || *age < 0 || *age > 150) throw ParseError(path, row.line, "age", "invalid age '" + row.fields[2] + "'");
    r.age = static_cast<int>(*age);
    r.population = parse_count(table, row, 3);
    auto code = aliases.resolve(row.fields[0]);
    if (!code) {
      unmapped.push_back(row.fields[0]);
      continue;
    }
    r.country = *code;
    if (!keys.emplace(r.country, r.gender, r.age).second) {
      throw IntegrityError(path + ":" + std::to_string(row.line) + ": duplicate census key (" + r.country +
                           ", " + std::string(to_string(r.gender)) + ", " + std::to_string(r.age) + ")");
    }
    rows.push_back(std::move(r));
  }
  CensusTable census(std::move(rows));
  sort_unique(unmapped);
  census.unmapped_names = std::move(unmapped);
  return census;
}

std::string_view to_string(IndicatorField f) {
  switch (f) {
    case IndicatorField::kEco: return "eco";
    case IndicatorField::kEdu: return "edu";
    case IndicatorField::kHealth: return "health";
    case IndicatorField::kPol: return "pol";
    case IndicatorField::kGdpPpp: return "gdp_ppp";
    case IndicatorField::kInternetPenetration: return "internet_penetration";
    case IndicatorField::kQuintileRatio: return "quintile_ratio";
    case IndicatorField::kPopulation: return "population";
    case IndicatorField::kPdi: return "pdi";
    case IndicatorField::kIdv: return "idv";
    case IndicatorField::kMas: return "mas";
    case IndicatorField::kUai: return "uai";
  }
  return "?";
}

std::optional<double> IndicatorRecord::get(IndicatorField f) const {
  switch (f) {
    case IndicatorField::kEco: return eco;
    case IndicatorField::kEdu: return edu;
    case IndicatorField::kHealth: return health;
    case IndicatorField::kPol: return pol;
    case IndicatorField::kGdpPpp: return gdp_ppp;
    case IndicatorField::kInternetPenetration: return internet_penetration;
    case IndicatorField::kQuintileRatio: return quintile_ratio;
    case IndicatorField::kPopulation: return population;
    case IndicatorField::kPdi: return pdi;
    case IndicatorField::kIdv: return idv;
    case IndicatorField::kMas: return mas;
    case IndicatorField::kUai: return uai;
  }
  return std::nullopt;
}

IndicatorTable::IndicatorTable(std::vector<IndicatorRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!index_.emplace(std::make_pair(r.country, r.year), i).second) {
      throw IntegrityError("duplicate indicator key (" + r.country + ", " + std::to_string(r.year) + ")");
    }
  }
}

const IndicatorRecord* IndicatorTable::find(const std::string& country, int year) const {
  auto it = index_.find(std::make_pair(country, year));
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::optional<double> IndicatorTable::value(const std::string& country, int year, IndicatorField f) const {
  const auto* r = find(country, year);
  return r ? r->get(f) : std::nullopt;
}

std::vector<int> IndicatorTable::years() const {
  std::vector<int> out;
  for (const auto& r : records_) out.push_back(r.year);
  sort_unique(out);
  return out;
}

IndicatorTable load_indicators(const std::string& path, const AliasMap& aliases) {
  const auto table = csv::read(path);
  csv::require_header(table, header_fields(kIndicatorHeader));
  std::vector<IndicatorRecord> records;
  std::vector<std::string> unmapped;
  std::set<std::pair<std::string, int>> keys;
  for (const auto& row : table.rows) {
    require_width(table, row);
    IndicatorRecord r;
    auto year = csv::parse_int(row.fields[1]);
    if (!year) throw ParseError(path, row.line, "year", "not an integer: '" + row.fields[1] + "'");
    r.year = static_cast<int>(*year);
    auto opt = [&](std::size_t col, double lo, double hi) -> std::optional<double> {
      const auto& text = row.fields[col];
      if (text.empty()) return std::nullopt;
      auto v = csv::parse_double(text);
      if (!v) throw ParseError(path, row.line, table.header[col], "not a number: '" + text + "'");
      if (*v < lo || *v > hi) {
        throw RangeError(path + ":" + std::to_string(row.line) + ": field '" + table.header[col] + "' value " +
                         text + " outside [" + csv::shortest(lo) + ", " + csv::shortest(hi) + "]");
      }
      return v;
    };
    constexpr double kInf = std::numeric_limits<double>::infinity();
    r.eco = opt(2, 0.0, 1.0);
    r.edu = opt(3, 0.0, 1.0);
    r.health = opt(4, 0.0, 1.0);
    r.pol = opt(5, 0.0, 1.0);
    r.gdp_ppp = opt(6, 0.0, kInf);
    r.internet_penetration = opt(7, 0.0, 1.0);
    r.quintile_ratio = opt(8, 0.0, kInf);
    r.population = opt(9, 0.0, kInf);
    r.pdi = opt(10, -kInf, kInf);
    r.idv = opt(11, -kInf, kInf);
    r.mas = opt(12, -kInf, kInf);
    r.uai = opt(13, -kInf, kInf);
    auto code = aliases.resolve(row.fields[0]);
    if (!code) {
      unmapped.push_back(row.fields[0]);
      continue;
    }
    r.country = *code;
    if (!keys.emplace(r.country, r.year).second) {
      throw IntegrityError(path + ":" + std::to_string(row.line) + ": duplicate indicator key (" + r.country +
                           ", " + std::to_string(r.year) + ")");
    }
    records.push_back(std::move(r));
  }
  IndicatorTable out(std::move(records));
  sort_unique(unmapped);
  out.unmapped_names = std::move(unmapped);
  return out;
}

AliasMap AliasMap::defaults() {
  AliasMap m;
  // Names seen in census and gender-gap releases that differ from ISO short names.
  static const std::pair<const char*, const char*> kBuiltin[] = {
      {"United States", "US"},         {"United States of America", "US"},
      {"United Kingdom", "GB"},        {"Russia", "RU"},
      {"Russian Federation", "RU"},    {"Korea, Rep.", "KR"},
      {"Korea, South", "KR"},          {"South Korea", "KR"},
      {"Iran, Islamic Rep.", "IR"},    {"Egypt, Arab Rep.", "EG"},
      {"Viet Nam", "VN"},              {"Vietnam", "VN"},
      {"Lao PDR", "LA"},               {"Laos", "LA"},
      {"Kyrgyz Republic", "KG"},       {"Kyrgyzstan", "KG"},
      {"Slovak Republic", "SK"},       {"Slovakia", "SK"},
      {"Czech Republic", "CZ"},        {"Czechia", "CZ"},
      {"Macedonia, FYR", "MK"},        {"North Macedonia", "MK"},
      {"Congo, Dem. Rep.", "CD"},      {"Congo (Kinshasa)", "CD"},
      {"Congo, Rep.", "CG"},           {"Congo (Brazzaville)", "CG"},
      {"Cote d'Ivoire", "CI"},         {"Gambia, The", "GM"},
      {"Bahamas, The", "BS"},          {"Yemen, Rep.", "YE"},
      {"Venezuela, RB", "VE"},         {"Bolivia", "BO"},
      {"Tanzania", "TZ"},              {"Moldova", "MD"},
      {"Brunei Darussalam", "BN"},     {"Cabo Verde", "CV"},
      {"Cape Verde", "CV"},            {"Burma", "MM"},
      {"Myanmar", "MM"},               {"Taiwan", "TW"},
      {"Hong Kong SAR, China", "HK"},  {"Hong Kong", "HK"},
      {"Macao SAR, China", "MO"},      {"Palestine", "PS"},
      {"West Bank and Gaza", "PS"},    {"Syria", "SY"},
      {"Swaziland", "SZ"},             {"Eswatini", "SZ"},
      {"Timor-Leste", "TL"},           {"East Timor", "TL"},
  };
  for (const auto& [name, code] : kBuiltin) m.add(name, code);
  return m;
}

AliasMap AliasMap::load(const std::string& path) {
  AliasMap m = defaults();
  const auto table = csv::read(path);
  csv::require_header(table, {"name", "iso2"});
  for (const auto& row : table.rows) {
    require_width(table, row);
    if (!is_iso_alpha2(row.fields[1])) {
      throw ParseError(path, row.line, "iso2", "expected ISO alpha-2 code, got '" + row.fields[1] + "'");
    }
    m.add(row.fields[0], row.fields[1]);
  }
  return m;
}

void AliasMap::add(std::string name, std::string iso2) { names_[std::move(name)] = std::move(iso2); }

std::optional<std::string> AliasMap::resolve(std::string_view name) const {
  if (is_iso_alpha2(name)) return std::string(name);
  auto it = names_.find(name);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

std::string to_csv(const SnapshotSet& set) {
  std::string out(kAudienceHeader);
  out += '\n';
  for (const auto& c : set.cells) {
    out += c.country + ',' + std::string(to_string(c.gender)) + ',' + c.age_bin.to_string() + ',' +
           c.date.to_string() + ',' + std::to_string(c.total_accounts) + ',' + std::to_string(c.dau) + '\n';
  }
  return out;
}

std::string to_csv(const CensusTable& census) {
  std::string out(kCensusHeader);
  out += '\n';
  for (const auto& r : census.rows()) {
    out += r.country + ',' + std::string(to_string(r.gender)) + ',' + std::to_string(r.age) + ',' +
           std::to_string(r.population) + '\n';
  }
  return out;
}

std::string to_csv(const IndicatorTable& indicators) {
  std::string out(kIndicatorHeader);
  out += '\n';
  auto cell = [](const std::optional<double>& v) { return v ? csv::shortest(*v) : std::string(); };
  for (const auto& r : indicators.records()) {
    out += r.country + ',' + std::to_string(r.year);
    for (auto f : {IndicatorField::kEco, IndicatorField::kEdu, IndicatorField::kHealth, IndicatorField::kPol,
                   IndicatorField::kGdpPpp, IndicatorField::kInternetPenetration, IndicatorField::kQuintileRatio,
                   IndicatorField::kPopulation, IndicatorField::kPdi, IndicatorField::kIdv, IndicatorField::kMas,
                   IndicatorField::kUai}) {
      out += ',' + cell(r.get(f));
    }
    out += '\n';
  }
  return out;
}

const std::vector<ModelRequirement>& model_requirements() {
  static const std::vector<ModelRequirement> kRequirements = [] {
    using F = IndicatorField;
    std::vector<ModelRequirement> reqs;
    const std::vector<std::pair<F, int>> equality = {{F::kEdu, 0}, {F::kHealth, 0}, {F::kEco, 0}, {F::kPol, 0}};
    auto fgd = equality;
    fgd.insert(fgd.end(), {{F::kInternetPenetration, 0}, {F::kQuintileRatio, 0}, {F::kPopulation, 0}});
    reqs.push_back({"fgd", fgd, false});
    auto fgd_gdp = equality;
    fgd_gdp.insert(fgd_gdp.end(), {{F::kGdpPpp, 0}, {F::kQuintileRatio, 0}, {F::kPopulation, 0}});
    reqs.push_back({"fgd_gdp", fgd_gdp, false});
    reqs.push_back({"network", {}, false});

    // Changes models: the target pair plus the variant's controls.
    struct Target {
      const char* name;
      std::vector<std::pair<F, int>> core;
      bool next_panel;
    };
    const Target targets[] = {
        {"delta_eco", {{F::kEco, 0}, {F::kEco, 1}}, false},
        {"delta_fgd", {{F::kEco, 0}}, true},
        {"delta_edu", {{F::kEdu, 0}, {F::kEdu, 1}}, false},
    };
    const std::pair<const char*, std::vector<std::pair<F, int>>> variants[] = {
        {"", {{F::kGdpPpp, 0}}},
        {"_full", {{F::kQuintileRatio, 0}, {F::kPopulation, 0}, {F::kGdpPpp, 0}}},
        {"_internet", {{F::kQuintileRatio, 0}, {F::kPopulation, 0}, {F::kInternetPenetration, 0}}},
        {"_equality", {{F::kGdpPpp, 0}, {F::kEdu, 0}, {F::kPol, 0}, {F::kHealth, 0}}},
        {"_hofstede", {{F::kPdi, 0}, {F::kIdv, 0}, {F::kMas, 0}, {F::kUai, 0}}},
    };
    for (const auto& t : targets) {
      for (const auto& [suffix, controls] : variants) {
        auto fields = t.core;
        for (const auto& c : controls) {
          if (std::find(fields.begin(), fields.end(), c) == fields.end()) fields.push_back(c);
        }
        reqs.push_back({std::string(t.name) + suffix, fields, t.next_panel});
      }
    }
    return reqs;
  }();
  return kRequirements;
}

const ModelRequirement& model_requirement(std::string_view model) {
  for (const auto& r : model_requirements()) {
    if (r.model == model) return r;
  }
  throw ConfigError("unknown model requirement '" + std::string(model) + "'");
}

bool meets_requirement(const IndicatorTable& indicators, const std::string& country, const ModelRequirement& req,
                       int base_year) {
  for (const auto& [field, offset] : req.fields) {
    if (!indicators.value(country, base_year + offset, field)) return false;
  }
  return true;
}

std::vector<std::string> normalizable_countries(const SnapshotSet& audience, const CensusTable& census) {
  std::set<std::pair<std::string, Gender>> audience_keys;
  for (const auto& c : audience.cells) audience_keys.emplace(c.country, c.gender);
  std::vector<std::string> out;
  for (const auto& country : audience.countries()) {
    if (audience_keys.count({country, Gender::kMale}) && audience_keys.count({country, Gender::kFemale}) &&
        census.has_gender(country, Gender::kMale) && census.has_gender(country, Gender::kFemale)) {
      out.push_back(country);
    }
  }
  return out;
}

ValidationReport coverage_report(const SnapshotSet& audience, const CensusTable& census,
                                 const IndicatorTable& indicators, int base_year) {
  ValidationReport report;
  report.base_year = base_year;
  report.audience_countries = audience.countries();
  const auto normalizable = normalizable_countries(audience, census);
  const std::set<std::string> ok(normalizable.begin(), normalizable.end());
  for (const auto& c : report.audience_countries) {
    if (!ok.count(c)) report.no_normalization.push_back(c);
  }
  using F = IndicatorField;
  for (auto f : {F::kEco, F::kEdu, F::kHealth, F::kPol, F::kGdpPpp, F::kInternetPenetration, F::kQuintileRatio,
                 F::kPopulation, F::kPdi, F::kIdv, F::kMas, F::kUai}) {
    auto& missing = report.missing_indicator[std::string(to_string(f))];
    for (const auto& c : normalizable) {
      if (!indicators.value(c, base_year, f)) missing.push_back(c);
    }
  }
  report.unmapped_names = census.unmapped_names;
  report.unmapped_names.insert(report.unmapped_names.end(), indicators.unmapped_names.begin(),
                               indicators.unmapped_names.end());
  sort_unique(report.unmapped_names);
  for (const auto& req : model_requirements()) {
    std::size_t n = 0;
    for (const auto& c : normalizable) {
      if (meets_requirement(indicators, c, req, base_year)) ++n;
    }
    report.model_n[req.model] = n;
  }
  return report;
}

std::string to_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["base_year"] = report.base_year;
  j["audience_countries"] = report.audience_countries;
  j["no_normalization"] = report.no_normalization;
  j["missing_indicator"] = report.missing_indicator;
  j["unmapped_names"] = report.unmapped_names;
  j["model_n"] = report.model_n;
  return j.dump(2);
}

}  // namespace gdivide
