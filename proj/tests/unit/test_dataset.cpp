#include <doctest.h>

#include "gdivide/dataset.hpp"
#include "gdivide/error.hpp"
#include "gdivide/synthetic.hpp"
#include "test_support.hpp"

using namespace gdivide;
using testing::TempDir;
using testing::write_file;

namespace {

const char* kAudience =
    "country,gender,age_bin,date,total_accounts,dau\n"
    "US,male,20,2015-07-01,1000,400\n"
    "US,female,20,2015-07-01,900,300\n"
    "US,male,65plus,2015-07-01,500,100\n"
    "US,male,20,2015-07-03,1010,410\n";

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("age bins") {
    CHECK(AgeBin::parse("13")->lower_age() == 13);
    CHECK(AgeBin::parse("65plus")->is_open_ended());
    CHECK(AgeBin::parse("65plus")->representative_age() == 65);
    CHECK_FALSE(AgeBin::parse("12"));
    CHECK_FALSE(AgeBin::parse("65"));
    CHECK_FALSE(AgeBin::parse("x"));
    CHECK(AgeBin::all().size() == 53);
    CHECK(AgeBin::all().back().to_string() == "65plus");
    CHECK_THROWS_AS(AgeBin::single(70), RangeError);
  }

  TEST_CASE("dates and codes") {
    CHECK(Date::parse("2015-07-31")->month_label() == "2015-07");
    CHECK_FALSE(Date::parse("2015-13-01"));
    CHECK_FALSE(Date::parse("2015-02-30"));
    CHECK_FALSE(Date::parse("15-07-01"));
    CHECK(is_iso_alpha2("US"));
    CHECK_FALSE(is_iso_alpha2("us"));
    CHECK_FALSE(is_iso_alpha2("USA"));
  }

  TEST_CASE("audience loads and records date coverage") {
    TempDir dir;
    const auto set = load_audience(write_file(dir.file("a.csv"), kAudience));
    CHECK(set.cells.size() == 4);
    CHECK(set.countries() == std::vector<std::string>{"US"});
    CHECK(set.months() == std::vector<std::string>{"2015-07"});
    CHECK(set.metadata.dates.size() == 2);
    CHECK_FALSE(set.metadata.contiguous);
  }

  TEST_CASE("malformed audience rows name line and field") {
    TempDir dir;
    auto load = [&](const std::string& row) {
      return load_audience(write_file(dir.file("bad.csv"), std::string("country,gender,age_bin,date,total_accounts,dau\n") +
                                                                "US,male,20,2015-07-01,10,5\n" + row + "\n"));
    };
    try {
      load("US,male,20,2015-07-02,10,-5");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.field() == "dau");
    }
    try {
      load("US,other,20,2015-07-02,10,5");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.field() == "gender");
    }
    try {
      load("US,male,20,2015-07-02,1x0,5");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.field() == "total_accounts");
    }
    CHECK_THROWS_AS(load("USA,male,20,2015-07-02,10,5"), ParseError);
    CHECK_THROWS_AS(load("US,male,20,2015-07-02,10,11"), IntegrityError);
    CHECK_THROWS_AS(load("US,male,20,2015-07-01,10,5"), IntegrityError);
    CHECK_THROWS_AS(load_audience(write_file(dir.file("h.csv"), "country,sex,age_bin,date,total_accounts,dau\n")),
                    IntegrityError);
    CHECK_THROWS_AS(load_audience(dir.file("none.csv")), FileError);
  }

  TEST_CASE("census aliases resolve names and unmapped rows are listed") {
    TempDir dir;
    const auto census = load_census(write_file(dir.file("c.csv"),
                                               "country,gender,age,population\n"
                                               "United States,male,20,100\n"
                                               "\"Korea, Rep.\",female,20,90\n"
                                               "Atlantis,male,20,5\n"
                                               "DE,female,20,70\n"));
    CHECK(census.population("US", Gender::kMale, 20) == 100);
    CHECK(census.population("KR", Gender::kFemale, 20) == 90);
    CHECK(census.population("DE", Gender::kFemale, 20) == 70);
    CHECK_FALSE(census.population("DE", Gender::kMale, 20));
    CHECK(census.unmapped_names == std::vector<std::string>{"Atlantis"});

    auto extra = AliasMap::defaults();
    extra.add("Atlantis", "AT");
    CHECK(extra.resolve("Atlantis") == "AT");
    const auto path = write_file(dir.file("aliases.csv"), "name,iso2\nAtlantis,AQ\n");
    CHECK(AliasMap::load(path).resolve("Atlantis") == "AQ");
    CHECK(AliasMap::load(path).resolve("United States") == "US");
  }

  TEST_CASE("indicator ranges and nulls") {
    TempDir dir;
    const std::string header = "country,year,eco,edu,health,pol,gdp_ppp,internet_penetration,quintile_ratio,population,pdi,idv,mas,uai\n";
    const auto t = load_indicators(write_file(dir.file("i.csv"), header + "US,2015,0.6,0.99,0.97,0.2,52000,0.75,8.4,3.2e8,40,91,62,46\n"
                                                                          "DE,2015,0.7,,0.97,0.3,45000,0.87,4.3,8.1e7,,,,\n"));
    CHECK(t.value("US", 2015, IndicatorField::kIdv) == 91);
    CHECK_FALSE(t.value("DE", 2015, IndicatorField::kEdu));
    CHECK_FALSE(t.value("DE", 2015, IndicatorField::kPdi));
    CHECK(t.years() == std::vector<int>{2015});
    CHECK_THROWS_AS(load_indicators(write_file(dir.file("r.csv"), header + "US,2015,1.6,0.99,0.97,0.2,1,0.7,8,3,,,,\n")),
                    RangeError);
    CHECK_THROWS_AS(load_indicators(write_file(dir.file("n.csv"), header + "US,2015,0.6,0.99,0.97,0.2,-1,0.7,8,3,,,,\n")),
                    RangeError);
    CHECK_THROWS_AS(load_indicators(write_file(dir.file("p.csv"), header + "US,2015,0.6,abc,0.97,0.2,1,0.7,8,3,,,,\n")),
                    ParseError);
  }

  TEST_CASE("serializers round-trip through the loaders") {
    synthetic::WorldOptions o;
    o.countries = 5;
    o.days_per_month = 2;
    const auto w = synthetic::make_world(o);
    TempDir dir;
    const auto a = load_audience(write_file(dir.file("a.csv"), to_csv(w.audience)));
    const auto c = load_census(write_file(dir.file("c.csv"), to_csv(w.census)));
    const auto i = load_indicators(write_file(dir.file("i.csv"), to_csv(w.indicators)));
    CHECK(to_csv(a) == to_csv(w.audience));
    CHECK(to_csv(c) == to_csv(w.census));
    CHECK(to_csv(i) == to_csv(w.indicators));
  }

  TEST_CASE("validate rejects broken snapshot sets") {
    SnapshotSet s;
    AudienceCell cell{"US", Gender::kMale, AgeBin::single(20), *Date::parse("2015-07-01"), 10, 5};
    s.cells = {cell, cell};
    CHECK_THROWS_AS(validate(s), IntegrityError);
    s.cells = {cell};
    s.cells[0].dau = 11;
    CHECK_THROWS_AS(validate(s), IntegrityError);
    s.cells[0].dau = -1;
    CHECK_THROWS(validate(s));
  }

  TEST_CASE("model requirements share one list with the coverage report") {
    CHECK(model_requirement("fgd").fields.size() == 7);
    CHECK(model_requirement("delta_fgd").needs_next_panel);
    CHECK(model_requirement("delta_eco_hofstede").fields.size() == 6);
    CHECK_THROWS_AS(model_requirement("nope"), ConfigError);

    synthetic::WorldOptions o;
    o.countries = 12;
    o.days_per_month = 1;
    o.hofstede_fraction = 0.5;
    const auto w = synthetic::make_world(o);
    const auto report = coverage_report(w.audience, w.census, w.indicators, 2015);
    CHECK(report.audience_countries.size() == 12);
    CHECK(report.no_normalization.empty());
    CHECK(report.model_n.at("fgd") == 12);
    CHECK(report.model_n.at("delta_eco") == 12);
    std::size_t with_hofstede = 0;
    for (const auto& c : report.audience_countries) {
      with_hofstede += meets_requirement(w.indicators, c, model_requirement("delta_eco_hofstede"), 2015);
    }
    CHECK(report.model_n.at("delta_eco_hofstede") == with_hofstede);
    CHECK(with_hofstede < 12);
    CHECK(to_json(report).find("\"model_n\"") != std::string::npos);
  }

  TEST_CASE("countries without census for both genders are not normalizable") {
    TempDir dir;
    const auto a = load_audience(write_file(dir.file("a.csv"), kAudience));
    const auto c = load_census(write_file(dir.file("c.csv"), "country,gender,age,population\nUS,male,20,100\n"));
    CHECK(normalizable_countries(a, c).empty());
    const auto report = coverage_report(a, c, IndicatorTable{}, 2015);
    CHECK(report.no_normalization == std::vector<std::string>{"US"});
  }
}
