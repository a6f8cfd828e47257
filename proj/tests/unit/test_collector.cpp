#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "gdivide/collector.hpp"
#include "gdivide/error.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/synthetic.hpp"
#include "test_support.hpp"

using namespace gdivide;
using namespace gdivide::collector;

namespace {

const Date kDate{2016, 3, 1};

AudienceCell cell(const std::string& country, Gender g, int age, std::int64_t total, std::int64_t dau) {
  return {country, g, AgeBin::single(age), kDate, total, dau};
}

/// Responses for every country x gender x bin in [13, 13 + bins).
SnapshotSet responses(const std::vector<std::string>& countries, int bins) {
  SnapshotSet s;
  std::int64_t v = 100;
  for (const auto& c : countries) {
    for (auto g : {Gender::kMale, Gender::kFemale}) {
      for (int a = 13; a < 13 + bins; ++a) {
        s.cells.push_back(cell(c, g, a, 2 * v, v));
        ++v;
      }
    }
  }
  validate(s);
  return s;
}

/// Throttled transport answering every query with a constant.
class CountingTransport final : public Transport {
 public:
  std::int64_t fetch(const SegmentQuery&) override {
    ++calls;
    return 7;
  }
  bool throttled() const override { return true; }
  SnapshotSource source() const override { return SnapshotSource::kLive; }
  int calls = 0;
};

CrawlSpec spec_for(std::vector<std::string> countries, int hi) {
  CrawlSpec s;
  s.countries = std::move(countries);
  s.window = {13, hi};
  s.date = kDate;
  s.label = "test";
  s.retry.backoff_seconds = 0.1;
  return s;
}

}  // namespace

TEST_SUITE("collector") {
  TEST_CASE("replay serves recorded values") {
    testing::TempDir dir;
    SnapshotSet s;
    s.cells.push_back(cell("US", Gender::kMale, 20, 500, 123));
    validate(s);
    write_replay_fixture(dir.str(), s, {.label = "fixture", .date = kDate});
    ReplayTransport t(dir.str());
    CHECK(t.fetch({"US", Gender::kMale, AgeBin::single(20), Metric::kDau, kDate}) == 123);
    CHECK(t.fetch({"US", Gender::kMale, AgeBin::single(20), Metric::kTotalAccounts, kDate}) == 500);
    CHECK_THROWS_AS(t.fetch({"US", Gender::kFemale, AgeBin::single(20), Metric::kDau, kDate}), TransportError);
    CHECK(t.countries() == std::vector<std::string>{"US"});
    CHECK_FALSE(t.throttled());
    CHECK(SegmentQuery{"US", Gender::kMale, AgeBin::single(20), Metric::kDau, kDate}.label() == "US/male/20/dau");
  }

  TEST_CASE("malformed fixtures are rejected") {
    testing::TempDir dir;
    CHECK_THROWS_AS(ReplayTransport(dir.str()), FileError);
    testing::write_file(dir.file("manifest.json"), "{not json");
    CHECK_THROWS_AS(ReplayTransport(dir.str()), IntegrityError);
    CHECK_THROWS_AS(parse_replay_manifest(R"({"label":"x","date":"2016-13-01"})"), IntegrityError);
    ReplayManifest m{.label = "x", .date = kDate, .unavailable = {"CN"}};
    m.transient_failures.push_back({"US", Gender::kFemale, AgeBin::open_ended(), Metric::kTotalAccounts, 2});
    const auto back = parse_replay_manifest(to_json(m));
    CHECK(back.unavailable == m.unavailable);
    REQUIRE(back.transient_failures.size() == 1);
    CHECK(back.transient_failures[0].age_bin == AgeBin::open_ended());
    CHECK(back.transient_failures[0].failures == 2);
  }

  TEST_CASE("retries follow the policy") {
    testing::TempDir dir;
    SnapshotSet s;
    s.cells.push_back(cell("US", Gender::kMale, 20, 500, 123));
    s.cells.push_back(cell("CN", Gender::kMale, 20, 500, 10));
    validate(s);
    ReplayManifest m{.label = "r", .date = kDate, .unavailable = {"CN"}};
    m.transient_failures.push_back({"US", Gender::kMale, AgeBin::single(20), Metric::kDau, 2});
    write_replay_fixture(dir.str(), s, m);

    ReplayTransport t(dir.str());
    FakeClock clock;
    const SegmentQuery q{"US", Gender::kMale, AgeBin::single(20), Metric::kDau, kDate};
    const auto r = fetch_segment(t, q, {.max_attempts = 3, .backoff_seconds = 0.5, .multiplier = 2}, &clock);
    CHECK(r.value == 123);
    CHECK(r.retries() == 2);
    CHECK(r.log.size() == 2);
    CHECK(clock.now() == doctest::Approx(1.5));
    CHECK(r.cell.dau == 123);

    ReplayTransport again(dir.str());
    CHECK_THROWS_AS(fetch_segment(again, q, {.max_attempts = 2}), TransportError);

    FakeClock untouched;
    CHECK_THROWS_AS(
        fetch_segment(t, {"CN", Gender::kMale, AgeBin::single(20), Metric::kDau, kDate}, {}, &untouched),
        UnavailableCountryError);
    CHECK(untouched.now() == 0);
  }

  TEST_CASE("crawl enumerates countries x genders x bins x metrics") {
    testing::TempDir dir;
    write_replay_fixture(dir.str(), responses({"DE", "US"}, 3), {.label = "c", .date = kDate});
    ReplayTransport t(dir.str());
    FakeClock clock;
    const auto out = crawl(t, spec_for({"US", "DE"}, 15), &clock);
    CHECK(out.snapshot.cells.size() == 12);
    CHECK(out.manifest.segments == 24);
    CHECK(out.manifest.requests == 24);
    CHECK(out.manifest.retries == 0);
    CHECK(out.manifest.elapsed_seconds == 0);
    CHECK(out.snapshot.metadata.source == SnapshotSource::kReplay);
    CHECK(out.snapshot.metadata.retrieval_label == "test");
    for (const auto& c : out.snapshot.cells) CHECK(c.total_accounts == 2 * c.dau);
  }

  TEST_CASE("throttled transports are paced to the rate limit") {
    CountingTransport t;
    FakeClock clock;
    // 5 countries x 2 genders x 5 bins x 2 metrics = 100 segments
    auto spec = spec_for({"AA", "AB", "AC", "AD", "AE"}, 17);
    spec.rate_limit = 5;
    const auto out = crawl(t, spec, &clock);
    CHECK(t.calls == 100);
    CHECK(out.manifest.elapsed_seconds >= 20.0 - 1e-9);
    CHECK(out.manifest.elapsed_seconds <= 20.0 + 1e-9);
    CHECK(out.snapshot.metadata.source == SnapshotSource::kLive);

    LiveTransport live("https://example.invalid");
    CHECK(live.throttled());
    CHECK_THROWS_AS(live.fetch({}), TransportError);
  }

  TEST_CASE("unavailable countries are listed and skipped") {
    testing::TempDir dir;
    write_replay_fixture(dir.str(), responses({"BR", "CN", "US"}, 2),
                         {.label = "u", .date = kDate, .unavailable = {"CN"}});
    ReplayTransport t(dir.str());
    FakeClock clock;
    const auto out = crawl(t, spec_for({"US", "CN", "BR"}, 14), &clock);
    CHECK(out.manifest.unavailable == std::vector<std::string>{"CN"});
    CHECK(out.snapshot.countries() == std::vector<std::string>{"BR", "US"});
    CHECK(out.manifest.segments == 16);
    CHECK(out.manifest.failures.empty());
  }

  TEST_CASE("failures drop their cell and abort above the threshold") {
    testing::TempDir dir;
    const auto set = responses({"US", "DE"}, 5);  // 2 x 2 x 5 x 2 = 40 segments
    ReplayManifest m{.label = "f", .date = kDate};
    for (int a = 13; a < 17; ++a) {
      m.transient_failures.push_back({"US", Gender::kMale, AgeBin::single(a), Metric::kDau, 5});
    }
    write_replay_fixture(dir.str(), set, m);
    FakeClock clock;
    {
      ReplayTransport t(dir.str());
      auto spec = spec_for({"US", "DE"}, 17);
      spec.retry.max_attempts = 3;
      const auto out = crawl(t, spec, &clock);  // 4 of 40 failed: exactly 10%
      CHECK(out.manifest.failures.size() == 4);
      CHECK(out.snapshot.cells.size() == 16);
      CHECK(out.manifest.retries == 8);
    }
    m.transient_failures.push_back({"DE", Gender::kFemale, AgeBin::single(13), Metric::kTotalAccounts, 5});
    write_replay_fixture(dir.str(), set, m);
    ReplayTransport t(dir.str());
    try {
      crawl(t, spec_for({"US", "DE"}, 17), &clock);
      FAIL("expected CrawlAborted");
    } catch (const CrawlAborted& e) {
      CHECK(e.manifest().failures.size() == 5);
      CHECK(e.manifest().segments == 40);
    }
  }

  TEST_CASE("crawls are deterministic") {
    testing::TempDir dir;
    ReplayManifest m{.label = "d", .date = kDate};
    m.transient_failures.push_back({"FR", Gender::kFemale, AgeBin::single(14), Metric::kDau, 1});
    write_replay_fixture(dir.str(), responses({"FR", "IT"}, 3), m);
    FakeClock c1, c2;
    ReplayTransport t1(dir.str()), t2(dir.str());
    const auto a = crawl(t1, spec_for({"FR", "IT"}, 15), &c1);
    const auto b = crawl(t2, spec_for({"IT", "FR"}, 15), &c2);
    CHECK(to_csv(a.snapshot) == to_csv(b.snapshot));
    CHECK(to_json(a.manifest) == to_json(b.manifest));
    CHECK(a.manifest.retries == 1);
  }

  TEST_CASE("crawl spec validation") {
    CountingTransport t;
    auto s = spec_for({"US"}, 20);
    s.metrics = {Metric::kDau};
    CHECK_THROWS_AS(crawl(t, s), ConfigError);
    s = spec_for({}, 20);
    CHECK_THROWS_AS(crawl(t, s), ConfigError);
    s = spec_for({"US"}, 20);
    s.rate_limit = 0;
    CHECK_THROWS_AS(crawl(t, s), ConfigError);
    CHECK(parse_metric("total_accounts") == Metric::kTotalAccounts);
    CHECK_FALSE(parse_metric("mau").has_value());
  }

  TEST_CASE("snapshot consistency") {
    synthetic::WorldOptions o;
    o.countries = 20;
    o.months = {"2016-03"};
    const auto w = synthetic::make_world(o);

    const auto same = snapshot_consistency(w.audience, w.audience, &w.census);
    CHECK(same.countries == 20);
    CHECK(same.census_normalized);
    CHECK(same.fgd.r == doctest::Approx(1.0));
    CHECK(same.dau_female.r == doctest::Approx(1.0));
    CHECK(same.only_in_a.empty());

    // Reassign each country's cells to another country: totals become unrelated.
    auto shuffled = w.audience;
    auto codes = w.audience.countries();
    auto perm = codes;
    Rng rng(3);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    std::map<std::string, std::string> to;
    for (std::size_t i = 0; i < codes.size(); ++i) to[codes[i]] = perm[i];
    for (auto& c : shuffled.cells) c.country = to[c.country];
    const auto mixed = snapshot_consistency(w.audience, shuffled, nullptr);
    CHECK_FALSE(mixed.census_normalized);
    CHECK(std::abs(mixed.fgd.r) < 0.6);
    CHECK(mixed.fgd.r < same.fgd.r);

    SnapshotSet other;
    other.cells.push_back(cell("ZZ", Gender::kMale, 20, 10, 5));
    other.cells.push_back(cell("ZZ", Gender::kFemale, 20, 10, 5));
    validate(other);
    CHECK_THROWS_AS(snapshot_consistency(w.audience, other), ComparisonError);

    const auto j = nlohmann::json::parse(to_json(same));
    CHECK(j.contains("fgd"));
  }
}
