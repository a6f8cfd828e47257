#include "gdivide/collector.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gdivide/csv.hpp"

namespace gdivide::collector {

namespace {
using json = nlohmann::ordered_json;
}

std::string_view to_string(Metric m) { return m == Metric::kDau ? "dau" : "total_accounts"; }

std::optional<Metric> parse_metric(std::string_view text) {
  if (text == "dau") return Metric::kDau;
  if (text == "total_accounts") return Metric::kTotalAccounts;
  return std::nullopt;
}

std::string SegmentQuery::label() const {
  return country + "/" + std::string(gdivide::to_string(gender)) + "/" + age_bin.to_string() + "/" +
         std::string(to_string(metric));
}

double SystemClock::now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_for(double seconds) {
  if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

// ---------------------------------------------------------------------------
// Replay fixtures

std::string to_json(const ReplayManifest& m) {
  json j;
  j["label"] = m.label;
  j["date"] = m.date.to_string();
  j["unavailable"] = m.unavailable;
  auto& tf = j["transient_failures"] = json::array();
  for (const auto& f : m.transient_failures) {
    tf.push_back({{"country", f.country},
                  {"gender", std::string(gdivide::to_string(f.gender))},
                  {"age_bin", f.age_bin.to_string()},
                  {"metric", std::string(to_string(f.metric))},
                  {"failures", f.failures}});
  }
  j["latency_ms"] = m.latency_ms;
  return j.dump(2) + "\n";
}

ReplayManifest parse_replay_manifest(const std::string& text, const std::string& origin) {
  auto fail = [&](const std::string& what) { return IntegrityError(origin + ": " + what); };
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw fail("expected a JSON object");
  ReplayManifest m;
  try {
    m.label = j.value("label", std::string());
    const auto date = Date::parse(j.at("date").get<std::string>());
    if (!date) throw fail("date must be YYYY-MM-DD");
    m.date = *date;
    for (const auto& c : j.value("unavailable", json::array())) m.unavailable.push_back(c.get<std::string>());
    for (const auto& f : j.value("transient_failures", json::array())) {
      TransientFailure t;
      t.country = f.at("country").get<std::string>();
      const auto g = parse_gender(f.at("gender").get<std::string>());
      const auto bin = AgeBin::parse(f.at("age_bin").get<std::string>());
      const auto metric = parse_metric(f.at("metric").get<std::string>());
      if (!g || !bin || !metric) throw fail("bad transient_failures entry for " + t.country);
      t.gender = *g;
      t.age_bin = *bin;
      t.metric = *metric;
      t.failures = f.value("failures", 1);
      if (t.failures < 0) throw fail("failures must be >= 0");
      m.transient_failures.push_back(std::move(t));
    }
    m.latency_ms = j.value("latency_ms", 0.0);
  } catch (const json::exception& e) {
    throw fail(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void write_replay_fixture(const std::string& dir, const SnapshotSet& responses, const ReplayManifest& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FileError("cannot create " + dir + ": " + ec.message());
  csv::write_atomic(dir + "/manifest.json", to_json(manifest));
  csv::write_atomic(dir + "/responses.csv", to_csv(responses));
}

ReplayTransport::ReplayTransport(const std::string& dir, Clock* clock) : clock_(clock) {
  const std::string manifest_path = dir + "/manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw FileError("cannot open " + manifest_path);
  std::ostringstream text;
  text << in.rdbuf();
  manifest_ = parse_replay_manifest(text.str(), manifest_path);
  const auto set = load_audience(dir + "/responses.csv");
  for (const auto& c : set.cells) responses_.emplace(Key{c.country, c.gender, c.age_bin, c.date}, c);
  for (const auto& f : manifest_.transient_failures) {
    pending_failures_[{f.country, f.gender, f.age_bin, f.metric}] += f.failures;
  }
}

std::vector<std::string> ReplayTransport::countries() const {
  std::set<std::string> out;
  for (const auto& [key, cell] : responses_) out.insert(cell.country);
  return {out.begin(), out.end()};
}

std::int64_t ReplayTransport::fetch(const SegmentQuery& q) {
  if (clock_ && manifest_.latency_ms > 0) clock_->sleep_for(manifest_.latency_ms / 1000.0);
  if (std::find(manifest_.unavailable.begin(), manifest_.unavailable.end(), q.country) != manifest_.unavailable.end()) {
    throw UnavailableCountryError("audience estimates are not served for " + q.country);
  }
  auto pending = pending_failures_.find({q.country, q.gender, q.age_bin, q.metric});
  if (pending != pending_failures_.end() && pending->second > 0) {
    --pending->second;
    throw TransportError("transient failure for " + q.label());
  }
  auto it = responses_.find({q.country, q.gender, q.age_bin, q.date});
  if (it == responses_.end()) throw TransportError("no recorded response for " + q.label() + " on " + q.date.to_string());
  return q.metric == Metric::kDau ? it->second.dau : it->second.total_accounts;
}

std::int64_t LiveTransport::fetch(const SegmentQuery& query) {
  throw TransportError("live transport for '" + endpoint_ + "' has no client configured (" + query.label() + ")");
}

// ---------------------------------------------------------------------------
// Fetching and crawling

SegmentResponse fetch_segment(Transport& transport, const SegmentQuery& query, const RetryPolicy& policy,
                              Clock* clock) {
  if (policy.max_attempts < 1) throw ConfigError("retry policy needs max_attempts >= 1");
  SegmentResponse out;
  out.query = query;
  double backoff = policy.backoff_seconds;
  for (int attempt = 1;; ++attempt) {
    out.attempts = attempt;
    try {
      out.value = transport.fetch(query);
      break;
    } catch (const UnavailableCountryError&) {
      throw;
    } catch (const TransportError& e) {
      out.log.push_back("attempt " + std::to_string(attempt) + " failed: " + e.what());
      if (attempt >= policy.max_attempts) throw;
      if (clock) clock->sleep_for(backoff);
      backoff *= policy.multiplier;
    }
  }
  out.cell.country = query.country;
  out.cell.gender = query.gender;
  out.cell.age_bin = query.age_bin;
  out.cell.date = query.date;
  (query.metric == Metric::kDau ? out.cell.dau : out.cell.total_accounts) = out.value;
  return out;
}

void CrawlSpec::check() const {
  if (!(rate_limit > 0)) throw ConfigError("rate limit must be > 0");
  if (retry.max_attempts < 1) throw ConfigError("retry attempts must be >= 1");
  if (retry.backoff_seconds < 0 || retry.multiplier < 1) throw ConfigError("retry backoff must be >= 0, multiplier >= 1");
  if (countries.empty()) throw ConfigError("crawl needs at least one country");
  if (std::find(metrics.begin(), metrics.end(), Metric::kDau) == metrics.end() ||
      std::find(metrics.begin(), metrics.end(), Metric::kTotalAccounts) == metrics.end()) {
    throw ConfigError("crawl needs both total_accounts and dau to form audience cells");
  }
  if (!(max_failure_fraction >= 0 && max_failure_fraction <= 1)) throw ConfigError("max failure fraction outside [0,1]");
  window.check();
}

std::string to_json(const CrawlManifest& m) {
  json j;
  j["label"] = m.label;
  j["date"] = m.date.to_string();
  j["segments"] = m.segments;
  j["requests"] = m.requests;
  j["retries"] = m.retries;
  j["unavailable"] = m.unavailable;
  auto& f = j["failures"] = json::array();
  for (const auto& s : m.failures) f.push_back({{"segment", s.segment}, {"message", s.message}});
  j["elapsed_seconds"] = m.elapsed_seconds;
  return j.dump(2) + "\n";
}

CrawlResult crawl(Transport& transport, const CrawlSpec& spec, Clock* clock) {
  spec.check();
  SystemClock system_clock;
  if (!clock) clock = &system_clock;

  std::vector<AgeBin> bins;
  for (const auto& b : AgeBin::all()) {
    if (spec.window.contains(b)) bins.push_back(b);
  }
  std::vector<std::string> countries = spec.countries;
  std::sort(countries.begin(), countries.end());
  countries.erase(std::unique(countries.begin(), countries.end()), countries.end());

  CrawlManifest manifest;
  manifest.label = spec.label;
  manifest.date = spec.date;
  const double interval = 1.0 / spec.rate_limit;
  const double start = clock->now();
  double next_slot = start;

  using Key = std::tuple<std::string, Gender, AgeBin>;
  std::map<Key, AudienceCell> cells;
  std::set<Key> failed;

  // Each attempt occupies one request slot on throttled transports.
  struct Pacer : Transport {
    Transport& inner;
    Clock& clock;
    double interval;
    double& next_slot;
    std::size_t& requests;
    Pacer(Transport& t, Clock& c, double i, double& n, std::size_t& r)
        : inner(t), clock(c), interval(i), next_slot(n), requests(r) {}
    std::int64_t fetch(const SegmentQuery& q) override {
      if (inner.throttled()) {
        const double now = clock.now();
        if (next_slot > now) clock.sleep_for(next_slot - now);
        next_slot = std::max(next_slot, now) + interval;
      }
      ++requests;
      return inner.fetch(q);
    }
    bool throttled() const override { return inner.throttled(); }
    SnapshotSource source() const override { return inner.source(); }
  } pacer(transport, *clock, interval, next_slot, manifest.requests);

  for (const auto& country : countries) {
    const std::size_t segments_before = manifest.segments;
    const std::size_t failures_before = manifest.failures.size();
    bool unavailable = false;
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      for (const auto& bin : bins) {
        for (Metric metric : spec.metrics) {
          if (unavailable) break;
          SegmentQuery q{country, g, bin, metric, spec.date};
          ++manifest.segments;
          try {
            auto r = fetch_segment(pacer, q, spec.retry, clock);
            manifest.retries += static_cast<std::size_t>(r.retries());
            auto [it, fresh] = cells.try_emplace(Key{country, g, bin}, r.cell);
            if (!fresh) (metric == Metric::kDau ? it->second.dau : it->second.total_accounts) = r.value;
          } catch (const UnavailableCountryError&) {
            unavailable = true;
          } catch (const TransportError& e) {
            manifest.retries += static_cast<std::size_t>(spec.retry.max_attempts - 1);
            manifest.failures.push_back({q.label(), e.what()});
            failed.insert(Key{country, g, bin});
          }
        }
      }
    }
    if (unavailable) {
      manifest.unavailable.push_back(country);
      std::erase_if(cells, [&](const auto& kv) { return std::get<0>(kv.first) == country; });
      std::erase_if(failed, [&](const auto& k) { return std::get<0>(k) == country; });
      manifest.failures.resize(failures_before);
      manifest.segments = segments_before;
    }
  }
  if (transport.throttled() && next_slot > clock->now()) clock->sleep_for(next_slot - clock->now());
  manifest.elapsed_seconds = clock->now() - start;

  const std::size_t failed_segments = manifest.failures.size();
  if (manifest.segments > 0 &&
      static_cast<double>(failed_segments) > spec.max_failure_fraction * static_cast<double>(manifest.segments)) {
    throw CrawlAborted("crawl aborted: " + std::to_string(failed_segments) + " of " +
                           std::to_string(manifest.segments) + " segments failed",
                       std::move(manifest));
  }

  CrawlResult out;
  for (auto& [key, cell] : cells) {
    if (!failed.count(key)) out.snapshot.cells.push_back(std::move(cell));
  }
  out.snapshot.metadata.retrieval_label = spec.label;
  out.snapshot.metadata.source = transport.source();
  validate(out.snapshot);
  out.manifest = std::move(manifest);
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot consistency

namespace {

struct GenderTotals {
  double dau = 0;
  double accounts = 0;
};

using Totals = std::map<std::string, std::array<GenderTotals, 2>>;

/// Per country and gender: median over dates of each in-window bin, summed.
Totals totals(const SnapshotSet& set, AgeWindow window) {
  std::map<std::tuple<std::string, Gender, AgeBin>, std::pair<std::vector<double>, std::vector<double>>> series;
  for (const auto& c : set.cells) {
    if (!window.contains(c.age_bin)) continue;
    auto& s = series[{c.country, c.gender, c.age_bin}];
    s.first.push_back(static_cast<double>(c.dau));
    s.second.push_back(static_cast<double>(c.total_accounts));
  }
  Totals out;
  std::map<std::string, std::array<bool, 2>> seen;
  for (auto& [key, s] : series) {
    const auto& [country, g, bin] = key;
    auto& t = out[country][static_cast<int>(g)];
    t.dau += median_of(std::move(s.first));
    t.accounts += median_of(std::move(s.second));
    seen[country][static_cast<int>(g)] = true;
  }
  for (const auto& [country, flags] : seen) {
    if (!flags[0] || !flags[1]) out.erase(country);
  }
  return out;
}

double census_total(const CensusTable& census, const std::string& country, Gender g, AgeWindow w) {
  double sum = 0;
  for (int age = w.lo; age <= w.hi; ++age) sum += static_cast<double>(census.population(country, g, age).value_or(0));
  return sum;
}

}  // namespace

ConsistencyReport snapshot_consistency(const SnapshotSet& a, const SnapshotSet& b, const CensusTable* census,
                                       AgeWindow window) {
  window.check();
  const auto ta = totals(a, window);
  const auto tb = totals(b, window);
  ConsistencyReport report;
  std::vector<std::string> shared;
  for (const auto& [c, v] : ta) {
    if (tb.count(c)) {
      shared.push_back(c);
    } else {
      report.only_in_a.push_back(c);
    }
  }
  for (const auto& [c, v] : tb) {
    if (!ta.count(c)) report.only_in_b.push_back(c);
  }
  report.census_normalized = census != nullptr;

  std::vector<double> fa, fb, dma, dmb, dfa, dfb, ama, amb, afa, afb;
  auto log_ratio = [&](const std::string& c, const std::array<GenderTotals, 2>& t) {
    double num = t[0].dau, den = t[1].dau;
    if (census) {
      num /= census_total(*census, c, Gender::kMale, window);
      den /= census_total(*census, c, Gender::kFemale, window);
    }
    return std::log(num / den);
  };
  for (const auto& c : shared) {
    const auto& x = ta.at(c);
    const auto& y = tb.at(c);
    const double ga = log_ratio(c, x), gb = log_ratio(c, y);
    if (std::isfinite(ga) && std::isfinite(gb)) {
      fa.push_back(ga);
      fb.push_back(gb);
    }
    dma.push_back(x[0].dau);
    dmb.push_back(y[0].dau);
    dfa.push_back(x[1].dau);
    dfb.push_back(y[1].dau);
    ama.push_back(x[0].accounts);
    amb.push_back(y[0].accounts);
    afa.push_back(x[1].accounts);
    afb.push_back(y[1].accounts);
  }
  if (shared.size() < 3 || fa.size() < 3) {
    throw ComparisonError("snapshot comparison needs at least 3 shared countries with both genders, got " +
                          std::to_string(shared.size()));
  }
  report.countries = shared.size();
  report.fgd = stats::pearson(fa, fb);
  report.dau_male = stats::pearson(dma, dmb);
  report.dau_female = stats::pearson(dfa, dfb);
  report.accounts_male = stats::pearson(ama, amb);
  report.accounts_female = stats::pearson(afa, afb);
  return report;
}

std::string to_json(const ConsistencyReport& r) {
  auto corr = [](const stats::Correlation& c) {
    return json{{"r", c.r}, {"ci", {c.ci_low, c.ci_high}}, {"p", c.p}, {"n", c.n}};
  };
  json j;
  j["countries"] = r.countries;
  j["census_normalized"] = r.census_normalized;
  j["fgd"] = corr(r.fgd);
  j["dau_male"] = corr(r.dau_male);
  j["dau_female"] = corr(r.dau_female);
  j["accounts_male"] = corr(r.accounts_male);
  j["accounts_female"] = corr(r.accounts_female);
  j["only_in_a"] = r.only_in_a;
  j["only_in_b"] = r.only_in_b;
  return j.dump(2) + "\n";
}

}  // namespace gdivide::collector
