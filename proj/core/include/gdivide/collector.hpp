#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gdivide/dataset.hpp"
#include "gdivide/error.hpp"
#include "gdivide/metrics.hpp"
#include "gdivide/stats/correlation.hpp"

namespace gdivide::collector {

enum class Metric { kTotalAccounts, kDau };

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view text);

struct SegmentQuery {
  std::string country;
  Gender gender = Gender::kMale;
  AgeBin age_bin = AgeBin::single(AgeBin::kFirst);
  Metric metric = Metric::kDau;
  Date date;

  /// "US/male/20/dau".
  std::string label() const;
};

/// Source of audience estimates. Implementations throw
/// UnavailableCountryError for countries the service does not serve and
/// TransportError for failures that may be retried.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::int64_t fetch(const SegmentQuery& query) = 0;
  /// Whether requests must be paced to the rate limit.
  virtual bool throttled() const = 0;
  virtual SnapshotSource source() const = 0;
};

/// Monotonic time source; injectable so pacing can be tested without waiting.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() = 0;  // seconds
  virtual void sleep_for(double seconds) = 0;
};

class SystemClock final : public Clock {
 public:
  double now() override;
  void sleep_for(double seconds) override;
};

/// Advances only when slept on.
class FakeClock final : public Clock {
 public:
  double now() override { return t_; }
  void sleep_for(double seconds) override {
    if (seconds > 0) t_ += seconds;
  }

 private:
  double t_ = 0;
};

/// Recorded-response fixture: `manifest.json` + `responses.csv`.
struct TransientFailure {
  std::string country;
  Gender gender = Gender::kMale;
  AgeBin age_bin = AgeBin::single(AgeBin::kFirst);
  Metric metric = Metric::kDau;
  int failures = 1;  // consecutive failures before the recorded value is served
};

struct ReplayManifest {
  std::string label;
  Date date;
  std::vector<std::string> unavailable;
  std::vector<TransientFailure> transient_failures;
  double latency_ms = 0;
};

std::string to_json(const ReplayManifest& manifest);
ReplayManifest parse_replay_manifest(const std::string& text, const std::string& origin = "manifest.json");

/// Writes a fixture directory serving `responses`. Creates `dir` if needed.
void write_replay_fixture(const std::string& dir, const SnapshotSet& responses, const ReplayManifest& manifest);

class ReplayTransport final : public Transport {
 public:
  /// Throws FileError / ParseError for a missing or malformed fixture.
  explicit ReplayTransport(const std::string& dir, Clock* clock = nullptr);

  std::int64_t fetch(const SegmentQuery& query) override;
  bool throttled() const override { return false; }
  SnapshotSource source() const override { return SnapshotSource::kReplay; }

  const ReplayManifest& manifest() const { return manifest_; }
  /// Countries with at least one recorded response, sorted.
  std::vector<std::string> countries() const;

 private:
  using Key = std::tuple<std::string, Gender, AgeBin, Date>;
  using FailureKey = std::tuple<std::string, Gender, AgeBin, Metric>;
  ReplayManifest manifest_;
  std::map<Key, AudienceCell> responses_;
  std::map<FailureKey, int> pending_failures_;
  Clock* clock_;
};

/// Placeholder for a live marketing-API client. No endpoint handling or
/// credentials are bundled; every fetch throws TransportError.
class LiveTransport : public Transport {
 public:
  explicit LiveTransport(std::string endpoint) : endpoint_(std::move(endpoint)) {}
  std::int64_t fetch(const SegmentQuery& query) override;
  bool throttled() const override { return true; }
  SnapshotSource source() const override { return SnapshotSource::kLive; }

 protected:
  std::string endpoint_;
};

struct RetryPolicy {
  int max_attempts = 3;
  double backoff_seconds = 0.5;
  double multiplier = 2.0;
};

struct SegmentResponse {
  SegmentQuery query;
  std::int64_t value = 0;
  AudienceCell cell;  // only the queried metric is filled
  int attempts = 1;
  std::vector<std::string> log;  // one line per failed attempt

  int retries() const { return attempts - 1; }
};

/// One query under the retry policy. Unavailable countries are not retried.
/// After `max_attempts` transient failures the last TransportError is rethrown.
SegmentResponse fetch_segment(Transport& transport, const SegmentQuery& query, const RetryPolicy& policy = {},
                              Clock* clock = nullptr);

struct CrawlSpec {
  std::vector<std::string> countries;
  AgeWindow window;
  std::vector<Metric> metrics{Metric::kTotalAccounts, Metric::kDau};
  Date date;
  std::string label;
  double rate_limit = 5.0;  // requests per second
  RetryPolicy retry;
  double max_failure_fraction = 0.10;

  void check() const;  // throws ConfigError
};

struct SegmentFailure {
  std::string segment;
  std::string message;
};

struct CrawlManifest {
  std::string label;
  Date date;
  std::size_t segments = 0;  // queries planned for served countries
  std::size_t requests = 0;  // attempts issued, retries included
  std::size_t retries = 0;
  std::vector<std::string> unavailable;
  std::vector<SegmentFailure> failures;
  double elapsed_seconds = 0;
};

std::string to_json(const CrawlManifest& manifest);

/// Raised when more than max_failure_fraction of segments fail.
class CrawlAborted : public TransportError {
 public:
  CrawlAborted(const std::string& message, CrawlManifest manifest)
      : TransportError(message), manifest_(std::move(manifest)) {}
  const CrawlManifest& manifest() const noexcept { return manifest_; }

 private:
  CrawlManifest manifest_;
};

struct CrawlResult {
  SnapshotSet snapshot;
  CrawlManifest manifest;
};

/// Enumerates country x gender x in-window age bin x metric. Throttled
/// transports get one request slot per 1/rate_limit seconds. Cells are
/// assembled by key, so the result is independent of request order; the
/// snapshot passes dataset validation.
CrawlResult crawl(Transport& transport, const CrawlSpec& spec, Clock* clock = nullptr);

struct ConsistencyReport {
  std::size_t countries = 0;
  bool census_normalized = false;
  stats::Correlation fgd;
  stats::Correlation dau_male;
  stats::Correlation dau_female;
  stats::Correlation accounts_male;
  stats::Correlation accounts_female;
  std::vector<std::string> only_in_a;
  std::vector<std::string> only_in_b;
};

/// Pearson correlations between two snapshots of the same population:
/// per country and gender, median over dates of each in-window segment,
/// summed over bins. FGD uses census ratios when `census` is given and
/// raw DAU ratios otherwise. Throws ComparisonError for fewer than three
/// shared countries.
ConsistencyReport snapshot_consistency(const SnapshotSet& a, const SnapshotSet& b,
                                       const CensusTable* census = nullptr, AgeWindow window = {});

std::string to_json(const ConsistencyReport& report);

}  // namespace gdivide::collector
