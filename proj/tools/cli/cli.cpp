#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gdivide/collector.hpp"
#include "gdivide/csv.hpp"
#include "gdivide/dataset.hpp"
#include "gdivide/error.hpp"
#include "gdivide/metrics.hpp"
#include "gdivide/models.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/stats/correlation.hpp"

#ifndef GDIVIDE_VERSION
#define GDIVIDE_VERSION "0.0.0"
#endif

namespace gdivide::cli {

namespace {

using json = nlohmann::ordered_json;

/// Options of one subcommand. Every option has a config-file key; values from
/// `--config` apply only to options not given on the command line.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& flags, const std::string& key, T& value, const std::string& help,
                   bool recorded = true) {
    auto* opt = app_->add_option(flags, value, help);
    keys_.push_back(key);
    appliers_.push_back([opt, key, &value](const json& config) {
      if (opt->count() == 0 && config.contains(key)) value = config.at(key).get<T>();
    });
    if (recorded) dumpers_.push_back([key, &value](json& j) { j[key] = value; });
    return opt;
  }

  CLI::App* app() const { return app_; }

  void apply(const json& config) const {
    for (const auto& known : config.items()) {
      if (known.key() == "seed") continue;
      bool found = false;
      for (const auto& k : keys()) found = found || k == known.key();
      if (!found) throw ConfigError("unknown config key '" + known.key() + "'");
    }
    for (const auto& a : appliers_) {
      try {
        a(config);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
      }
    }
  }

  json resolved() const {
    json j = json::object();
    for (const auto& d : dumpers_) d(j);
    return j;
  }

  void register_key(std::string key) { extra_keys_.push_back(std::move(key)); }

 private:
  std::vector<std::string> keys() const {
    std::vector<std::string> out = keys_;
    out.insert(out.end(), extra_keys_.begin(), extra_keys_.end());
    return out;
  }

  CLI::App* app_;
  std::vector<std::function<void(const json&)>> appliers_;
  std::vector<std::function<void(json&)>> dumpers_;
  std::vector<std::string> keys_;
  std::vector<std::string> extra_keys_;
};

/// Flags shared by every subcommand.
struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  bool seed_from_config = false;
  unsigned threads = 0;

  bool has_seed() const { return seed_from_config || (seed_opt && seed_opt->count() > 0); }
};

struct DataFlags {
  std::string data;
  std::string audience;
  std::string census;
  std::string indicators;
  std::string aliases;
  std::string month = "2015-07";
  int age_lo = 13;
  int age_hi = 65;

  std::string path(const std::string& explicit_path, const char* name) const {
    if (!explicit_path.empty()) return explicit_path;
    if (!data.empty()) return data + "/" + name;
    throw ConfigError(std::string("missing input: pass --") + std::string(name).substr(0, std::string(name).find('.')) +
                      " or --data");
  }
  AgeWindow window() const {
    AgeWindow w{age_lo, age_hi};
    w.check();
    return w;
  }
};

void add_common(Options& o, Common& c) {
  o.app()->add_option("--config", c.config, "JSON file mirroring the flags; flags win");
  o.add("--out", "out", c.out, "output directory", false);
  c.seed_opt = o.app()->add_option("--seed", c.seed, "master seed");
  o.register_key("seed");
  o.add("--threads", "threads", c.threads, "worker threads (0: hardware)", false);
}

void add_data(Options& o, DataFlags& d, bool with_month = true) {
  o.add("--data", "data", d.data, "directory holding audience.csv, census.csv, indicators.csv");
  o.add("--audience", "audience", d.audience, "audience snapshot CSV");
  o.add("--census", "census", d.census, "census CSV");
  o.add("--indicators", "indicators", d.indicators, "indicator CSV");
  o.add("--aliases", "aliases", d.aliases, "country alias CSV (name,iso2)");
  if (with_month) o.add("--month", "month", d.month, "panel month YYYY-MM");
  o.add("--age-lo", "age_lo", d.age_lo, "lower age of the window");
  o.add("--age-hi", "age_hi", d.age_hi, "upper age of the window (65 includes 65plus)");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open config " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config " + path + " must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

void resolve_common(const Options& o, Common& c) {
  const json config = load_config(c.config);
  o.apply(config);
  if (c.seed_opt->count() == 0 && config.contains("seed")) {
    try {
      c.seed = config.at("seed").get<std::uint64_t>();
    } catch (const json::exception&) {
      throw ConfigError("config seed must be a non-negative integer");
    }
    c.seed_from_config = true;
  }
  if (c.out.empty()) throw ConfigError("--out is required");
  if (c.threads > 0) set_default_threads(c.threads);
}

void require_seed(const Common& c, const std::string& why) {
  if (!c.has_seed()) throw ConfigError("--seed is required: " + why);
}

/// Input files read by a command, digested for provenance.
class Provenance {
 public:
  void input(const std::string& path) {
    if (std::find(paths_.begin(), paths_.end(), path) == paths_.end()) paths_.push_back(path);
  }

  json to_json(const std::string& command, const json& config, const Common& common) const {
    json j;
    j["tool"] = "gdivide";
    j["version"] = GDIVIDE_VERSION;
    j["command"] = command;
    j["seed"] = common.has_seed() ? json(common.seed) : json(nullptr);
    j["config"] = config;
    auto& inputs = j["inputs"] = json::array();
    for (const auto& p : paths_) inputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    return j;
  }

 private:
  std::vector<std::string> paths_;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FileError("cannot create output directory " + dir + ": " + ec.message());
}

void write(const std::string& dir, const std::string& name, const std::string& contents) {
  csv::write_atomic(dir + "/" + name, contents);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse_json(const std::string& text) { return json::parse(text); }

struct Loaded {
  SnapshotSet audience;
  CensusTable census;
  IndicatorTable indicators;
  bool has_indicators = false;
};

Loaded load_inputs(const DataFlags& d, Provenance& prov, bool need_indicators) {
  Loaded l;
  const AliasMap aliases = d.aliases.empty() ? AliasMap::defaults() : AliasMap::load(d.aliases);
  if (!d.aliases.empty()) prov.input(d.aliases);
  const auto audience = d.path(d.audience, "audience.csv");
  const auto census = d.path(d.census, "census.csv");
  prov.input(audience);
  prov.input(census);
  l.audience = load_audience(audience);
  l.census = load_census(census, aliases);
  if (need_indicators) {
    const auto indicators = d.path(d.indicators, "indicators.csv");
    prov.input(indicators);
    l.indicators = load_indicators(indicators, aliases);
    l.has_indicators = true;
  }
  return l;
}

int month_year(const std::string& month) {
  if (!Date::parse(month + "-01")) throw ConfigError("month must be YYYY-MM, got '" + month + "'");
  return std::stoi(month.substr(0, 4));
}

// ---------------------------------------------------------------------------
// ingest

struct IngestCmd {
  Common common;
  DataFlags data;
  int base_year = 0;
};

void cmd_ingest(const IngestCmd& c, const Options& o) {
  Provenance prov;
  auto in = load_inputs(c.data, prov, true);
  ensure_dir(c.common.out);
  const int base_year = c.base_year > 0 ? c.base_year : month_year(c.data.month);
  const auto window = c.data.window();

  write(c.common.out, "audience.csv", to_csv(in.audience));
  write(c.common.out, "census.csv", to_csv(in.census));
  write(c.common.out, "indicators.csv", to_csv(in.indicators));

  json panels = json::array();
  for (const auto& month : in.audience.months()) {
    try {
      const auto panel = build_panel(in.audience, in.census, month, window);
      write(c.common.out, "panel-" + month + ".csv", panel_csv(panel));
      json excluded = json::array();
      for (const auto& e : panel.excluded) excluded.push_back({{"country", e.country}, {"reason", e.reason}});
      panels.push_back({{"month", month}, {"countries", panel.countries.size()}, {"excluded", excluded}});
    } catch (const ConfigError& e) {
      panels.push_back({{"month", month}, {"skipped", e.what()}});
    }
  }
  json report;
  report["provenance"] = prov.to_json("ingest", o.resolved(), c.common);
  report["snapshot"] = {{"cells", in.audience.cells.size()},
                        {"countries", in.audience.countries().size()},
                        {"months", in.audience.months()},
                        {"contiguous", in.audience.metadata.contiguous}};
  report["coverage"] = parse_json(to_json(coverage_report(in.audience, in.census, in.indicators, base_year)));
  report["panels"] = panels;
  write(c.common.out, "ingest.json", dump(report));
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsCmd {
  Common common;
  DataFlags data;
};

void cmd_metrics(const MetricsCmd& c, const Options& o) {
  Provenance prov;
  auto in = load_inputs(c.data, prov, false);
  const auto panel = build_panel(in.audience, in.census, c.data.month, c.data.window());
  ensure_dir(c.common.out);
  write(c.common.out, "fgd.csv", fgd_csv(panel));
  json report;
  report["provenance"] = prov.to_json("metrics", o.resolved(), c.common);
  report["month"] = panel.month;
  report["window"] = panel.window.label();
  report["countries"] = panel.countries.size();
  json undefined = json::array(), above_one = json::array(), excluded = json::array();
  for (const auto& m : compute_metrics(panel)) {
    if (!m.fgd) undefined.push_back(m.country);
    if (m.penetration_above_one) above_one.push_back(m.country);
  }
  for (const auto& e : panel.excluded) excluded.push_back({{"country", e.country}, {"reason", e.reason}});
  report["fgd_undefined"] = undefined;
  report["penetration_above_one"] = above_one;
  report["excluded"] = excluded;
  write(c.common.out, "metrics.json", dump(report));
}

// ---------------------------------------------------------------------------
// fit

struct FitCmd {
  Common common;
  DataFlags data;
  std::string model = "fgd";
  std::string variant = "default";
  std::vector<std::string> estimators{"ols"};
  std::string by = "none";
  std::string month_next = "2016-07";
  std::size_t bootstrap = 0;
  std::string hc = "hc3";
  int bayes_iterations = 10000;
  int bayes_burn_in = 1000;
  int base_year = 0;
};

stats::HcType parse_hc(const std::string& s) {
  if (s == "hc0") return stats::HcType::kHc0;
  if (s == "hc1") return stats::HcType::kHc1;
  if (s == "hc2") return stats::HcType::kHc2;
  if (s == "hc3") return stats::HcType::kHc3;
  throw ConfigError("unknown HC type '" + s + "'");
}

void cmd_fit(const FitCmd& c, const Options& o) {
  const auto model = parse_model(c.model);
  if (!model) throw ConfigError("unknown model '" + c.model + "'");
  const auto variant = parse_variant(c.variant);
  if (!variant) throw ConfigError("unknown variant '" + c.variant + "'");
  resolve_variant(*model, *variant);

  FitSettings settings;
  settings.estimators.clear();
  bool stochastic = false;
  for (const auto& e : c.estimators) {
    const auto est = parse_estimator(e);
    if (!est) throw ConfigError("unknown estimator '" + e + "'");
    settings.estimators.push_back(*est);
    stochastic = stochastic || *est == stats::Estimator::kBayes || *est == stats::Estimator::kRobustMm;
  }
  if (settings.estimators.empty()) throw ConfigError("at least one --estimator is required");
  const bool is_changes = *model == ModelId::kDeltaEco || *model == ModelId::kDeltaFgd || *model == ModelId::kDeltaEdu;
  if (c.bootstrap > 0) {
    if (!is_changes) throw ConfigError("--bootstrap applies to the changes models only");
    if (c.bootstrap < 1000) throw ConfigError("--bootstrap needs B >= 1000");
  }
  if (stochastic || c.bootstrap > 0) require_seed(c.common, "robust, bayes and bootstrap are seeded");
  settings.hc = parse_hc(c.hc);
  settings.seed = c.common.seed;
  settings.bootstrap = c.bootstrap;
  settings.threads = c.common.threads;
  settings.bayes_iterations = c.bayes_iterations;
  settings.bayes_burn_in = c.bayes_burn_in;
  settings.base_year = c.base_year > 0 ? c.base_year : month_year(c.data.month);
  if (c.by != "none" && c.by != "month" && c.by != "age") throw ConfigError("--by must be month or age");

  Provenance prov;
  auto in = load_inputs(c.data, prov, *model != ModelId::kNetwork);
  const auto window = c.data.window();
  json report;
  report["provenance"] = prov.to_json("fit", o.resolved(), c.common);
  ensure_dir(c.common.out);

  if (c.by == "none") {
    const auto panel = build_panel(in.audience, in.census, c.data.month, window);
    std::optional<CountryGenderPanel> next;
    if (*model == ModelId::kDeltaFgd) next = build_panel(in.audience, in.census, c.month_next, window);
    const ModelInputs mi{&panel, next ? &*next : nullptr, in.has_indicators ? &in.indicators : nullptr};
    const auto result = fit_model(*model, *variant, mi, settings);
    report["report"] = parse_json(to_json(result));
    write(c.common.out, "report.csv", to_csv(result));
  } else {
    StrataInputs si;
    si.snapshots = &in.audience;
    si.census = &in.census;
    si.indicators = in.has_indicators ? &in.indicators : nullptr;
    si.month = c.data.month;
    si.next_month = c.month_next;
    si.window = window;
    const auto result =
        stratify(*model, *variant, c.by == "month" ? StrataKind::kMonth : StrataKind::kAge, si, settings);
    report["strata"] = parse_json(to_json(result));
    write(c.common.out, "stability.csv", stability_csv(result));
  }
  write(c.common.out, "report.json", dump(report));
}

// ---------------------------------------------------------------------------
// validate

struct ValidateCmd {
  Common common;
  DataFlags data;
  std::string survey;
  std::string measure = "penetration";
  std::size_t resamples = 10000;
};

/// Survey microdata: country,gender,response,weight with 0/1 responses.
struct SurveyRow {
  std::string country;
  std::optional<Gender> gender;
  double response = 0;
  double weight = 0;
};

std::vector<SurveyRow> load_survey(const std::string& path) {
  const auto table = csv::read(path);
  csv::require_header(table, {"country", "gender", "response", "weight"});
  std::vector<SurveyRow> rows;
  for (const auto& r : table.rows) {
    if (r.fields.size() != 4) throw ParseError(path, r.line, "row", "expected 4 fields");
    SurveyRow s;
    s.country = r.fields[0];
    if (!is_iso_alpha2(s.country)) throw ParseError(path, r.line, "country", "expected ISO alpha-2 code");
    if (!r.fields[1].empty()) {
      s.gender = parse_gender(r.fields[1]);
      if (!s.gender) throw ParseError(path, r.line, "gender", "expected male or female");
    }
    const auto resp = csv::parse_double(r.fields[2]);
    const auto w = csv::parse_double(r.fields[3]);
    if (!resp) throw ParseError(path, r.line, "response", "expected 0 or 1");
    if (!w) throw ParseError(path, r.line, "weight", "expected a number");
    s.response = *resp;
    s.weight = *w;
    rows.push_back(std::move(s));
  }
  return rows;
}

void cmd_validate(const ValidateCmd& c, const Options& o) {
  if (c.measure != "penetration" && c.measure != "fgd") throw ConfigError("--measure must be penetration or fgd");
  if (c.survey.empty()) throw ConfigError("--survey is required");
  require_seed(c.common, "the Spearman interval is a seeded bootstrap");
  Provenance prov;
  prov.input(c.survey);
  const auto survey = load_survey(c.survey);
  auto in = load_inputs(c.data, prov, false);
  const auto panel = build_panel(in.audience, in.census, c.data.month, c.data.window());

  // Per country: weighted share overall and per gender.
  std::map<std::string, std::array<std::vector<double>, 6>> by_country;  // resp/weight: all, male, female
  for (const auto& s : survey) {
    auto& v = by_country[s.country];
    v[0].push_back(s.response);
    v[1].push_back(s.weight);
    if (s.gender) {
      const int k = *s.gender == Gender::kMale ? 2 : 4;
      v[k].push_back(s.response);
      v[k + 1].push_back(s.weight);
    }
  }
  std::vector<double> xs, ys;
  json rows = json::array();
  std::ostringstream table;
  table << "country,survey," << c.measure << "\n";
  for (const auto& [country, v] : by_country) {
    const auto* agg = panel.find(country);
    if (!agg) continue;
    double x = 0, y = 0;
    if (c.measure == "penetration") {
      x = stats::weighted_proportion(v[0], v[1]);
      y = penetration(*agg);
    } else {
      if (v[2].empty() || v[4].empty()) continue;
      const double pm = stats::weighted_proportion(v[2], v[3]);
      const double pf = stats::weighted_proportion(v[4], v[5]);
      if (!(pm > 0) || !(pf > 0)) continue;
      try {
        y = fgd(*agg);
      } catch (const UndefinedMetricError&) {
        continue;
      }
      x = std::log(pm / pf);
    }
    xs.push_back(x);
    ys.push_back(y);
    rows.push_back({{"country", country}, {"survey", x}, {c.measure, y}});
    table << country << ',' << csv::fixed(x) << ',' << csv::fixed(y) << '\n';
  }
  if (xs.size() < 3) throw SampleSizeError("validation needs at least 3 countries present in survey and panel");

  stats::SpearmanOptions so;
  so.resamples = c.resamples;
  so.seed = c.common.seed;
  so.threads = c.common.threads;
  const auto pr = stats::pearson(xs, ys);
  const auto sp = stats::spearman(xs, ys, so);
  auto corr = [](const stats::Correlation& r) {
    return json{{"r", r.r}, {"ci", {r.ci_low, r.ci_high}}, {"p", r.p}, {"n", r.n}};
  };
  json report;
  report["provenance"] = prov.to_json("validate", o.resolved(), c.common);
  report["measure"] = c.measure;
  report["pearson"] = corr(pr);
  report["spearman"] = corr(sp);
  report["countries"] = rows;
  ensure_dir(c.common.out);
  write(c.common.out, "validation.csv", table.str());
  write(c.common.out, "validation.json", dump(report));
}

// ---------------------------------------------------------------------------
// crawl

struct CrawlCmd {
  Common common;
  std::string fixtures;
  std::vector<std::string> countries;
  std::string date;
  std::string label;
  double rate = 5.0;
  int attempts = 3;
  double backoff = 0.5;
  int age_lo = 13;
  int age_hi = 65;
};

void cmd_crawl(const CrawlCmd& c, const Options& o) {
  if (c.fixtures.empty()) throw ConfigError("--fixtures is required");
  collector::ReplayTransport transport(c.fixtures);
  Provenance prov;
  prov.input(c.fixtures + "/manifest.json");
  prov.input(c.fixtures + "/responses.csv");
  collector::CrawlSpec spec;
  spec.countries = c.countries;
  if (spec.countries.empty()) {
    spec.countries = transport.countries();
    for (const auto& u : transport.manifest().unavailable) spec.countries.push_back(u);
  }
  spec.window = AgeWindow{c.age_lo, c.age_hi};
  if (c.date.empty()) {
    spec.date = transport.manifest().date;
  } else {
    const auto d = Date::parse(c.date);
    if (!d) throw ConfigError("--date must be YYYY-MM-DD");
    spec.date = *d;
  }
  spec.label = c.label.empty() ? transport.manifest().label : c.label;
  spec.rate_limit = c.rate;
  spec.retry.max_attempts = c.attempts;
  spec.retry.backoff_seconds = c.backoff;

  ensure_dir(c.common.out);
  json report;
  report["provenance"] = prov.to_json("crawl", o.resolved(), c.common);
  try {
    auto result = collector::crawl(transport, spec);
    result.manifest.elapsed_seconds = 0;  // wall time is not part of the artifact
    write(c.common.out, "snapshot.csv", to_csv(result.snapshot));
    report["manifest"] = parse_json(collector::to_json(result.manifest));
    write(c.common.out, "crawl.json", dump(report));
  } catch (const collector::CrawlAborted& e) {
    auto manifest = e.manifest();
    manifest.elapsed_seconds = 0;
    report["manifest"] = parse_json(collector::to_json(manifest));
    report["aborted"] = e.what();
    write(c.common.out, "crawl.json", dump(report));
    throw;
  }
}

// ---------------------------------------------------------------------------

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kUsage;
    case ErrorKind::kMissingInput: return kMissingInput;
    case ErrorKind::kInvariant: return kInvariant;
    case ErrorKind::kNumerical: return kNumerical;
    case ErrorKind::kTransport: return kTransport;
  }
  return kUnexpected;
}

void report_error(std::ostream& err, const std::string& tag, const std::string& message, int code,
                  json extra = json::object()) {
  json j{{"error", tag}, {"message", message}, {"exit_code", code}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gender divide pipeline: ingest, metrics, fit, validate, crawl", "gdivide"};
  app.set_version_flag("--version", GDIVIDE_VERSION);
  app.require_subcommand(1);

  IngestCmd ingest;
  Options ingest_opts(app.add_subcommand("ingest", "validate inputs; write canonical CSVs, panels, coverage"));
  add_common(ingest_opts, ingest.common);
  add_data(ingest_opts, ingest.data);
  ingest_opts.add("--base-year", "base_year", ingest.base_year, "indicator year for coverage (default: month year)");

  MetricsCmd metrics;
  Options metrics_opts(app.add_subcommand("metrics", "write fgd.csv for one month"));
  add_common(metrics_opts, metrics.common);
  add_data(metrics_opts, metrics.data);

  FitCmd fit;
  Options fit_opts(app.add_subcommand("fit", "fit a model with one or more estimators"));
  add_common(fit_opts, fit.common);
  add_data(fit_opts, fit.data);
  fit_opts.add("--model", "model", fit.model, "fgd | network | delta-eco | delta-fgd | delta-edu");
  fit_opts.add("--variant", "variant", fit.variant, "internet | gdp | full | equality | hofstede");
  fit_opts.add("--estimator", "estimator", fit.estimators, "ols | hc | robust | bayes (repeatable)");
  fit_opts.add("--by", "by", fit.by, "stratify by month or age");
  fit_opts.add("--month-next", "month_next", fit.month_next, "panel month one year later (delta-fgd)");
  fit_opts.add("--bootstrap", "bootstrap", fit.bootstrap, "partial-R^2 bootstrap resamples (>= 1000)");
  fit_opts.add("--hc", "hc", fit.hc, "hc0 | hc1 | hc2 | hc3");
  fit_opts.add("--bayes-iterations", "bayes_iterations", fit.bayes_iterations, "retained Gibbs draws");
  fit_opts.add("--bayes-burn-in", "bayes_burn_in", fit.bayes_burn_in, "discarded Gibbs draws");
  fit_opts.add("--base-year", "base_year", fit.base_year, "indicator base year (default: month year)");

  ValidateCmd validate;
  Options validate_opts(app.add_subcommand("validate", "correlate survey estimates with a panel measure"));
  add_common(validate_opts, validate.common);
  add_data(validate_opts, validate.data);
  validate_opts.add("--survey", "survey", validate.survey, "survey CSV: country,gender,response,weight");
  validate_opts.add("--measure", "measure", validate.measure, "penetration | fgd");
  validate_opts.add("--resamples", "resamples", validate.resamples, "Spearman bootstrap resamples");

  CrawlCmd crawl;
  Options crawl_opts(app.add_subcommand("crawl", "crawl a replay fixture into a snapshot CSV"));
  add_common(crawl_opts, crawl.common);
  crawl_opts.add("--fixtures", "fixtures", crawl.fixtures, "directory with manifest.json and responses.csv");
  crawl_opts.add("--countries", "countries", crawl.countries, "countries to query (default: all in fixture)");
  crawl_opts.add("--date", "date", crawl.date, "snapshot date YYYY-MM-DD (default: manifest date)");
  crawl_opts.add("--label", "label", crawl.label, "retrieval label");
  crawl_opts.add("--rate", "rate", crawl.rate, "requests per second");
  crawl_opts.add("--attempts", "attempts", crawl.attempts, "attempts per segment");
  crawl_opts.add("--backoff", "backoff", crawl.backoff, "initial retry backoff in seconds");
  crawl_opts.add("--age-lo", "age_lo", crawl.age_lo, "lower age of the window");
  crawl_opts.add("--age-hi", "age_hi", crawl.age_hi, "upper age of the window");

  std::vector<std::string> argv_storage{"gdivide"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << GDIVIDE_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage_error", e.what(), kUsage);
    return kUsage;
  }

  try {
    if (ingest_opts.app()->parsed()) {
      resolve_common(ingest_opts, ingest.common);
      cmd_ingest(ingest, ingest_opts);
    } else if (metrics_opts.app()->parsed()) {
      resolve_common(metrics_opts, metrics.common);
      cmd_metrics(metrics, metrics_opts);
    } else if (fit_opts.app()->parsed()) {
      resolve_common(fit_opts, fit.common);
      cmd_fit(fit, fit_opts);
    } else if (validate_opts.app()->parsed()) {
      resolve_common(validate_opts, validate.common);
      cmd_validate(validate, validate_opts);
    } else if (crawl_opts.app()->parsed()) {
      resolve_common(crawl_opts, crawl.common);
      cmd_crawl(crawl, crawl_opts);
    }
  } catch (const ParseError& e) {
    const int code = exit_code(e.kind());
    report_error(err, e.tag(), e.what(), code, {{"line", e.line()}, {"field", e.field()}});
    return code;
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    report_error(err, e.tag(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error(err, "internal_error", e.what(), kUnexpected);
    return kUnexpected;
  }
  return kOk;
}

}  // namespace gdivide::cli
