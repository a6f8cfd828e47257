// Writes seeded synthetic inputs: `world` produces audience/census/indicator
// CSVs, `replay` a crawl fixture directory.
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gdivide/collector.hpp"
#include "gdivide/csv.hpp"
#include "gdivide/error.hpp"
#include "gdivide/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic fixtures for the gdivide pipeline", "gdivide-synth"};
  app.require_subcommand(1);

  gdivide::synthetic::WorldOptions opts;
  std::string out;
  std::vector<std::string> unavailable;
  std::size_t transient = 0;
  std::string date = "2015-07-01";

  auto* world = app.add_subcommand("world", "audience.csv, census.csv, indicators.csv");
  auto* replay = app.add_subcommand("replay", "manifest.json + responses.csv for one date");
  for (auto* sub : {world, replay}) {
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--seed", opts.seed, "seed")->required();
    sub->add_option("--countries", opts.countries, "number of countries");
  }
  world->add_option("--days", opts.days_per_month, "daily snapshots per month");
  world->add_option("--months", opts.months, "month labels YYYY-MM");
  replay->add_option("--date", date, "snapshot date YYYY-MM-DD");
  replay->add_option("--unavailable", unavailable, "codes the service does not serve");
  replay->add_option("--transient", transient, "segments that fail once before answering");

  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out);
    if (world->parsed()) {
      const auto w = gdivide::synthetic::make_world(opts);
      gdivide::csv::write_atomic(out + "/audience.csv", gdivide::to_csv(w.audience));
      gdivide::csv::write_atomic(out + "/census.csv", gdivide::to_csv(w.census));
      gdivide::csv::write_atomic(out + "/indicators.csv", gdivide::to_csv(w.indicators));
      return 0;
    }
    const auto d = gdivide::Date::parse(date);
    if (!d) throw gdivide::ConfigError("--date must be YYYY-MM-DD");
    opts.months = {d->month_label()};
    opts.days_per_month = d->day;
    auto w = gdivide::synthetic::make_world(opts);
    std::erase_if(w.audience.cells, [&](const auto& c) { return c.date != *d; });
    gdivide::validate(w.audience);
    gdivide::collector::ReplayManifest manifest;
    manifest.label = "synthetic replay seed " + std::to_string(opts.seed);
    manifest.date = *d;
    manifest.unavailable = unavailable;
    for (std::size_t i = 0; i < transient && i < w.audience.cells.size(); ++i) {
      const auto& c = w.audience.cells[i * 7 % w.audience.cells.size()];
      manifest.transient_failures.push_back({c.country, c.gender, c.age_bin, gdivide::collector::Metric::kDau, 1});
    }
    gdivide::collector::write_replay_fixture(out, w.audience, manifest);
  } catch (const gdivide::Error& e) {
    std::cerr << "gdivide-synth: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
