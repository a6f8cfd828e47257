#include <doctest.h>

#include <set>

#include "gdivide/csv.hpp"
#include "gdivide/error.hpp"
#include "gdivide/rng.hpp"
#include "test_support.hpp"

using namespace gdivide;

TEST_SUITE("infra") {
  TEST_CASE("rng is reproducible and seeds separate streams") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
      const double x = a.normal();
      CHECK(x == b.normal());
      (void)c.uniform();
    }
    CHECK(Rng(42).uniform() != Rng(43).uniform());
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 5) == derive_seed(1, 5));
  }

  TEST_CASE("rng variates have the right first two moments") {
    Rng rng(7);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0, sg = 0;
    for (int i = 0; i < n; ++i) {
      su += rng.uniform();
      const double z = rng.normal();
      sn += z;
      sn2 += z * z;
      sg += rng.gamma(2.5);
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sg / n == doctest::Approx(2.5).epsilon(0.01));
  }

  TEST_CASE("index stays in range") {
    Rng rng(3);
    std::set<std::size_t> seen;
    for (int i = 0; i < 1000; ++i) {
      const auto k = rng.index(7);
      CHECK(k < 7);
      seen.insert(k);
    }
    CHECK(seen.size() == 7);
  }

  TEST_CASE("parallel_for visits every index once and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                   if (i == 5) throw DomainError("boom");
                                 }),
                    DomainError);
  }

  TEST_CASE("csv number parsing is strict") {
    CHECK(csv::parse_int("42") == 42);
    CHECK_FALSE(csv::parse_int("42x"));
    CHECK_FALSE(csv::parse_int(""));
    CHECK(csv::parse_double("0.25") == 0.25);
    CHECK(csv::parse_double("-1e-3") == -0.001);
    CHECK_FALSE(csv::parse_double("1,5"));
    CHECK_FALSE(csv::parse_double("nan?"));
  }

  TEST_CASE("fixed formatting never writes negative zero") {
    CHECK(csv::fixed(0.1234564) == "0.123456");
    CHECK(csv::fixed(-0.0000001) == "0.000000");
    CHECK(csv::fixed(-2.5, 2) == "-2.50");
    CHECK(csv::parse_double(csv::shortest(0.1 + 0.2)) == 0.1 + 0.2);
  }

  TEST_CASE("split keeps empty fields") {
    const auto f = csv::split("a,,c,");
    REQUIRE(f.size() == 4);
    CHECK(f[1].empty());
    CHECK(f[3].empty());
  }

  TEST_CASE("atomic write replaces the file and read reports lines") {
    testing::TempDir dir;
    const auto path = dir.file("t.csv");
    csv::write_atomic(path, "h1,h2\n1,2\n");
    csv::write_atomic(path, "h1,h2\n3,4\n5,6\n");
    const auto t = csv::read(path);
    CHECK(t.header == std::vector<std::string>{"h1", "h2"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].line == 2);
    CHECK(t.rows[1].fields[1] == "6");
    CHECK_THROWS_AS(csv::require_header(t, {"h1", "x"}), IntegrityError);
    CHECK_THROWS_AS(csv::read(dir.file("missing.csv")), FileError);
  }

  TEST_CASE("error kinds") {
    CHECK(ConfigError("x").kind() == ErrorKind::kUsage);
    CHECK(FileError("x").kind() == ErrorKind::kMissingInput);
    CHECK(MissingDataError("x").kind() == ErrorKind::kMissingInput);
    CHECK(IntegrityError("x").kind() == ErrorKind::kInvariant);
    CHECK(SingularityError("x").tag() == "singularity_error");
    ParseError p("f.csv", 7, "dau", "bad");
    CHECK(p.line() == 7);
    CHECK(p.field() == "dau");
    CHECK(std::string(p.what()).find("f.csv:7") != std::string::npos);
  }
}
