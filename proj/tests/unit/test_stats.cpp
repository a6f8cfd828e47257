#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gdivide/error.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/stats/bayes.hpp"
#include "gdivide/stats/bootstrap.hpp"
#include "gdivide/stats/correlation.hpp"
#include "gdivide/stats/diagnostics.hpp"
#include "gdivide/stats/linear.hpp"
#include "gdivide/stats/rank.hpp"
#include "gdivide/stats/robust.hpp"
#include "test_support.hpp"

using namespace gdivide;
using namespace gdivide::stats;
using doctest::Approx;

namespace {

// Reference values below come from tests/oracles/freeze_oracles.py
// (statsmodels / scipy).
const std::vector<double> kY{3.1, 4.2, 2.8, 5.9, 7.4, 6.1, 8.8, 9.3, 7.7, 11.2, 10.4, 12.9};
const std::vector<double> kX1{1, 2, 1.5, 3, 4, 3.5, 5, 5.5, 4.5, 6.5, 6, 7.5};
const std::vector<double> kX2{0.3, -0.2, 0.9, 0.1, -0.5, 0.7, 0.2, -0.9, 0.4, -0.1, 0.8, -0.3};

ModelFrame reference_frame() {
  ModelFrame f("y", Eigen::Map<const Eigen::VectorXd>(kY.data(), static_cast<Eigen::Index>(kY.size())));
  f.add("x1", kX1).add("x2", kX2);
  return f;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(i);
    CHECK(got[i] == Approx(want[i]).epsilon(tol));
  }
}

std::vector<double> estimates(const FitResult& f) {
  std::vector<double> out;
  for (const auto& t : f.terms) out.push_back(t.estimate);
  return out;
}
std::vector<double> ses(const FitResult& f) {
  std::vector<double> out;
  for (const auto& t : f.terms) out.push_back(t.se);
  return out;
}

ModelFrame contaminated_frame(std::uint64_t seed, long n, double fraction) {
  Rng rng(seed);
  std::vector<double> x(static_cast<std::size_t>(n));
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = rng.normal();
    y(i) = 1.0 + 2.0 * x[static_cast<std::size_t>(i)] + rng.normal(0, 0.5);
    if (i < static_cast<long>(fraction * static_cast<double>(n))) y(i) += 25.0 + rng.normal(0, 1);
  }
  ModelFrame f("y", y);
  f.add("x", x);
  return f;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("OLS matches the reference fit") {
    const auto fit = ols_fit(reference_frame());
    check_close(estimates(fit), {1.0817430147536808, 1.5416093462688591, -0.186702493205134}, 1e-10);
    check_close(ses(fit), {0.23421797826379442, 0.04972385578259929, 0.1866435240929025}, 1e-10);
    CHECK(fit.terms[0].p == Approx(0.0012569706732959408).epsilon(1e-8));
    CHECK(fit.terms[1].p == Approx(1.8519366918836216e-10).epsilon(1e-6));
    CHECK(fit.terms[2].p == Approx(0.34329163353151876).epsilon(1e-8));
    CHECK(fit.r2 == Approx(0.9919177476024356).epsilon(1e-12));
    CHECK(fit.sigma == Approx(0.3186910390476109).epsilon(1e-10));
    CHECK(fit.terms[0].name == kInterceptName);
    CHECK(fit.df_residual == 9);
  }

  TEST_CASE("HC standard errors match the reference sandwich estimates") {
    const auto frame = reference_frame();
    const auto ols = ols_fit(frame);
    const std::vector<std::pair<HcType, std::vector<double>>> cases{
        {HcType::kHc0, {0.2461554826691064, 0.04715653949759487, 0.17645769454273733}},
        {HcType::kHc1, {0.28423586836302167, 0.05445168154597524, 0.2037557948896603}},
        {HcType::kHc2, {0.29715575783526404, 0.05706234882431328, 0.22242980300994855}},
        {HcType::kHc3, {0.35939604423823074, 0.06917594286159826, 0.28143395547465355}},
    };
    for (const auto& [type, want] : cases) {
      CAPTURE(to_string(type));
      const auto hc = hc_se(frame, ols, type);
      check_close(ses(hc), want, 1e-9);
      CHECK(estimates(hc) == estimates(ols));
      CHECK(hc.estimator == Estimator::kHc);
    }
  }

  TEST_CASE("single-term F test, VIF and partial R^2") {
    const auto frame = reference_frame();
    const auto f = anova_single_term(frame, "x2");
    CHECK(f.f == Approx(1.0006319900786198).epsilon(1e-9));
    CHECK(f.p == Approx(0.3432916335315198).epsilon(1e-9));
    CHECK(f.df1 == 1);
    CHECK(f.df2 == 9);
    // A single-coefficient F test is the square of its t statistic.
    CHECK(f.p == Approx(ols_fit(frame).term("x2").p).epsilon(1e-9));

    ModelFrame z("y", Eigen::VectorXd::LinSpaced(10, 0, 1));
    z.add("z1", std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10})
        .add("z2", std::vector<double>{2.1, 3.9, 6.2, 8.1, 9.8, 12.2, 13.8, 16.1, 18.3, 19.9})
        .add("z3", std::vector<double>{5, 3, 4, 1, 2, 6, 8, 7, 10, 9});
    const auto v = vif(z);
    REQUIRE(v.size() == 3);
    CHECK(v[0].vif == Approx(1242.5141554623794).epsilon(1e-8));
    CHECK(v[1].vif == Approx(1265.6649598626377).epsilon(1e-8));
    CHECK(v[2].vif == Approx(2.554226817746358).epsilon(1e-10));

    const std::vector<std::string> controls{"x2"};
    CHECK(partial_r2(frame, "x1", controls) == Approx(0.8815239790564902).epsilon(1e-10));
  }

  TEST_CASE("OLS agrees with the normal equations on random frames") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const int k = 1 + static_cast<int>(seed % 6);
      const auto frame = testing::random_frame(seed, 20 + static_cast<long>(seed % 30), k);
      const Eigen::MatrixXd x = frame.design();
      const Eigen::VectorXd beta = (x.transpose() * x).ldlt().solve(x.transpose() * frame.outcome());
      const auto fit = ols_fit(frame);
      const auto got = fit.coefficients();
      CAPTURE(seed);
      CHECK((got - beta).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, beta.cwiseAbs().maxCoeff()));
      CHECK(fit.residuals.norm() == Approx((frame.outcome() - x * beta).norm()).epsilon(1e-10));
      // Residuals are orthogonal to the design.
      CHECK((x.transpose() * fit.residuals).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("rank-deficient designs name the dependent columns") {
    auto frame = reference_frame();
    std::vector<double> twice(kX1.size());
    std::transform(kX1.begin(), kX1.end(), twice.begin(), [](double v) { return 2 * v; });
    frame.add("x1_twice", twice);
    try {
      ols_fit(frame);
      FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
      const std::string msg = e.what();
      CHECK((msg.find("x1") != std::string::npos));
    }
    auto small = testing::random_frame(3, 3, 3);
    CHECK_THROWS_AS(ols_fit(small), SampleSizeError);
  }

  TEST_CASE("HC errors need leverage below one") {
    ModelFrame f("y", Eigen::VectorXd::LinSpaced(6, 1, 6));
    f.add("spike", std::vector<double>{0, 0, 0, 0, 0, 1}).add("x", std::vector<double>{1, 3, 2, 5, 4, 0});
    const auto ols = ols_fit(f);
    CHECK_THROWS_AS(hc_se(f, ols, HcType::kHc3), DegenerateError);
  }

  TEST_CASE("ranks and rescaling") {
    const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6, 5};
    check_close(rank_transform(v), {6, 8.5, 5, 8.5, 3.5, 1, 7, 2, 3.5}, 1e-15);
    const auto unit = rescale_unit(rank_transform(v));
    CHECK(unit[5] == 1.0);
    CHECK(*std::min_element(unit.begin(), unit.end()) == Approx((9 - 8.5) / 8));
    CHECK(rescale_unit(std::vector<double>{1, 2, 3})[2] == 0.0);
    CHECK_THROWS_AS(rank_transform(std::vector<double>{1}), DomainError);
    CHECK_THROWS_AS(rank_transform(std::vector<double>{1, NAN}), DomainError);

    // Ranks are invariant under strictly increasing transforms and sum to n(n+1)/2.
    Rng rng(9);
    std::vector<double> w(50);
    for (auto& x : w) x = rng.normal();
    std::vector<double> e(w.size());
    std::transform(w.begin(), w.end(), e.begin(), [](double x) { return std::exp(3 * x) + 1; });
    const auto rw = rank_transform(w);
    CHECK(rw == rank_transform(e));
    CHECK(std::accumulate(rw.begin(), rw.end(), 0.0) == 50 * 51 / 2);
  }

  TEST_CASE("correlations") {
    const std::vector<double> a{1.2, 2.4, 2.9, 4.1, 5.5, 5.9, 7.2, 8.8};
    const std::vector<double> b{2.0, 2.2, 3.9, 3.7, 6.1, 5.2, 7.9, 8.1};
    const auto p = pearson(a, b);
    CHECK(p.r == Approx(0.9622761896661596).epsilon(1e-12));
    CHECK(p.p == Approx(0.00013044200213354303).epsilon(1e-8));
    CHECK(p.ci_low == Approx(0.8002337474904685).epsilon(1e-10));
    CHECK(p.ci_high == Approx(0.9933609862621482).epsilon(1e-10));
    CHECK(p.n == 8);

    SpearmanOptions so;
    so.resamples = 2000;
    so.seed = 4;
    so.threads = 1;
    const auto s1 = spearman(a, b, so);
    CHECK(s1.r == Approx(0.9523809523809524).epsilon(1e-12));
    CHECK(s1.ci_low <= s1.r);
    CHECK(s1.ci_high >= s1.r - 1e-12);
    so.threads = 4;
    const auto s4 = spearman(a, b, so);
    CHECK(s4.ci_low == s1.ci_low);
    CHECK(s4.ci_high == s1.ci_high);

    CHECK_THROWS_AS(pearson(a, std::vector<double>(8, 1.0)), DegenerateError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}), DomainError);

    CHECK(weighted_proportion(std::vector<double>{1, 0, 1, 1}, std::vector<double>{1, 2, 3, 2}) == 0.75);
    CHECK_THROWS_AS(weighted_proportion(std::vector<double>{1, 0}, std::vector<double>{0, 0}), DegenerateError);
    CHECK_THROWS_AS(weighted_proportion(std::vector<double>{1, 0}, std::vector<double>{1, -1}), DomainError);
  }

  TEST_CASE("Shapiro-Wilk") {
    const auto s1 = shapiro_wilk(std::vector<double>{2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 4.9, 3.7, 3.0, 4.1, 2.5});
    CHECK(s1.w == Approx(0.9736969671074749).epsilon(1e-6));
    CHECK(s1.p == Approx(0.945419104291362).epsilon(1e-3));
    std::vector<double> lognormal(25);
    for (int i = 0; i < 25; ++i) lognormal[static_cast<std::size_t>(i)] = std::exp(-2.0 + 4.0 * i / 24.0);
    const auto s2 = shapiro_wilk(lognormal);
    CHECK(s2.w == Approx(0.8094700505076746).epsilon(1e-6));
    CHECK(s2.p == Approx(0.00032844423267456034).epsilon(2e-2));
    const auto s3 = shapiro_wilk(std::vector<double>{1, 2, 4});
    CHECK(s3.w == Approx(0.9642857142857142).epsilon(1e-9));
    CHECK(s3.p == Approx(0.6368868450289689).epsilon(1e-6));
    CHECK_THROWS_AS(shapiro_wilk(std::vector<double>{1, 2}), DomainError);
    CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(10, 3.0)), DegenerateError);

    // Rejects exponential samples far more often than normal ones.
    int reject_normal = 0, reject_exp = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng rng(seed);
      std::vector<double> n(60), e(60);
      for (auto& v : n) v = rng.normal();
      for (auto& v : e) v = rng.exponential();
      reject_normal += shapiro_wilk(n).p < 0.05;
      reject_exp += shapiro_wilk(e).p < 0.05;
    }
    CHECK(reject_normal < 25);
    CHECK(reject_exp > 180);
  }

  TEST_CASE("distribution helpers") {
    CHECK(student_t_two_sided(2.1, 9) == Approx(0.06511828241215198).epsilon(1e-10));
    CHECK(student_t_quantile(0.975, 9) == Approx(2.2621571628540993).epsilon(1e-10));
    CHECK(normal_two_sided(1.7) == Approx(0.08913092551708608).epsilon(1e-10));
  }

  TEST_CASE("bisquare consistency and M-scale") {
    const Bisquare s{1.548};
    // E[rho(Z)] under N(0,1) by Simpson's rule on [-c, c]; rho = 1 outside.
    const int m = 20000;
    const double c = s.c, h = 2 * c / m;
    double acc = 0;
    for (int i = 0; i <= m; ++i) {
      const double u = -c + i * h;
      const double wt = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
      acc += wt * s.rho(u) * std::exp(-u * u / 2);
    }
    const double inside = acc * h / 3 / std::sqrt(2 * M_PI);
    const double outside = std::erfc(c / std::sqrt(2.0));
    CHECK(inside + outside == Approx(0.4999106940234872).epsilon(1e-8));

    const std::vector<double> r{0.5, -1.2, 0.3, 2.2, -0.7, 0.1, -0.4, 1.6, -2.5, 0.9};
    const double sc = m_scale(r, 1.548, 0.5);
    CHECK(sc == Approx(1.2448407130811516).epsilon(1e-8));
    std::vector<double> scaled(r.size());
    std::transform(r.begin(), r.end(), scaled.begin(), [](double v) { return 3 * v; });
    CHECK(m_scale(scaled, 1.548, 0.5) == Approx(3 * sc).epsilon(1e-8));
    CHECK(m_scale(std::vector<double>(10, 0.0), 1.548, 0.5) == 0.0);

    const Bisquare b{4.685};
    CHECK(b.rho(0) == 0);
    CHECK(b.rho(10) == 1);
    CHECK(b.weight(0) == 1);
    CHECK(b.psi(5) == 0);
    CHECK(b.psi(1.3) == Approx(1.3 * b.weight(1.3)));
  }

  TEST_CASE("MM regression") {
    SUBCASE("agrees with OLS on clean data") {
      const auto frame = testing::random_frame(11, 200, 3, 0.5);
      const auto mm = robust_mm_fit(frame);
      const auto ols = ols_fit(frame);
      for (std::size_t j = 0; j < mm.terms.size(); ++j) {
        CHECK(std::abs(mm.terms[j].estimate - ols.terms[j].estimate) < 3 * ols.terms[j].se);
      }
      CHECK(mm.r2 == Approx(ols.r2).epsilon(0.03));
    }
    SUBCASE("resists 20% gross outliers") {
      const auto frame = contaminated_frame(5, 100, 0.2);
      const auto mm = robust_mm_fit(frame);
      const auto ols = ols_fit(frame);
      CHECK(mm.term("x").estimate == Approx(2.0).epsilon(0.1));
      CHECK(mm.term(kInterceptName).estimate == Approx(1.0).epsilon(0.2));
      CHECK(std::abs(ols.term(kInterceptName).estimate - 1.0) > 3.0);
    }
    SUBCASE("satisfies the M-step score equation") {
      const auto frame = contaminated_frame(8, 80, 0.1);
      const auto mm = robust_mm_fit(frame);
      const Bisquare bis{4.685};
      const Eigen::MatrixXd x = frame.design();
      Eigen::VectorXd psi(frame.n());
      for (Eigen::Index i = 0; i < frame.n(); ++i) psi[i] = bis.psi(mm.residuals[i] / mm.sigma);
      CHECK((x.transpose() * psi).cwiseAbs().maxCoeff() < 1e-5 * static_cast<double>(frame.n()));
      // The S-scale cannot exceed the M-scale of the least-squares residuals.
      const auto ols = ols_fit(frame);
      std::vector<double> res(ols.residuals.data(), ols.residuals.data() + ols.residuals.size());
      CHECK(mm.sigma <= m_scale(res, 1.548, 0.5) * (1 + 1e-9));
    }
    SUBCASE("is deterministic for a fixed seed") {
      const auto frame = contaminated_frame(2, 60, 0.15);
      CHECK(estimates(robust_mm_fit(frame)) == estimates(robust_mm_fit(frame)));
    }
  }

  TEST_CASE("Gibbs sampler") {
    const auto frame = testing::random_frame(21, 150, 2, 1.0);
    BayesOptions o;
    o.iterations = 4000;
    o.burn_in = 500;
    o.seed = 99;
    const auto bayes = bayes_fit(frame, o);
    const auto ols = ols_fit(frame);
    CHECK(bayes.draws.rows() == 4000);
    for (std::size_t j = 0; j < bayes.terms.size(); ++j) {
      CAPTURE(j);
      CHECK(bayes.terms[j].estimate == Approx(ols.terms[j].estimate).epsilon(0.02).scale(ols.terms[j].se * 5));
      CHECK(bayes.terms[j].se == Approx(ols.terms[j].se).epsilon(0.1));
      CHECK(bayes.terms[j].ci_low < bayes.terms[j].estimate);
      CHECK(bayes.terms[j].ci_high > bayes.terms[j].estimate);
    }
    CHECK(estimates(bayes_fit(frame, o)) == estimates(bayes));
    o.seed = 100;
    CHECK(estimates(bayes_fit(frame, o)) != estimates(bayes));
    o.iterations = 1999;
    CHECK_THROWS_AS(bayes_fit(frame, o), ConfigError);
  }

  TEST_CASE("linear combinations and coefficient tests") {
    const auto frame = reference_frame();
    const auto fit = ols_fit(frame);
    Eigen::VectorXd w(3);
    w << 0, 1, 1;
    const auto lc = linear_combination(fit, w);
    CHECK(lc.estimate == Approx(1.5416093462688591 - 0.186702493205134).epsilon(1e-12));
    const double var = fit.covariance(1, 1) + fit.covariance(2, 2) + 2 * fit.covariance(1, 2);
    CHECK(lc.se == Approx(std::sqrt(var)).epsilon(1e-12));
    const double q = student_t_quantile(0.975, 9);
    CHECK(lc.low == Approx(lc.estimate - q * lc.se).epsilon(1e-12));
    CHECK(test_coefficient(fit, "x1", 0.0) == Approx(fit.term("x1").p).epsilon(1e-9));
    CHECK(test_coefficient(fit, "x1", 1.5416093462688591) == Approx(1.0));
    CHECK_THROWS_AS(linear_combination(fit, Eigen::VectorXd::Ones(2)), ConfigError);
  }

  TEST_CASE("bootstrap partial R^2") {
    const auto base = testing::random_frame(31, 60, 2, 1.0);
    const std::vector<std::string> controls{"x2"};
    BootstrapOptions o;
    o.resamples = 1000;
    o.seed = 7;
    o.threads = 1;
    const auto one = bootstrap_partial_r2(base, "x1", controls, o);
    o.threads = 4;
    const auto four = bootstrap_partial_r2(base, "x1", controls, o);
    CHECK(one.values == four.values);
    CHECK(one.median == four.median);
    CHECK(one.point == Approx(partial_r2(base, "x1", controls)).epsilon(1e-12));
    CHECK(one.resamples == 1000);

    // A conditioning term that duplicates a control explains nothing new.
    auto dup = base;
    std::vector<double> copy(base.term("x2").values.data(), base.term("x2").values.data() + base.n());
    dup.add("x2_copy", copy);
    o.threads = 2;
    const auto d = bootstrap_partial_r2(dup.select_terms(std::vector<std::string>{"x2", "x2_copy"}), "x2_copy",
                                        controls, o);
    CHECK(d.median < 0.005);

    o.resamples = 999;
    CHECK_THROWS_AS(bootstrap_partial_r2(base, "x1", controls, o), ConfigError);
    o.resamples = 1000;
    CHECK_THROWS_AS(bootstrap_partial_r2(base, "x2", controls, o), ConfigError);
  }

  TEST_CASE("residual diagnostics flag exact fits") {
    ModelFrame f("y", Eigen::VectorXd::LinSpaced(12, 1, 12));
    std::vector<double> x(12);
    std::iota(x.begin(), x.end(), 0.0);
    f.add("x", x);
    const auto fit = ols_fit(f);
    const auto d = residual_diagnostics(f, fit);
    CHECK(d.degenerate_residuals);
    CHECK_FALSE(d.shapiro.has_value());

    const auto g = testing::random_frame(4, 50, 2);
    const auto dg = residual_diagnostics(g, ols_fit(g), std::make_pair(std::string("extra"), g.term("x1").values));
    CHECK_FALSE(dg.degenerate_residuals);
    REQUIRE(dg.shapiro.has_value());
    // Residuals of an OLS fit are uncorrelated with every regressor.
    for (const auto& c : dg.checks) {
      if (c.against == "x1" || c.against == "x2" || c.against == "extra") CHECK(std::abs(c.correlation.r) < 1e-8);
    }
  }
}
