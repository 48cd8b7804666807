#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "lpcode/random.hpp"
#include "lpcode/stats.hpp"

namespace lpcode {
namespace {

double oracle_sf(double f, double d1, double d2) {
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(d1, d2), f));
}

TEST(FUpperTail, Examples) {
  EXPECT_DOUBLE_EQ(f_upper_tail(0, 3, 7), 1.0);
  EXPECT_DOUBLE_EQ(f_upper_tail(INFINITY, 3, 7), 0.0);
  // F(1, 2) is a squared t(2): P(F > 8) = 1 - sqrt(8 / 10).
  EXPECT_NEAR(f_upper_tail(8, 1, 2), 1 - std::sqrt(0.8), 1e-14);
  EXPECT_NEAR(f_upper_tail(8, 1, 2), 0.1056, 1e-4);
  EXPECT_THROW(f_upper_tail(1, 0, 3), InvalidDegrees);
  EXPECT_THROW(f_upper_tail(1, 2, 0.5), InvalidDegrees);
}

TEST(FUpperTail, MatchesReferenceOnGrid) {
  for (double f : {1e-4, 0.01, 0.1, 0.5, 0.9, 1.0, 1.5, 2.0, 3.7, 5.0, 8.0, 20.0, 100.0, 1e3})
    for (double d1 : {1.0, 2.0, 3.0, 4.0, 7.0, 10.0, 30.0, 120.0})
      for (double d2 : {1.0, 2.0, 3.0, 5.0, 10.0, 25.0, 100.0, 1000.0, 7739.0})
        EXPECT_NEAR(f_upper_tail(f, d1, d2), oracle_sf(f, d1, d2), 1e-10) << f << " " << d1 << " " << d2;
}

TEST(FUpperTail, LogSpaceForExtremeTails) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  struct Case {
    double f, d1, d2;
  };
  for (auto c : {Case{700, 1, 3000}, Case{2000, 1, 7000}, Case{5000, 1, 9000}, Case{400, 3, 800}}) {
    Big p = boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<Big>(c.d1, c.d2), Big(c.f)));
    double expect = static_cast<double>(log(p));
    double got = log_f_upper_tail(c.f, c.d1, c.d2);
    EXPECT_TRUE(std::isfinite(got));
    EXPECT_NEAR(got, expect, 1e-9 * std::fabs(expect)) << c.f;
  }
  EXPECT_LT(log_f_upper_tail(5000, 1, 9000), std::log(1e-300));
}

TEST(FUpperTail, MonotoneInF) {
  for (double d1 : {1.0, 4.0})
    for (double d2 : {3.0, 50.0}) {
      double prev = 1.0;
      for (double f = 0.05; f < 60; f *= 1.3) {
        double p = f_upper_tail(f, d1, d2);
        EXPECT_LE(p, prev);
        prev = p;
      }
    }
}

TEST(IncompleteBeta, KnownValues) {
  EXPECT_NEAR(incomplete_beta(1, 1, 0.3), 0.3, 1e-15);
  EXPECT_NEAR(incomplete_beta(2, 1, 0.5), 0.25, 1e-15);
  EXPECT_NEAR(incomplete_beta(0.5, 0.5, 0.5), 0.5, 1e-14);
  EXPECT_EQ(incomplete_beta(3, 2, 0), 0.0);
  EXPECT_EQ(incomplete_beta(3, 2, 1), 1.0);
}

TEST(Anova, Examples) {
  auto same = one_way_anova({{1, 2, 3}, {1, 2, 3}});
  EXPECT_EQ(same.f_statistic, 0.0);
  EXPECT_DOUBLE_EQ(same.p_value, 1.0);
  EXPECT_FALSE(same.significant);

  auto r = one_way_anova({{1, 2}, {3, 4}});
  EXPECT_NEAR(r.f_statistic, 8.0, 1e-9);
  EXPECT_EQ(r.df_between, 1);
  EXPECT_EQ(r.df_within, 2);
  EXPECT_NEAR(r.p_value, oracle_sf(8, 1, 2), 1e-12);
  EXPECT_FALSE(r.significant);
}

TEST(Anova, DegenerateCases) {
  auto sep = one_way_anova({{1, 1, 1}, {2, 2}});
  EXPECT_TRUE(sep.degenerate);
  EXPECT_TRUE(std::isinf(sep.f_statistic));
  EXPECT_EQ(sep.p_value, 0.0);
  EXPECT_TRUE(sep.significant);

  auto flat = one_way_anova({{0.1, 0.1, 0.1}, {0.1, 0.1}});
  EXPECT_TRUE(flat.degenerate);
  EXPECT_EQ(flat.f_statistic, 0.0);
  EXPECT_EQ(flat.p_value, 1.0);

  EXPECT_THROW(one_way_anova({{1, 2, 3}}), InvalidGroups);
  EXPECT_THROW(one_way_anova({{1, 2}, {}}), InvalidGroups);
  EXPECT_THROW(one_way_anova({{1}, {2}}), InvalidGroups);
  EXPECT_THROW(one_way_anova({{1, NAN}, {2, 3}}), InvalidGroups);
}

std::vector<double> sample(Rng& rng, std::size_t n, double shift) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1) + shift;
  return v;
}

TEST(Anova, TwoGroupFEqualsTSquared) {
  Rng rng(101);
  for (int t = 0; t < 100; ++t) {
    auto a = sample(rng, 2 + rng.below(30), 0.0);
    auto b = sample(rng, 2 + rng.below(30), rng.uniform(-1, 1));
    auto mean = [](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    double ma = mean(a), mb = mean(b), ss = 0;
    for (double x : a) ss += (x - ma) * (x - ma);
    for (double x : b) ss += (x - mb) * (x - mb);
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double sp2 = ss / (na + nb - 2);
    double tstat = (ma - mb) / std::sqrt(sp2 * (1 / na + 1 / nb));
    auto r = one_way_anova({a, b});
    EXPECT_NEAR(r.f_statistic, tstat * tstat, 1e-9 * tstat * tstat);
  }
}

TEST(Anova, InvariantUnderShiftAndScale) {
  Rng rng(103);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> groups;
    auto k = 2 + rng.below(4);
    for (std::size_t g = 0; g < k; ++g) groups.push_back(sample(rng, 2 + rng.below(20), rng.uniform(0, 1)));
    double base = one_way_anova(groups).f_statistic;
    double c = rng.uniform(-100, 100), s = rng.uniform(0.01, 50) * (rng.below(2) ? 1 : -1);
    auto moved = groups;
    for (auto& g : moved)
      for (auto& x : g) x = x * s + c;
    EXPECT_NEAR(one_way_anova(moved).f_statistic, base, 1e-9 * base);
  }
}

TEST(Anova, MatchesReferencePValuesOnRandomGroups) {
  Rng rng(107);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<double>> groups;
    auto k = 2 + rng.below(3);
    for (std::size_t g = 0; g < k; ++g) groups.push_back(sample(rng, 2 + rng.below(40), rng.uniform(0, 0.5)));
    auto r = one_way_anova(groups);
    EXPECT_NEAR(r.p_value, oracle_sf(r.f_statistic, r.df_between, r.df_within), 1e-10);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
    EXPECT_EQ(r.df_between, static_cast<int>(k) - 1);
  }
}

FeatureRow row(Generator g, Language lang, double comment, double var_naming) {
  FeatureRow r;
  r.id = "x";
  r.generator = g;
  r.language = lang;
  r.features.comment_ratio = comment;
  r.features.variable_naming_consistency = var_naming;
  return r;
}

TEST(AnovaReport, SortedHumanVersusPooledLlm) {
  Rng rng(109);
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 60; ++i) {
    rows.push_back(row(Generator::Human, Language::C, rng.uniform(0, 0.3), rng.uniform(0.5, 1)));
    rows.push_back(row(kLlmGenerators[i % 4], Language::C, rng.uniform(0.2, 0.5), rng.uniform(0.55, 1)));
    rows.push_back(row(Generator::Human, Language::Java, 1, 1));
  }
  auto rep = anova_report(rows, Language::C);
  ASSERT_EQ(rep.size(), 10u);
  EXPECT_EQ(rep.front().feature, "comment_ratio");
  for (std::size_t i = 1; i < rep.size(); ++i) EXPECT_GE(rep[i - 1].f_statistic, rep[i].f_statistic);
  EXPECT_EQ(rep.front().df_within, 118);
  EXPECT_THROW(anova_report(rows, Language::Java), InvalidGroups);
  EXPECT_THROW(anova_report(rows, Language::Python), InvalidGroups);
}

TEST(AnovaReport, CsvLayout) {
  AnovaResult r;
  r.feature = "comment_ratio";
  r.f_statistic = 153.71;
  r.p_value = 0;
  r.log10_p = -400.5;
  r.significant = true;
  std::ostringstream out;
  write_anova_csv_header(out);
  write_anova_csv(out, Language::C, {r});
  EXPECT_EQ(out.str(), "language,feature,f_statistic,p_value,significant\nc,comment_ratio,153.71,3.16227766e-401,true\n");
}

}  // namespace
}  // namespace lpcode
