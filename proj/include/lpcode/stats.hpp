#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lpcode/errors.hpp"
#include "lpcode/style_features.hpp"
#include "lpcode/types.hpp"

namespace lpcode {

namespace detail {

/// Continued fraction of the incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// log I_x(a, b) by the direct continued fraction; takes x and 1-x separately
/// so callers can avoid cancellation. Accurate when x < (a+1)/(a+b+2).
inline double log_ibeta_direct(double a, double b, double x, double one_minus_x) {
  return a * std::log(x) + b * std::log(one_minus_x) - log_beta(a, b) + std::log(beta_cf(a, b, x) / a);
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw InvalidDegrees("incomplete beta needs a, b > 0");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  if (x < (a + 1) / (a + b + 2)) return std::exp(detail::log_ibeta_direct(a, b, x, 1 - x));
  return 1.0 - std::exp(detail::log_ibeta_direct(b, a, 1 - x, x));
}

/// Natural log of P(F > f) for F ~ F(d1, d2). Stays finite far below the
/// smallest double.
inline double log_f_upper_tail(double f, double d1, double d2) {
  if (!(d1 >= 1) || !(d2 >= 1) || !std::isfinite(d1) || !std::isfinite(d2))
    throw InvalidDegrees("F distribution needs d1, d2 >= 1");
  if (std::isnan(f)) throw InvalidDegrees("F statistic is NaN");
  if (f <= 0) return 0.0;
  if (std::isinf(f)) return -std::numeric_limits<double>::infinity();
  // P(F > f) = I_x(d2/2, d1/2) with x = d2 / (d2 + d1 f).
  const double a = d2 / 2, b = d1 / 2;
  const double denom = d2 + d1 * f;
  const double x = d2 / denom, one_minus_x = d1 * f / denom;
  if (x < (a + 1) / (a + b + 2)) return detail::log_ibeta_direct(a, b, x, one_minus_x);
  return std::log1p(-std::exp(detail::log_ibeta_direct(b, a, one_minus_x, x)));
}

inline double f_upper_tail(double f, double d1, double d2) {
  return std::exp(log_f_upper_tail(f, d1, d2));
}

struct AnovaResult {
  std::string feature;
  double f_statistic = 0;
  double p_value = 1;
  double log10_p = 0;  // exact even when p_value underflows
  int df_between = 0;
  int df_within = 0;
  bool significant = false;
  bool degenerate = false;  // zero within-group variance
};

/// One-way ANOVA. Zero within-group variance is reported, not thrown:
/// F = +inf, p = 0 when the means differ; F = 0, p = 1 when all values match.
inline AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups, double alpha = 0.05) {
  if (groups.size() < 2) throw InvalidGroups("need at least two groups, got " + std::to_string(groups.size()));
  std::size_t n = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw InvalidGroups("empty group");
    for (double x : g)
      if (!std::isfinite(x)) throw InvalidGroups("non-finite observation");
    n += g.size();
  }
  if (n <= groups.size()) throw InvalidGroups("need more observations than groups");

  // Constant samples get their exact value as mean so rounding cannot
  // invent variance.
  auto mean_of = [](std::span<const double> v) {
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return v.front();
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  std::vector<double> all;
  all.reserve(n);
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  const double grand = mean_of(all);
  double ssb = 0, ssw = 0;
  for (const auto& g : groups) {
    double m = mean_of(g);
    ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double x : g) ssw += (x - m) * (x - m);
  }

  AnovaResult r;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n - groups.size());
  if (ssw == 0) {
    r.degenerate = true;
    if (ssb == 0) {
      r.f_statistic = 0;
      r.p_value = 1;
      r.log10_p = 0;
    } else {
      r.f_statistic = std::numeric_limits<double>::infinity();
      r.p_value = 0;
      r.log10_p = -std::numeric_limits<double>::infinity();
    }
  } else {
    r.f_statistic = (ssb / r.df_between) / (ssw / r.df_within);
    double lp = log_f_upper_tail(r.f_statistic, r.df_between, r.df_within);
    r.p_value = std::exp(lp);
    r.log10_p = lp / std::log(10.0);
  }
  r.significant = r.p_value < alpha;
  return r;
}

// ---------------------------------------------------------------------------
// Feature tables and the per-language report

struct FeatureRow {
  std::string id;
  Generator generator = Generator::Human;
  Language language = Language::C;
  StyleVector features;
};

/// Human vs pooled-LLM ANOVA for every feature of one language, strongest first.
inline std::vector<AnovaResult> anova_report(const std::vector<FeatureRow>& rows, Language lang,
                                             double alpha = 0.05) {
  std::vector<std::vector<double>> human(kStyleDims), llm(kStyleDims);
  for (const auto& r : rows) {
    if (r.language != lang) continue;
    auto v = r.features.values();
    auto& dst = r.generator == Generator::Human ? human : llm;
    for (std::size_t i = 0; i < kStyleDims; ++i) dst[i].push_back(v[i]);
  }
  if (human[0].empty() || llm[0].empty())
    throw InvalidGroups(std::string(to_string(lang)) + ": need both human and LLM rows");
  std::vector<AnovaResult> out;
  for (std::size_t i = 0; i < kStyleDims; ++i) {
    auto r = one_way_anova({human[i], llm[i]}, alpha);
    r.feature = std::string(kFeatureNames[i]);
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const AnovaResult& a, const AnovaResult& b) { return a.f_statistic > b.f_statistic; });
  return out;
}

inline std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// p-values below the double range are written from log10_p, e.g. 3.2e-400.
inline std::string format_p_value(const AnovaResult& r) {
  if (r.p_value > 0 || std::isinf(r.log10_p)) return format_real(r.p_value);
  double e = std::floor(r.log10_p);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9fe%+.0f", std::pow(10.0, r.log10_p - e), e);
  std::string s = buf;
  auto dot = s.find('.');
  auto ex = s.find('e');
  auto last = s.find_last_not_of('0', ex - 1);
  s.erase(last == dot ? dot : last + 1, ex - (last == dot ? dot : last + 1));
  return s;
}

inline void write_anova_csv_header(std::ostream& out) {
  out << "language,feature,f_statistic,p_value,significant\n";
}

inline void write_anova_csv(std::ostream& out, Language lang, const std::vector<AnovaResult>& results) {
  for (const auto& r : results)
    out << to_string(lang) << ',' << r.feature << ',' << format_real(r.f_statistic) << ','
        << format_p_value(r) << ',' << (r.significant ? "true" : "false") << '\n';
}

}  // namespace lpcode
