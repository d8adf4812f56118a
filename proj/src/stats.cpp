#include "retract/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace retract::stats {

namespace {

constexpr std::string_view kModule = "stats";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
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
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  fail(ErrorKind::degenerate, "incomplete beta continued fraction did not converge");
}

}  // namespace

double median(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::invalid_argument, "median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) fail(ErrorKind::invalid_argument, "beta parameters must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, double d1, double d2) {
  if (d1 <= 0.0 || d2 <= 0.0) fail(ErrorKind::invalid_argument, "F degrees of freedom must be > 0");
  if (!(f > 0.0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

std::vector<std::uint64_t> mann_whitney_null_counts(std::size_t n1, std::size_t n2) {
  if (n1 + n2 > 60) fail(ErrorKind::invalid_argument, "exact Mann-Whitney limited to n1 + n2 <= 60");
  // prev[j][u] holds counts for (i - 1, j); cur for (i, j).
  const std::size_t umax = n1 * n2;
  std::vector<std::vector<std::uint64_t>> prev(n2 + 1, std::vector<std::uint64_t>(umax + 1, 0));
  for (std::size_t j = 0; j <= n2; ++j) prev[j][0] = 1;  // i = 0
  for (std::size_t i = 1; i <= n1; ++i) {
    std::vector<std::vector<std::uint64_t>> cur(n2 + 1, std::vector<std::uint64_t>(umax + 1, 0));
    cur[0][0] = 1;
    for (std::size_t j = 1; j <= n2; ++j) {
      // The largest value belongs to group a (adds j to U) or to group b.
      for (std::size_t u = 0; u <= umax; ++u) {
        std::uint64_t v = cur[j - 1][u];
        if (u >= j) v += prev[j][u - j];
        cur[j][u] = v;
      }
    }
    prev = std::move(cur);
  }
  return prev[n2];
}

MWResult mann_whitney_u(std::span<const double> group_a, std::span<const double> group_b,
                        Alternative alternative, MwMethod method) {
  if (group_a.empty() || group_b.empty()) {
    fail(ErrorKind::invalid_argument, "Mann-Whitney needs two non-empty groups");
  }
  const std::size_t n1 = group_a.size(), n2 = group_b.size(), n = n1 + n2;
  std::vector<std::pair<double, bool>> pooled;  // value, belongs to a
  pooled.reserve(n);
  for (double v : group_a) pooled.emplace_back(v, true);
  for (double v : group_b) pooled.emplace_back(v, false);
  for (const auto& [v, a] : pooled) {
    if (std::isnan(v)) fail(ErrorKind::invalid_argument, "Mann-Whitney input contains NaN");
  }
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  double rank_sum_a = 0.0, tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i + 1);
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    for (std::size_t k = i; k <= j; ++k) {
      if (pooled[k].second) rank_sum_a += midrank;
    }
    i = j + 1;
  }

  MWResult r;
  r.n_treatment = n1;
  r.n_control = n2;
  r.u_statistic = rank_sum_a - 0.5 * static_cast<double>(n1 * (n1 + 1));
  r.median_treatment = median(group_a);
  r.median_control = median(group_b);

  bool exact = false;
  switch (method) {
    case MwMethod::automatic: exact = !ties && n1 <= kExactLimit && n2 <= kExactLimit; break;
    case MwMethod::exact:
      if (ties) fail(ErrorKind::invalid_argument, "exact Mann-Whitney requires tie-free samples");
      exact = true;
      break;
    case MwMethod::normal: exact = false; break;
  }

  if (exact) {
    r.mode = MwMode::exact;
    auto counts = mann_whitney_null_counts(n1, n2);
    const auto u = static_cast<std::size_t>(std::llround(r.u_statistic));
    long double total = 0, lower = 0, upper = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      total += counts[k];
      if (k <= u) lower += counts[k];
      if (k >= u) upper += counts[k];
    }
    const double p_lower = static_cast<double>(lower / total);
    const double p_upper = static_cast<double>(upper / total);
    switch (alternative) {
      case Alternative::two_sided: r.p_value = std::min(1.0, 2.0 * std::min(p_lower, p_upper)); break;
      case Alternative::less: r.p_value = p_lower; break;
      case Alternative::greater: r.p_value = p_upper; break;
    }
    return r;
  }

  r.mode = MwMode::normal_approx;
  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
  const double dn = dn1 + dn2;
  const double mu = 0.5 * dn1 * dn2;
  double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (n < 2 || var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double sd = std::sqrt(var);
  const double diff = r.u_statistic - mu;
  switch (alternative) {
    case Alternative::two_sided: {
      double z = std::max(0.0, std::fabs(diff) - 0.5) / sd;
      r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
      break;
    }
    case Alternative::less: r.p_value = normal_cdf((diff + 0.5) / sd); break;
    case Alternative::greater: r.p_value = 1.0 - normal_cdf((diff - 0.5) / sd); break;
  }
  return r;
}

GrangerResult granger_test(std::span<const double> x, std::span<const double> y, int lags) {
  if (lags < 1) fail(ErrorKind::invalid_argument, "lag order must be >= 1");
  if (x.size() != y.size()) fail(ErrorKind::invalid_argument, "series lengths differ");
  const auto n = static_cast<std::size_t>(lags);
  if (y.size() < granger_min_length(lags)) {
    fail(ErrorKind::invalid_argument,
         "series too short for " + std::to_string(lags) + " lags: need at least " +
             std::to_string(granger_min_length(lags)) + " observations, got " +
             std::to_string(y.size()));
  }
  const std::size_t rows = y.size() - n;
  const std::size_t cols_r = 1 + n, cols_u = 1 + 2 * n;
  Matrix restricted(rows, cols_r), full(rows, cols_u);
  std::vector<double> response(rows);
  std::vector<std::string> names{"intercept"};
  for (std::size_t i = 1; i <= n; ++i) names.push_back("y_lag" + std::to_string(i));
  for (std::size_t j = 1; j <= n; ++j) names.push_back("x_lag" + std::to_string(j));

  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + n;
    response[r] = y[t];
    restricted(r, 0) = full(r, 0) = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
      restricted(r, i) = full(r, i) = y[t - i];
      full(r, n + i) = x[t - i];
    }
  }

  GrangerResult g;
  g.lags = lags;
  g.observations = rows;
  g.df_numerator = lags;
  g.df_denominator = static_cast<int>(rows - cols_u);

  OlsFit fit_r;
  try {
    fit_r = ols_fit(restricted, response, std::span(names).first(cols_r));
  } catch (const RankDeficientError& e) {
    fail(ErrorKind::degenerate, "response series has no variation to explain (" +
                                    std::string(e.what()) + ")");
  }

  OlsFit fit_u;
  try {
    fit_u = ols_fit(full, response, names);
  } catch (const RankDeficientError& e) {
    if (e.column() < cols_r) throw;
    g.degenerate = true;
    g.intercept = fit_r.coefficients[0];
    g.a.assign(fit_r.coefficients.begin() + 1, fit_r.coefficients.end());
    g.b.assign(n, 0.0);
    g.residual_variance = fit_r.rss / static_cast<double>(rows - cols_r);
    g.f_statistic = 0.0;
    g.p_value = 1.0;
    return g;
  }

  g.intercept = fit_u.coefficients[0];
  g.a.assign(fit_u.coefficients.begin() + 1, fit_u.coefficients.begin() + 1 + lags);
  g.b.assign(fit_u.coefficients.begin() + 1 + lags, fit_u.coefficients.end());
  const double df2 = static_cast<double>(g.df_denominator);
  g.residual_variance = fit_u.rss / df2;
  const double gain = std::max(0.0, fit_r.rss - fit_u.rss);
  if (fit_u.rss <= 0.0) {
    g.f_statistic = gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    g.p_value = gain > 0.0 ? 0.0 : 1.0;
    return g;
  }
  g.f_statistic = (gain / static_cast<double>(n)) / (fit_u.rss / df2);
  g.p_value = f_distribution_sf(g.f_statistic, static_cast<double>(n), df2);
  return g;
}

}  // namespace retract::stats
