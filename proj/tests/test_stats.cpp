#include <doctest.h>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "retract/stats.hpp"

using namespace retract::stats;

namespace {

std::vector<double> distinct_values(std::mt19937_64& rng, std::size_t n, std::vector<double>& used) {
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> out;
  while (out.size() < n) {
    double v = std::round(u(rng) * 1000.0) / 1000.0;
    if (std::find(used.begin(), used.end(), v) != used.end()) continue;
    used.push_back(v);
    out.push_back(v);
  }
  return out;
}

// Frozen from an independent rank-sum implementation (normal approximation,
// tie-corrected variance, continuity correction 0.5).
const std::vector<double> kTiedA = {1.5, 2.0, 2.0, 3.25, 4.0, 4.0, 5.5, 7.0, 8.0, 9.5};
const std::vector<double> kTiedB = {2.0, 3.0, 3.25, 4.0, 6.0, 6.5, 10.0, 11.0, 12.0};

// Granger fixture, T = 40; reference F and p from an OLS F-test on lagged
// regressors with a constant.
const std::vector<double> kGx = {
    0.00123,   0.298746,  -0.274138, -0.890592, -0.454671, -0.991647, 0.060144,  1.340215,
    -0.492207, -0.620475, 0.489842,  0.356887,  0.105414,  -0.930468, -0.029252, 0.695303,
    -1.344215, -0.457616, -1.901223, -1.289538, -1.841735, -0.235091, -1.267446, 0.271264,
    0.156751,  -0.186931, -2.51676,  -0.538693, -0.048501, 0.113309,  -1.530136, -0.477753,
    -0.978519, -0.808837, 1.060899,  -0.807535, -0.032522, 0.88439,   -0.5836,   -0.111702};
const std::vector<double> kGy = {
    0.0,       0.055601,  0.143755,  -0.637267, -0.484014, 0.349405,  -0.931305, 0.075213,
    0.491827,  -0.271667, 0.705399,  0.810242,  -0.168482, 0.00149,   0.0098,    -0.099247,
    0.510347,  -0.232384, 0.103385,  0.190249,  -0.648593, -0.710388, -0.586336, -0.551134,
    -0.732672, -0.535694, -0.368455, -0.453028, 0.229792,  -0.584397, -0.597087, -0.374424,
    -1.289305, -1.040863, -0.70764,  0.663721,  0.36793,   -0.026191, 0.070553,  -0.271957};

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("exact Mann-Whitney matches full enumeration for every size up to 8") {
  std::mt19937_64 rng(7);
  for (std::size_t n1 = 1; n1 <= kExactLimit; ++n1) {
    for (std::size_t n2 = 1; n2 <= kExactLimit; ++n2) {
      std::vector<double> used;
      auto a = distinct_values(rng, n1, used);
      auto b = distinct_values(rng, n2, used);
      auto ref = oracle::mann_whitney_enumerate(a, b);
      auto two = mann_whitney_u(a, b, Alternative::two_sided);
      CHECK(two.mode == MwMode::exact);
      CHECK(two.u_statistic == ref.u);
      CHECK(std::fabs(two.p_value - ref.p_two_sided) <= 1e-12);
      auto less = mann_whitney_u(a, b, Alternative::less);
      CHECK(std::fabs(less.p_value - ref.p_less) <= 1e-12);
      auto greater = mann_whitney_u(a, b, Alternative::greater);
      CHECK(std::fabs(greater.p_value - ref.p_greater) <= 1e-12);
    }
  }
}

TEST_CASE("normal approximation with ties matches frozen reference") {
  auto two = mann_whitney_u(kTiedA, kTiedB, Alternative::two_sided);
  CHECK(two.mode == MwMode::normal_approx);
  CHECK(two.u_statistic == doctest::Approx(32.5));
  CHECK(two.p_value == doctest::Approx(0.3252696478109498).epsilon(1e-10));
  CHECK(mann_whitney_u(kTiedA, kTiedB, Alternative::less).p_value ==
        doctest::Approx(0.1626348239054749).epsilon(1e-10));
  CHECK(mann_whitney_u(kTiedA, kTiedB, Alternative::greater).p_value ==
        doctest::Approx(0.8567114177510269).epsilon(1e-10));
  CHECK(two.median_treatment == doctest::Approx(4.0));
  CHECK(two.median_control == doctest::Approx(6.0));
  CHECK(two.n_treatment == 10);
  CHECK(two.n_control == 9);
}

TEST_CASE("groups larger than 8 use the normal approximation") {
  std::vector<double> a = {0.3, 1.7, 2.2, 5.1, 6.6, 7.2, 8.8, 9.9, 10.4, 12.5, 13.1};
  std::vector<double> b = {0.1, 0.9, 1.1, 2.8, 3.3, 4.4, 4.9, 5.0, 6.0};
  auto r = mann_whitney_u(a, b);
  CHECK(r.mode == MwMode::normal_approx);
  CHECK(r.u_statistic == doctest::Approx(78.0));
  CHECK(r.p_value == doctest::Approx(0.03339814633921801).epsilon(1e-10));
}

TEST_CASE("ties within small groups fall back to the normal approximation") {
  std::vector<double> a = {1.0, 2.0, 2.0};
  std::vector<double> b = {2.0, 3.0, 4.0};
  CHECK(mann_whitney_u(a, b).mode == MwMode::normal_approx);
  CHECK_THROWS_AS(mann_whitney_u(a, b, Alternative::two_sided, MwMethod::exact), retract::Error);
}

TEST_CASE("Mann-Whitney properties") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 30);
  std::uniform_int_distribution<int> value(0, 20);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(size(rng)));
    std::vector<double> b(static_cast<std::size_t>(size(rng)));
    for (auto& v : a) v = value(rng);
    for (auto& v : b) v = value(rng);
    auto ab = mann_whitney_u(a, b);
    auto ba = mann_whitney_u(b, a);
    CHECK(ab.u_statistic + ba.u_statistic ==
          doctest::Approx(static_cast<double>(a.size() * b.size())));
    CHECK(ab.p_value >= 0.0);
    CHECK(ab.p_value <= 1.0);
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
    auto less_ab = mann_whitney_u(a, b, Alternative::less);
    auto greater_ba = mann_whitney_u(b, a, Alternative::greater);
    CHECK(less_ab.p_value == doctest::Approx(greater_ba.p_value).epsilon(1e-12));
  }
}

TEST_CASE("Mann-Whitney rejects empty groups and NaN") {
  std::vector<double> a = {1.0, 2.0};
  std::vector<double> empty;
  CHECK_THROWS_AS(mann_whitney_u(a, empty), retract::Error);
  std::vector<double> bad = {1.0, std::nan("")};
  CHECK_THROWS_AS(mann_whitney_u(a, bad), retract::Error);
}

TEST_CASE("null distribution counts are symmetric and sum to the binomial") {
  for (std::size_t n1 = 1; n1 <= 8; ++n1) {
    for (std::size_t n2 = 1; n2 <= 8; ++n2) {
      auto counts = mann_whitney_null_counts(n1, n2);
      REQUIRE(counts.size() == n1 * n2 + 1);
      std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
      CHECK(static_cast<double>(total) ==
            boost::math::binomial_coefficient<double>(static_cast<unsigned>(n1 + n2),
                                                      static_cast<unsigned>(n1)));
      for (std::size_t u = 0; u < counts.size(); ++u) {
        CHECK(counts[u] == counts[counts.size() - 1 - u]);
      }
    }
  }
}

TEST_CASE("median") {
  std::vector<double> odd = {5.0, 1.0, 3.0};
  std::vector<double> even = {4.0, 1.0, 3.0, 2.0};
  CHECK(median(odd) == 3.0);
  CHECK(median(even) == 2.5);
  std::vector<double> empty;
  CHECK_THROWS_AS(median(empty), retract::Error);
}

TEST_CASE("special functions agree with boost") {
  boost::math::normal_distribution<double> nd;
  for (double z = -8.0; z <= 8.0; z += 0.37) {
    CHECK(normal_cdf(z) == doctest::Approx(boost::math::cdf(nd, z)).epsilon(1e-12));
  }
  const double shapes[] = {0.5, 1.0, 2.5, 7.0, 18.0, 60.0};
  for (double a : shapes) {
    for (double b : shapes) {
      for (double x = 0.0; x <= 1.0; x += 0.05) {
        CHECK(std::fabs(incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)) <= 1e-10);
      }
    }
  }
  for (int d1 = 1; d1 <= 6; ++d1) {
    for (int d2 : {3, 10, 33, 120}) {
      boost::math::fisher_f_distribution<double> fd(d1, d2);
      for (double f : {0.1, 0.8, 1.5, 3.0, 9.0}) {
        CHECK(std::fabs(f_distribution_sf(f, d1, d2) - boost::math::cdf(complement(fd, f))) <=
              1e-10);
      }
    }
  }
}

TEST_CASE("OLS matches the normal-equations oracle") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 30 + static_cast<std::size_t>(trial), cols = 1 + trial % 5;
    Matrix x(rows, cols);
    std::vector<std::vector<double>> xr(rows, std::vector<double>(cols));
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) x(r, c) = xr[r][c] = c == 0 ? 1.0 : n01(rng);
      y[r] = n01(rng);
    }
    auto fit = ols_fit(x, y);
    auto ref = oracle::normal_equations(xr, y);
    double rss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      double e = y[r];
      for (std::size_t c = 0; c < cols; ++c) e -= xr[r][c] * ref[c];
      rss += e * e;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      CHECK(fit.coefficients[c] == doctest::Approx(ref[c]).epsilon(1e-9));
    }
    CHECK(fit.rss == doctest::Approx(rss).epsilon(1e-9));
  }
}

TEST_CASE("OLS reports the dependent column") {
  Matrix x(10, 3);
  std::vector<double> y(10);
  for (std::size_t r = 0; r < 10; ++r) {
    x(r, 0) = 1.0;
    x(r, 1) = static_cast<double>(r);
    x(r, 2) = 2.0 * static_cast<double>(r) + 1.0;
    y[r] = static_cast<double>(r * r);
  }
  try {
    ols_fit(x, y);
    FAIL("expected rank deficiency");
  } catch (const RankDeficientError& e) {
    CHECK(e.column() == 2);
    CHECK(e.kind() == retract::ErrorKind::degenerate);
  }
}

TEST_CASE("Granger F-test matches frozen reference") {
  struct Ref {
    int lags;
    double f, p;
    int d1, d2;
  };
  const Ref refs[] = {{1, 6.648172844765723, 0.01416215347518812, 1, 36},
                      {2, 2.971785593991633, 0.06505635525834205, 2, 33},
                      {3, 2.524092351800387, 0.07646392671415762, 3, 30}};
  for (const auto& ref : refs) {
    CAPTURE(ref.lags);
    auto r = granger_test(kGx, kGy, ref.lags);
    CHECK(r.f_statistic == doctest::Approx(ref.f).epsilon(1e-9));
    CHECK(r.p_value == doctest::Approx(ref.p).epsilon(1e-9));
    CHECK(r.df_numerator == ref.d1);
    CHECK(r.df_denominator == ref.d2);
    CHECK(r.observations == kGx.size() - static_cast<std::size_t>(ref.lags));
    CHECK(r.a.size() == static_cast<std::size_t>(ref.lags));
    CHECK(r.b.size() == static_cast<std::size_t>(ref.lags));
    CHECK_FALSE(r.degenerate);
  }
}

TEST_CASE("Granger coefficients match the normal-equations oracle") {
  const int lags = 2;
  std::vector<std::vector<double>> rows;
  std::vector<double> target;
  for (std::size_t t = lags; t < kGy.size(); ++t) {
    std::vector<double> row = {1.0};
    for (int i = 1; i <= lags; ++i) row.push_back(kGy[t - static_cast<std::size_t>(i)]);
    for (int j = 1; j <= lags; ++j) row.push_back(kGx[t - static_cast<std::size_t>(j)]);
    rows.push_back(row);
    target.push_back(kGy[t]);
  }
  auto ref = oracle::normal_equations(rows, target);
  auto r = granger_test(kGx, kGy, lags);
  CHECK(r.intercept == doctest::Approx(ref[0]).epsilon(1e-9));
  CHECK(r.a[0] == doctest::Approx(ref[1]).epsilon(1e-9));
  CHECK(r.a[1] == doctest::Approx(ref[2]).epsilon(1e-9));
  CHECK(r.b[0] == doctest::Approx(ref[3]).epsilon(1e-9));
  CHECK(r.b[1] == doctest::Approx(ref[4]).epsilon(1e-9));
}

TEST_CASE("Granger rejects short series and mismatched lengths") {
  std::vector<double> x(7, 0.0), y(7, 0.0);
  for (std::size_t i = 0; i < 7; ++i) {
    x[i] = static_cast<double>(i % 3);
    y[i] = static_cast<double>((i * 5) % 7);
  }
  CHECK(granger_min_length(2) == 8);
  CHECK_THROWS_AS(granger_test(x, y, 2), retract::Error);
  std::vector<double> shorter(6, 1.0);
  CHECK_THROWS_AS(granger_test(x, shorter, 1), retract::Error);
  CHECK_THROWS_AS(granger_test(x, y, 0), retract::Error);
}

TEST_CASE("Granger with a constant X is degenerate and non-causal") {
  std::vector<double> x(20, 3.0), y(20);
  for (std::size_t i = 0; i < 20; ++i) y[i] = std::sin(static_cast<double>(i));
  auto r = granger_test(x, y, 1);
  CHECK(r.degenerate);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("Granger p-values are roughly uniform under independence") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  int below = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(40), y(40);
    for (auto& v : x) v = n01(rng);
    for (auto& v : y) v = n01(rng);
    if (granger_test(x, y, 2).p_value < 0.05) ++below;
  }
  // Binomial(400, 0.05): mean 20, sd ~4.4.
  CHECK(below >= 6);
  CHECK(below <= 36);
}

}  // TEST_SUITE
