#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "retract/types.hpp"

namespace retract::stats {

enum class Alternative { two_sided, less, greater };

/// `automatic` enumerates the exact null distribution when both groups have
/// at most kExactLimit values and there are no ties, and otherwise uses the
/// tie-corrected normal approximation with continuity correction.
enum class MwMethod { automatic, exact, normal };

enum class MwMode { exact, normal_approx };

inline constexpr std::size_t kExactLimit = 8;

struct MWResult {
  double u_statistic = 0.0;  // U of group a: #(a > b) + 0.5 #(a == b)
  double p_value = 1.0;
  double median_treatment = 0.0;
  double median_control = 0.0;
  std::size_t n_treatment = 0;
  std::size_t n_control = 0;
  MwMode mode = MwMode::normal_approx;
};

MWResult mann_whitney_u(std::span<const double> group_a, std::span<const double> group_b,
                        Alternative alternative = Alternative::two_sided,
                        MwMethod method = MwMethod::automatic);

/// Null distribution of U for tie-free samples: counts[u] = number of rank
/// assignments with U == u, for u = 0..n1*n2.
std::vector<std::uint64_t> mann_whitney_null_counts(std::size_t n1, std::size_t n2);

double median(std::span<const double> values);

/// Standard normal lower tail.
double normal_cdf(double z);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) of the F(d1, d2) distribution.
double f_distribution_sf(double f, double d1, double d2);

// ---------------------------------------------------------------------------
// Least squares

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct OlsFit {
  std::vector<double> coefficients;
  double rss = 0.0;
};

/// Raised when a design column is linearly dependent on earlier columns.
class RankDeficientError : public Error {
 public:
  RankDeficientError(std::size_t column, const std::string& what)
      : Error(ErrorKind::degenerate, "stats", what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Least squares through Householder QR. Needs rows >= cols + 1.
OlsFit ols_fit(const Matrix& design, std::span<const double> y,
               std::span<const std::string> column_names = {});

// ---------------------------------------------------------------------------
// Granger causality

struct GrangerResult {
  int lags = 1;
  double f_statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> a;  // coefficients of Y(t-i), unrestricted model
  std::vector<double> b;  // coefficients of X(t-j)
  double intercept = 0.0;
  double residual_variance = 0.0;
  std::size_t observations = 0;  // usable rows after lagging
  int df_numerator = 0;
  int df_denominator = 0;
  // Lagged X carried no information beyond the intercept and lagged Y
  // (constant or collinear regressor). Reported as non-causal.
  bool degenerate = false;
};

/// F-test of Y(t) = sum A_i Y(t-i) + sum B_j X(t-j) + C against the model
/// without the X lags. Requires len - lags >= 2 * lags + 2.
GrangerResult granger_test(std::span<const double> x, std::span<const double> y, int lags);

/// Minimum series length for a lag order.
inline std::size_t granger_min_length(int lags) {
  return static_cast<std::size_t>(3 * lags + 2);
}

}  // namespace retract::stats
