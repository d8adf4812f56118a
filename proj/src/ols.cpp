#include <cmath>

#include "retract/stats.hpp"

namespace retract::stats {

OlsFit ols_fit(const Matrix& design, std::span<const double> y,
               std::span<const std::string> column_names) {
  const std::size_t m = design.rows(), n = design.cols();
  if (y.size() != m) throw Error(ErrorKind::invalid_argument, "stats", "response length mismatch");
  if (n == 0 || m < n + 1) {
    throw Error(ErrorKind::invalid_argument, "stats",
                "least squares needs rows >= columns + 1 (" + std::to_string(m) + " x " +
                    std::to_string(n) + ")");
  }

  Matrix a = design;
  std::vector<double> qty(y.begin(), y.end());
  std::vector<double> col_norm(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += design(i, j) * design(i, j);
    col_norm[j] = std::sqrt(s);
  }

  auto column_label = [&](std::size_t j) {
    return j < column_names.size() ? column_names[j] : "column " + std::to_string(j);
  };

  // Householder reflections, applied in place to `a` and `qty`.
  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    if (col_norm[k] == 0.0 || norm <= 1e-10 * col_norm[k]) {
      throw RankDeficientError(k, "design is rank deficient: " + column_label(k) +
                                      " is linearly dependent on earlier columns");
    }
    const double alpha = a(k, k) > 0 ? -norm : norm;
    std::vector<double> v(m - k);
    v[0] = a(k, k) - alpha;
    for (std::size_t i = k + 1; i < m; ++i) v[i - k] = a(i, k);
    double vnorm2 = 0.0;
    for (double e : v) vnorm2 += e * e;
    if (vnorm2 > 0.0) {
      for (std::size_t j = k; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * a(i, j);
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < m; ++i) a(i, j) -= f * v[i - k];
      }
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * qty[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < m; ++i) qty[i] -= f * v[i - k];
    }
  }

  OlsFit fit;
  fit.coefficients.assign(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    double s = qty[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * fit.coefficients[j];
    fit.coefficients[k] = s / a(k, k);
  }
  for (std::size_t i = n; i < m; ++i) fit.rss += qty[i] * qty[i];
  return fit;
}

}  // namespace retract::stats
