#include "lwire/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lwire/errors.hpp"

namespace lwire::sturm {

long count_below(std::span<const double> diag, std::span<const double> off, double x) {
  // Pivots of the LDL^T factorization of T - x I; a zero pivot is nudged
  // to a tiny negative-free value, the usual LAPACK dstebz convention.
  const double tiny = std::numeric_limits<double>::min();
  long count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double b2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    q = (diag[i] - x) - (i == 0 ? 0.0 : b2 / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> lowest_eigenvalues(std::span<const double> diag, std::span<const double> off,
                                       int k) {
  const std::size_t n = diag.size();
  if (n == 0 || off.size() + 1 != n) throw InvalidArgument("tridiagonal shape mismatch");
  if (k < 1 || static_cast<std::size_t>(k) > n) throw InvalidArgument("k out of range");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double pad = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  lo -= pad;
  hi += pad;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    // j-th eigenvalue: smallest x with count_below(x) > j.
    double a = out.empty() ? lo : out.back() - pad;
    double b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count_below(diag, off, mid) > j) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

}  // namespace lwire::sturm
