#pragma once

// Sturm-sequence bisection for symmetric tridiagonal matrices.

#include <span>
#include <vector>

namespace lwire::sturm {

/// Number of eigenvalues strictly below x of the tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off` (off.size() == diag.size() - 1).
long count_below(std::span<const double> diag, std::span<const double> off, double x);

/// The k lowest eigenvalues, ascending, each bisected to the last ulp of
/// the Gershgorin interval.
std::vector<double> lowest_eigenvalues(std::span<const double> diag, std::span<const double> off,
                                       int k);

}  // namespace lwire::sturm
