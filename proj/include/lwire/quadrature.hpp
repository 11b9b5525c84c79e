#pragma once

// Composite Gauss-Legendre rules on unions of panels.

#include <functional>
#include <vector>

namespace lwire::quad {

/// Nodes and weights of a composite rule.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;

  /// Sum of w_i f(x_i).
  double apply(const std::function<double(double)>& f) const;
};

/// 8-point Gauss-Legendre on each of `panels` equal panels of [lo, hi].
Rule uniform(double lo, double hi, int panels);

/// 8-point Gauss-Legendre on `panels` panels of [lo, hi] (lo > 0) whose
/// widths grow geometrically, so each panel spans the same ratio hi/lo.
Rule geometric(double lo, double hi, int panels);

/// Concatenation of two rules.
Rule join(Rule a, const Rule& b);

}  // namespace lwire::quad
