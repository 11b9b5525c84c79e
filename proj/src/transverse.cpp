#include "lwire/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lwire/errors.hpp"
#include "lwire/sturm.hpp"

namespace lwire {

void PhysicsParams::validate() const {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw InvalidArgument("alpha must be positive and finite, got " + std::to_string(alpha));
  }
  if (!std::isfinite(v0) || v0 < 0.0) {
    throw InvalidArgument("v0 must be non-negative and finite, got " + std::to_string(v0));
  }
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::Supercritical: return "Supercritical";
  }
  return "?";
}

Regime classify_regime(const PhysicsParams& p) {
  p.validate();
  const double a2 = p.alpha * p.alpha;
  if (std::abs(p.v0 - a2) <= kCriticalRelTol * a2) return Regime::Critical;
  return p.v0 < a2 ? Regime::Subcritical : Regime::Supercritical;
}

double essential_threshold(const PhysicsParams& p) {
  if (classify_regime(p) != Regime::Subcritical) return 0.0;
  const double q = (p.alpha * p.alpha - p.v0) / (2.0 * p.alpha);
  return -q * q;
}

TransverseSpectrum transverse_bound_state(const PhysicsParams& p) {
  TransverseSpectrum out;
  if (classify_regime(p) != Regime::Subcritical) return out;
  // Matching exp(kappa_- x) and exp(-kappa_+ x) across the delta gives
  // kappa_- + kappa_+ = alpha and kappa_+^2 - kappa_-^2 = v0.
  const double km = (p.alpha * p.alpha - p.v0) / (2.0 * p.alpha);
  const double kp = (p.alpha * p.alpha + p.v0) / (2.0 * p.alpha);
  out.bound_energy = -km * km;
  out.kappa_minus = km;
  out.kappa_plus = kp;
  return out;
}

double generalized_zero_mode(const PhysicsParams& p, double x) {
  if (classify_regime(p) != Regime::Critical) {
    throw InvalidRegime("generalized_zero_mode is defined only for v0 = alpha^2");
  }
  return x <= 0.0 ? 1.0 : std::exp(-std::sqrt(p.v0) * x);
}

Grid1D::Grid1D(double x_min, double x_max, double h) : x_min_(x_min), x_max_(x_max), h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
  if (!(x_min < 0.0 && 0.0 < x_max)) throw InvalidArgument("grid must satisfy x_min < 0 < x_max");
  const double zi = -x_min / h;
  zero_index_ = std::lround(zi);
  if (std::abs(zi - static_cast<double>(zero_index_)) > 1e-9 * std::max(1.0, zi)) {
    throw InvalidArgument("grid has no node at x = 0");
  }
  n_ = std::lround((x_max - x_min) / h) + 1;
  if (n_ < 3) throw InvalidArgument("grid needs at least one interior node");
}

std::vector<double> solve_transverse_fd(const PhysicsParams& p, const Grid1D& g, int k) {
  if (p.alpha < 0.0 || p.v0 < 0.0) throw InvalidArgument("alpha and v0 must be non-negative");
  if (k < 1) throw InvalidArgument("k must be at least 1");
  const long m = g.n() - 2;  // interior nodes 1 .. n-2
  if (k > m) throw InvalidArgument("k exceeds the number of interior nodes");
  const double inv_h2 = 1.0 / (g.h() * g.h());
  std::vector<double> diag(static_cast<std::size_t>(m));
  std::vector<double> off(static_cast<std::size_t>(m > 0 ? m - 1 : 0), -inv_h2);
  for (long i = 1; i <= m; ++i) {
    const double x = g.x(i);
    double d = 2.0 * inv_h2;
    if (x > 0.0) d += p.v0;
    if (i == g.zero_index()) d -= p.alpha / g.h();
    diag[static_cast<std::size_t>(i - 1)] = d;
  }
  return sturm::lowest_eigenvalues(diag, off, k);
}

TransverseExtrapolation extrapolate_transverse_fd(const PhysicsParams& p, double half_width,
                                                  std::span<const double> h_ladder) {
  if (h_ladder.size() < 2) throw InvalidArgument("extrapolation needs at least two spacings");
  TransverseExtrapolation out;
  for (double h : h_ladder) {
    out.h.push_back(h);
    out.raw.push_back(solve_transverse_fd(p, Grid1D::symmetric(half_width, h), 1).front());
  }
  // Neville-style table for errors c1 h + c2 h^2 + ..., ladder halving h.
  std::vector<double> col = out.raw;
  for (std::size_t level = 1; level < col.size(); ++level) {
    const double f = std::ldexp(1.0, static_cast<int>(level));  // 2^level
    for (std::size_t i = col.size() - 1; i >= level; --i) {
      col[i] = (f * col[i] - col[i - 1]) / (f - 1.0);
    }
  }
  out.extrapolated = col.back();
  return out;
}

double transverse_truncation_width(const PhysicsParams& p) {
  const auto ts = transverse_bound_state(p);
  if (!ts.bound_energy) {
    throw InvalidRegime("truncation width is defined through the transverse bound state");
  }
  return std::ceil(40.0 / std::min(*ts.kappa_minus, *ts.kappa_plus));
}

double verify_halfline_inequality(std::span<const double> samples, double dx, double v0) {
  if (samples.empty()) throw InvalidArgument("empty sample set");
  if (!(v0 > 0.0)) throw InvalidArgument("v0 must be positive");
  const std::size_t n = samples.size();
  if (n == 1) return -std::sqrt(v0) * samples[0] * samples[0];
  if (!(dx > 0.0)) throw InvalidArgument("sample spacing must be positive");

  auto derivative = [&](std::size_t i) {
    if (n == 2) return (samples[1] - samples[0]) / dx;
    if (i == 0) return (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * dx);
    if (i == n - 1) {
      return (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * dx);
    }
    return (samples[i + 1] - samples[i - 1]) / (2.0 * dx);
  };

  double integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = derivative(i);
    const double f = d * d + v0 * samples[i] * samples[i];
    integral += (i == 0 || i == n - 1) ? 0.5 * f : f;
  }
  integral *= dx;
  return integral - std::sqrt(v0) * samples[0] * samples[0];
}

}  // namespace lwire
