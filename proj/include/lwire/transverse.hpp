#pragma once

// One-dimensional transverse operator  h = -d^2/dx^2 - alpha delta(x) + v0 1_{x>0}.
//
// Closed-form spectral data plus a finite-difference cross-check on a
// uniform grid with Dirichlet ends.

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace lwire {

/// Coupling alpha of the delta interaction and height v0 of the bias step.
struct PhysicsParams {
  double alpha = 1.0;
  double v0 = 0.0;

  /// Throws InvalidArgument unless alpha > 0 and v0 >= 0 (both finite).
  void validate() const;

  friend bool operator==(const PhysicsParams&, const PhysicsParams&) = default;
};

enum class Regime { Subcritical, Critical, Supercritical };

const char* to_string(Regime r);

/// Relative width of the band |v0 - alpha^2| <= kCriticalRelTol * alpha^2
/// that counts as critical in floating point.
inline constexpr double kCriticalRelTol = 1e-12;

Regime classify_regime(const PhysicsParams& p);

/// Bottom of the essential spectrum: -((alpha^2 - v0) / (2 alpha))^2 in the
/// subcritical regime, 0 otherwise.
double essential_threshold(const PhysicsParams& p);

struct TransverseSpectrum {
  double threshold = 0.0;  // edge of sigma_ess(h), always 0
  std::optional<double> bound_energy;
  std::optional<double> kappa_minus;  // decay rate on x < 0
  std::optional<double> kappa_plus;   // decay rate on x > 0
};

TransverseSpectrum transverse_bound_state(const PhysicsParams& p);

/// Bounded zero-energy solution of the critical operator: 1 on x < 0 and
/// exp(-sqrt(v0) x) on x > 0.  Throws InvalidRegime off the critical line.
double generalized_zero_mode(const PhysicsParams& p, double x);

/// Uniform 1D grid on [x_min, x_max] with a node exactly at x = 0.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, double h);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double h() const noexcept { return h_; }
  /// Total node count including both Dirichlet end nodes.
  long n() const noexcept { return n_; }
  /// Index of the node sitting at x = 0.
  long zero_index() const noexcept { return zero_index_; }
  /// Coordinate of node i, computed as (i - zero_index) * h so that the
  /// zero node is exact.
  double x(long i) const noexcept { return static_cast<double>(i - zero_index_) * h_; }

  /// Symmetric box [-half_width, half_width].
  static Grid1D symmetric(double half_width, double h) { return {-half_width, half_width, h}; }

 private:
  double x_min_;
  double x_max_;
  double h_;
  long n_;
  long zero_index_;
};

/// The k lowest eigenvalues (ascending) of the 3-point discretization of h
/// on the interior nodes of g.  The delta is lumped as -alpha/h on the
/// diagonal of the zero node; nodes with x > 0 carry +v0.
std::vector<double> solve_transverse_fd(const PhysicsParams& p, const Grid1D& g, int k = 1);

/// Richardson-extrapolated lowest FD eigenvalue over a ladder of spacings,
/// each half the previous one.  The FD error expands in integer powers of h,
/// starting at h^1.
struct TransverseExtrapolation {
  std::vector<double> h;
  std::vector<double> raw;
  double extrapolated = 0.0;
};

TransverseExtrapolation extrapolate_transverse_fd(const PhysicsParams& p, double half_width,
                                                  std::span<const double> h_ladder);

/// Half-width that keeps the Dirichlet truncation error of the transverse
/// bound state negligible: 40 / min(kappa_minus, kappa_plus), rounded up to
/// an integer so that the usual spacings put a node at x = 0.
double transverse_truncation_width(const PhysicsParams& p);

/// Slack of  int_0^X (|phi'|^2 + v0 |phi|^2) dx - sqrt(v0) |phi(0)|^2  for a
/// function tabulated at equally spaced points on [0, X].  Trapezoid rule,
/// derivative by central differences (one-sided at the ends).
double verify_halfline_inequality(std::span<const double> samples, double dx, double v0);

}  // namespace lwire
