#pragma once

// Explicit trial functions and the quadratic form
//   q[psi] = |grad psi|^2 + int V |psi|^2 - alpha int_L |psi(L(s))|^2 ds.
// A trial with q[psi] < threshold * |psi|^2 proves a bound state below the
// threshold independently of any grid.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lwire/assembly.hpp"
#include "lwire/eigensolve.hpp"
#include "lwire/geometry.hpp"
#include "lwire/transverse.hpp"

namespace lwire {

/// Logarithmic cutoff trial: on the exterior side P(rho) = 1 for rho < a,
/// ln(rho/b)/ln(a/b) on [a, b], 0 beyond; on the interior side
/// exp(-alpha dist(x, L)) P(|foot point|).
struct Theorem4Trial {
  double a = 1.0;
  double b = 22026.465794806718;  // e^10

  void validate() const;
  friend bool operator==(const Theorem4Trial&, const Theorem4Trial&) = default;
};

/// Product trial f(x) g(y) for the wedge.  f is the j-th Dirichlet mode on
/// (L, 2L); g = 1 for |y| <= 2d and exp(-alpha(|y| - 2d)) beyond, with
/// d = L tan(beta), so g = 1 on both wires over the support of f.
struct WedgeProductTrial {
  double L_len = 10.0;
  int j = 1;

  void validate() const;
  friend bool operator==(const WedgeProductTrial&, const WedgeProductTrial&) = default;
};

struct ZeroTrial {
  friend bool operator==(const ZeroTrial&, const ZeroTrial&) = default;
};

using TrialFunction = std::variant<Theorem4Trial, WedgeProductTrial, ZeroTrial>;

const char* trial_family(const TrialFunction& t);

/// Pointwise value of a trial (used to sample it on a grid).
double trial_value(const TrialFunction& t, const PhysicsParams& p, const Curve& curve, Point x);

struct QuadratureSpec {
  int panels_per_unit = 4;  // panels per 1/alpha along t and tau
  int panels_per_e = 6;     // geometric panels per e-fold in rho
  double tau_cut = 40.0;    // tau integrals stop at tau_cut / alpha
  double rel_tol = 0.01;    // two-level agreement required per field
};

struct FormBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double line_term = 0.0;
  double norm_sq = 0.0;
  double total = 0.0;  // kinetic + potential - line_term
  /// Named sub-integrals (exterior kinetic, Omega_1, Omega_2, ...).
  std::map<std::string, double> parts;
  /// Largest relative change of any field between the two quadrature levels.
  double refinement_change = 0.0;
  /// |total(fine) - total(coarse)|.
  double error_estimate = 0.0;

  double quotient() const { return total / norm_sq; }

  friend bool operator==(const FormBreakdown&, const FormBreakdown&) = default;
};

/// Throws ResolutionError when the two levels disagree by more than
/// quad.rel_tol in any field.
FormBreakdown evaluate_form(const TrialFunction& trial, const PhysicsParams& p, const CurveSpec& c,
                            BiasOrientation o, const QuadratureSpec& quad = {});

struct Certificate {
  std::string family;
  TrialFunction trial;
  FormBreakdown form;
  double threshold = 0.0;  // the energy the form was compared against

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct CertificateGrid {
  std::vector<double> a_scaled{1.0, 2.0, 4.0};        // a in units of 1/alpha
  std::vector<double> log_ratio{5.0, 10.0, 20.0};     // ln(b/a)
};

/// Certificate threshold: total + error_estimate must not exceed -1e-3.
inline constexpr double kCertificateSlack = 1e-3;

/// Searches the grid (a outer, b/a inner) for a logarithmic trial with a
/// negative form.  Requires mu = 0 (critical or supercritical bias); the
/// curve must be a Wedge.
std::optional<Certificate> theorem4_certificate(const PhysicsParams& p, const CurveSpec& c,
                                                BiasOrientation o = BiasOrientation::InteriorBias,
                                                const CertificateGrid& grid = {},
                                                const QuadratureSpec& quad = {});

/// The same search for a FilletedWedge, with a measured from the tangent
/// points: a = t0 + a_scaled / alpha.
std::optional<Certificate> theorem6_certificate(const PhysicsParams& p, const CurveSpec& c,
                                                BiasOrientation o = BiasOrientation::InteriorBias,
                                                const CertificateGrid& grid = {},
                                                const QuadratureSpec& quad = {});

/// The small-angle multiplicity condition as printed:
///   4 alpha^4 / (1 + 4 d alpha) (5/4 - 2 / cos beta) + 4 alpha^2 (j pi / L)^2 + v0^2 < 0
/// with d = tan(beta).
struct Prop2Condition {
  double lhs = 0.0;
  bool holds = false;
};
Prop2Condition prop2_condition(double alpha, double v0, double beta, double L_len, int j);

/// Rayleigh-Ritz values of the form on span{f_1 g, ..., f_n g} for the
/// wedge; the number of values below mu bounds the eigenvalue count below mu.
std::vector<double> product_trial_ritz(const PhysicsParams& p, double beta, double L_len, int n,
                                       BiasOrientation o = BiasOrientation::InteriorBias);

struct Prop1Result {
  double lambda0 = 0.0;     // bias-free ground state on the grid
  double quotient = 0.0;    // biased discrete Rayleigh quotient of that state
  double mu = 0.0;
  bool certified = false;   // quotient < mu
  double vc_lower_bound = 0.0;  // 2 alpha sqrt(-lambda0) - alpha^2
};

/// Bias-free ground state on the grid, then its Rayleigh quotient for the
/// biased operator.  Requires a subcritical v0 and a Wedge with exterior
/// bias.  Throws GeometryError when the bias-free operator has no state
/// below -alpha^2/4.
Prop1Result prop1_certificate(const PhysicsParams& p, const CurveSpec& c, const GridRung& rung,
                              const DeltaMode& delta = {}, std::uint64_t seed = 20240601);

}  // namespace lwire
