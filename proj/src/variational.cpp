#include "lwire/variational.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "lwire/errors.hpp"
#include "lwire/quadrature.hpp"

namespace lwire {

void Theorem4Trial::validate() const {
  if (!(a > 0.0) || !(b > a) || !std::isfinite(b)) {
    throw InvalidArgument("logarithmic trial needs 0 < a < b < inf");
  }
}

void WedgeProductTrial::validate() const {
  if (!(L_len > 0.0) || !std::isfinite(L_len)) throw InvalidArgument("L_len must be positive");
  if (j < 1) throw InvalidArgument("mode index must be >= 1");
}

const char* trial_family(const TrialFunction& t) {
  switch (t.index()) {
    case 0: return "logarithmic";
    case 1: return "product";
    default: return "zero";
  }
}

namespace {

double log_profile(const Theorem4Trial& t, double rho) {
  if (rho < t.a) return 1.0;
  if (rho < t.b) return std::log(rho / t.b) / std::log(t.a / t.b);
  return 0.0;
}

double log_profile_slope(const Theorem4Trial& t, double rho) {
  if (rho < t.a || rho >= t.b) return 0.0;
  return 1.0 / (rho * std::log(t.a / t.b));
}

struct Fields {
  double kinetic = 0.0;
  double potential = 0.0;
  double line = 0.0;
  double norm = 0.0;
  std::map<std::string, double> parts;
};

Fields log_trial_fields(const Theorem4Trial& tr, const PhysicsParams& p, const Curve& cv,
                        BiasOrientation o, const QuadratureSpec& q, int level) {
  const double alpha = p.alpha;
  const double v_in = o == BiasOrientation::InteriorBias ? p.v0 : 0.0;
  const double v_ext = o == BiasOrientation::ExteriorBias ? p.v0 : 0.0;
  const double tb = cv.tan_beta();
  const double t0 = cv.tangent_distance();
  const double r = cv.radius();
  const double half_arc = cv.s_compact();
  const double tau_cap = q.tau_cut / alpha;

  auto tau_integral = [&](double upper, auto&& weight) {
    const double top = std::min(upper, tau_cap);
    const int panels = std::max(1, static_cast<int>(std::ceil(top * alpha * q.panels_per_unit))) * level;
    return quad::uniform(0.0, top, panels).apply(
        [&](double tau) { return weight(tau) * std::exp(-2.0 * alpha * tau); });
  };

  Fields f;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double interior_norm = 0.0;

  // Straight strips: foot at distance t along either ray, tau up to the bisector.
  auto strip = [&](const quad::Rule& rule, double& omega) {
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double t = rule.x[i];
      const double w = 2.0 * rule.w[i];  // both rays
      const double e = tau_integral(t * tb, [](double) { return 1.0; });
      const double pv = log_profile(tr, t);
      const double dp = log_profile_slope(tr, t);
      const double kin = w * e * (alpha * alpha * pv * pv + dp * dp);
      const double pot = w * e * v_in * pv * pv;
      const double line = alpha * w * pv * pv;
      f.kinetic += kin;
      f.potential += pot;
      f.line += line;
      interior_norm += w * e * pv * pv;
      omega += kin + pot - line;
    }
  };
  const int inner_panels =
      std::max(1, static_cast<int>(std::ceil((tr.a - t0) * alpha * q.panels_per_unit))) * level;
  strip(quad::uniform(t0, tr.a, inner_panels), omega1);
  const int log_panels =
      std::max(1, static_cast<int>(std::ceil(std::log(tr.b / tr.a) * q.panels_per_e))) * level;
  strip(quad::geometric(tr.a, tr.b, log_panels), omega2);

  // Arc sector: the trial is exp(-alpha tau), Jacobian 1 - tau / r.
  if (r > 0.0) {
    const double s_len = 2.0 * half_arc;
    const double m = tau_integral(r, [&](double tau) { return 1.0 - tau / r; });
    const double kin = s_len * alpha * alpha * m;
    const double pot = s_len * v_in * m;
    const double line = alpha * s_len;
    f.kinetic += kin;
    f.potential += pot;
    f.line += line;
    interior_norm += s_len * m;
    omega1 += kin + pot - line;
  }

  // Exterior: P depends on rho only; opening angle 2 pi - 2 beta.
  const double angle = 2.0 * std::numbers::pi - 2.0 * cv.beta();
  const int disc_panels = std::max(1, static_cast<int>(std::ceil(tr.a * alpha))) * level;
  const quad::Rule disc = quad::uniform(0.0, tr.a, disc_panels);
  const quad::Rule ring = quad::geometric(tr.a, tr.b, log_panels);
  double ext_kin = 0.0;
  double ext_norm = angle * disc.apply([](double rho) { return rho; });
  for (std::size_t i = 0; i < ring.x.size(); ++i) {
    const double rho = ring.x[i];
    const double pv = log_profile(tr, rho);
    const double dp = log_profile_slope(tr, rho);
    ext_kin += angle * ring.w[i] * dp * dp * rho;
    ext_norm += angle * ring.w[i] * pv * pv * rho;
  }
  // The corner between the tangent segments and the arc is exterior, with P = 1.
  if (r > 0.0) ext_norm += t0 * r - 0.5 * r * r * (std::numbers::pi - 2.0 * cv.beta());
  f.kinetic += ext_kin;
  f.potential += v_ext * ext_norm;
  f.norm = interior_norm + ext_norm;

  f.parts["exterior_kinetic"] = ext_kin;
  f.parts["exterior_potential"] = v_ext * ext_norm;
  f.parts["exterior_norm"] = ext_norm;
  f.parts["interior_norm"] = interior_norm;
  f.parts["omega1"] = omega1;
  f.parts["omega2"] = omega2;
  return f;
}

Fields product_trial_fields(const WedgeProductTrial& tr, const PhysicsParams& p, const Curve& cv,
                            BiasOrientation o, const QuadratureSpec& q, int level) {
  const double alpha = p.alpha;
  const double L = tr.L_len;
  const double tb = cv.tan_beta();
  const double d = L * tb;
  const double g_norm = 4.0 * d + 1.0 / alpha;
  const double g_slope = alpha;
  const double k = tr.j * std::numbers::pi / L;
  const int panels =
      std::max({8, 4 * tr.j, static_cast<int>(std::ceil(L * alpha * q.panels_per_unit))}) * level;
  const quad::Rule rule = quad::uniform(L, 2.0 * L, panels);
  double ff = 0.0;
  double fp = 0.0;
  double inside = 0.0;  // int f^2 * (width of the interior at x)
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double x = rule.x[i];
    const double s = std::sin(k * (x - L));
    const double c = std::cos(k * (x - L));
    ff += rule.w[i] * s * s;
    fp += rule.w[i] * k * k * c * c;
    inside += rule.w[i] * s * s * 2.0 * x * tb;
  }
  Fields f;
  f.kinetic = fp * g_norm + ff * g_slope;
  f.potential = p.v0 * (o == BiasOrientation::InteriorBias ? inside : ff * g_norm - inside);
  f.line = 2.0 * alpha / cv.cos_beta() * ff;
  f.norm = ff * g_norm;
  return f;
}

FormBreakdown to_breakdown(const Fields& fine, const Fields& coarse) {
  FormBreakdown out;
  out.kinetic = fine.kinetic;
  out.potential = fine.potential;
  out.line_term = fine.line;
  out.norm_sq = fine.norm;
  out.total = fine.kinetic + fine.potential - fine.line;
  out.parts = fine.parts;
  auto rel = [](double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale > 0.0 ? std::abs(x - y) / scale : 0.0;
  };
  out.refinement_change = std::max({rel(fine.kinetic, coarse.kinetic), rel(fine.potential, coarse.potential),
                                    rel(fine.line, coarse.line), rel(fine.norm, coarse.norm)});
  out.error_estimate =
      std::abs(out.total - (coarse.kinetic + coarse.potential - coarse.line));
  return out;
}

}  // namespace

double trial_value(const TrialFunction& t, const PhysicsParams& p, const Curve& curve, Point x) {
  if (const auto* lt = std::get_if<Theorem4Trial>(&t)) {
    if (curve.classify(x) != RegionLabel::Interior) return log_profile(*lt, std::hypot(x.x, x.y));
    const NearestPoint np = curve.nearest(x);
    const Point foot = curve.point_at(np.s);
    return std::exp(-p.alpha * np.distance) * log_profile(*lt, std::hypot(foot.x, foot.y));
  }
  if (const auto* pt = std::get_if<WedgeProductTrial>(&t)) {
    const double L = pt->L_len;
    if (!(x.x > L && x.x < 2.0 * L)) return 0.0;
    const double two_d = 2.0 * L * curve.tan_beta();
    const double g = std::abs(x.y) <= two_d ? 1.0 : std::exp(-p.alpha * (std::abs(x.y) - two_d));
    return std::sin(pt->j * std::numbers::pi * (x.x - L) / L) * g;
  }
  return 0.0;
}

FormBreakdown evaluate_form(const TrialFunction& trial, const PhysicsParams& p, const CurveSpec& c,
                            BiasOrientation o, const QuadratureSpec& quad) {
  p.validate();
  const Curve cv(c);
  if (std::holds_alternative<ZeroTrial>(trial)) return {};
  Fields coarse;
  Fields fine;
  if (const auto* lt = std::get_if<Theorem4Trial>(&trial)) {
    lt->validate();
    if (lt->a < cv.tangent_distance()) {
      throw InvalidArgument("the inner radius a must lie beyond the fillet");
    }
    coarse = log_trial_fields(*lt, p, cv, o, quad, 1);
    fine = log_trial_fields(*lt, p, cv, o, quad, 2);
  } else {
    const auto& pt = std::get<WedgeProductTrial>(trial);
    pt.validate();
    if (pt.L_len < cv.tangent_distance() * cv.cos_beta()) {
      throw InvalidArgument("the product trial must sit beyond the fillet");
    }
    coarse = product_trial_fields(pt, p, cv, o, quad, 1);
    fine = product_trial_fields(pt, p, cv, o, quad, 2);
  }
  FormBreakdown out = to_breakdown(fine, coarse);
  if (out.refinement_change > quad.rel_tol) {
    throw ResolutionError("quadrature levels disagree by " + std::to_string(out.refinement_change));
  }
  return out;
}

namespace {

std::optional<Certificate> search(const PhysicsParams& p, const CurveSpec& c, BiasOrientation o,
                                  const CertificateGrid& grid, const QuadratureSpec& quad,
                                  double a_offset, const char* family) {
  std::vector<Theorem4Trial> trials;
  for (double as : grid.a_scaled) {
    for (double lr : grid.log_ratio) {
      const double a = a_offset + as / p.alpha;
      trials.push_back({a, a * std::exp(lr)});
    }
  }
  const long n = static_cast<long>(trials.size());
  std::vector<FormBreakdown> forms(trials.size());
  std::vector<std::exception_ptr> errors(trials.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      forms[static_cast<std::size_t>(i)] = evaluate_form(trials[static_cast<std::size_t>(i)], p, c, o, quad);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    if (forms[i].total + forms[i].error_estimate <= -kCertificateSlack) {
      return Certificate{family, trials[i], forms[i], 0.0};
    }
  }
  return std::nullopt;
}

void require_zero_threshold(const PhysicsParams& p) {
  p.validate();
  if (classify_regime(p) == Regime::Subcritical) {
    throw InvalidRegime("logarithmic certificates need v0 >= alpha^2 (threshold 0)");
  }
}

}  // namespace

std::optional<Certificate> theorem4_certificate(const PhysicsParams& p, const CurveSpec& c,
                                                BiasOrientation o, const CertificateGrid& grid,
                                                const QuadratureSpec& quad) {
  require_zero_threshold(p);
  c.validate();
  if (c.kind != CurveKind::Wedge) throw InvalidArgument("theorem4_certificate needs a wedge");
  return search(p, c, o, grid, quad, 0.0, "logarithmic");
}

std::optional<Certificate> theorem6_certificate(const PhysicsParams& p, const CurveSpec& c,
                                                BiasOrientation o, const CertificateGrid& grid,
                                                const QuadratureSpec& quad) {
  require_zero_threshold(p);
  c.validate();
  if (c.kind != CurveKind::FilletedWedge) {
    throw InvalidArgument("theorem6_certificate needs a filleted wedge");
  }
  return search(p, c, o, grid, quad, Curve(c).tangent_distance(), "logarithmic");
}

Prop2Condition prop2_condition(double alpha, double v0, double beta, double L_len, int j) {
  PhysicsParams{alpha, v0}.validate();
  if (classify_regime({alpha, v0}) != Regime::Subcritical) {
    throw InvalidRegime("the multiplicity condition needs v0 < alpha^2");
  }
  CurveSpec::wedge(beta).validate();
  WedgeProductTrial{L_len, j}.validate();
  const double d = std::tan(beta);
  const double a2 = alpha * alpha;
  const double mode = j * std::numbers::pi / L_len;
  const double lhs = 4.0 * a2 * a2 / (1.0 + 4.0 * d * alpha) * (1.25 - 2.0 / std::cos(beta)) +
                     4.0 * a2 * mode * mode + v0 * v0;
  return {lhs, lhs < 0.0};
}

std::vector<double> product_trial_ritz(const PhysicsParams& p, double beta, double L_len, int n,
                                       BiasOrientation o) {
  p.validate();
  CurveSpec::wedge(beta).validate();
  WedgeProductTrial{L_len, n}.validate();
  const double alpha = p.alpha;
  const double tb = std::tan(beta);
  const double g_norm = 4.0 * L_len * tb + 1.0 / alpha;
  const double g_slope = alpha;
  const double line = 2.0 * alpha / std::cos(beta);
  const quad::Rule rule = quad::uniform(L_len, 2.0 * L_len, std::max(16, 8 * n));
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < rule.x.size(); ++q) {
    const double x = rule.x[q];
    const double w = rule.w[q];
    const double width = 2.0 * x * tb;
    const double vw = p.v0 * (o == BiasOrientation::InteriorBias ? width : g_norm - width);
    Eigen::VectorXd f(n);
    Eigen::VectorXd df(n);
    for (int i = 0; i < n; ++i) {
      const double kk = (i + 1) * std::numbers::pi / L_len;
      f[i] = std::sin(kk * (x - L_len));
      df[i] = kk * std::cos(kk * (x - L_len));
    }
    k += w * (g_norm * df * df.transpose() + (g_slope - line) * f * f.transpose() + vw * f * f.transpose());
    m += w * g_norm * f * f.transpose();
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(k, m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = ges.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Prop1Result prop1_certificate(const PhysicsParams& p, const CurveSpec& c, const GridRung& rung,
                              const DeltaMode& delta, std::uint64_t seed) {
  p.validate();
  if (classify_regime(p) != Regime::Subcritical) {
    throw InvalidRegime("persistence under a weak bias needs v0 < alpha^2");
  }
  const PhysicsParams bare{p.alpha, 0.0};
  const Grid2D grid(rung.R, rung.h);
  const DiscreteOperator op0 =
      assemble_hamiltonian(bare, c, BiasOrientation::ExteriorBias, grid, delta);
  const double mu0 = essential_threshold(bare);
  const ShiftInvert factor(op0.matrix, mu0);
  if (factor.negative_count() == 0) {
    throw GeometryError("the bias-free operator has no eigenvalue below -alpha^2/4");
  }
  EigenOptions eo;
  eo.seed = seed;
  eo.want_vectors = true;
  eo.verify_count = false;
  const EigenResult res = lowest_eigenvalues(op0, 1, 1e-8, factor, eo);

  const DiscreteOperator op = assemble_hamiltonian(p, c, BiasOrientation::ExteriorBias, grid, delta);
  Prop1Result out;
  out.lambda0 = res.values.front();
  out.quotient = discrete_form(op, res.vectors.col(0)).quotient();
  out.mu = essential_threshold(p);
  out.certified = out.quotient < out.mu;
  out.vc_lower_bound = 2.0 * p.alpha * std::sqrt(-out.lambda0) - p.alpha * p.alpha;
  return out;
}

}  // namespace lwire
