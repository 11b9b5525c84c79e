#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lwire/assembly.hpp"
#include "lwire/errors.hpp"
#include "lwire/quadrature.hpp"
#include "lwire/variational.hpp"

using namespace lwire;

namespace {

const double kPi4 = M_PI / 4.0;
const PhysicsParams kCritical{1.0, 1.0};

// Discrete Rayleigh data of a trial sampled on the nodes of an assembled grid.
DiscreteForm sampled_form(const TrialFunction& t, const PhysicsParams& p, const CurveSpec& c, BiasOrientation o,
                          double R, double h, Point off) {
  const Grid2D g(R, h, off);
  const DiscreteOperator op = assemble_hamiltonian(p, c, o, g, DeltaMode::lumping());
  const Curve curve(c);
  Eigen::VectorXd psi(op.dim());
  for (long k = 0; k < op.dim(); ++k) psi[k] = trial_value(t, p, curve, g.node(k));
  return discrete_form(op, psi);
}

}  // namespace

TEST_CASE("composite Gauss rules integrate polynomials and logs") {
  CHECK(quad::uniform(0.0, 2.0, 3).apply([](double x) { return std::pow(x, 15); }) ==
        doctest::Approx(std::pow(2.0, 16) / 16.0).epsilon(1e-13));
  CHECK(quad::geometric(1.0, std::exp(5.0), 10).apply([](double x) { return 1.0 / x; }) ==
        doctest::Approx(5.0).epsilon(1e-13));
  CHECK(quad::join(quad::uniform(0, 1, 1), quad::uniform(1, 2, 1)).x.size() == 16);
}

TEST_CASE("logarithmic trial pieces") {
  const Theorem4Trial t{1.0, std::exp(10.0)};
  const FormBreakdown f = evaluate_form(t, kCritical, CurveSpec::wedge(kPi4), BiasOrientation::InteriorBias);
  CHECK(f.parts.at("exterior_kinetic") == doctest::Approx(0.15 * M_PI).epsilon(1e-6));
  CHECK(f.parts.at("omega1") == doctest::Approx(-(1.0 - std::exp(-2.0))).epsilon(1e-6));
  CHECK(f.total < 0.0);
  CHECK(f.total == doctest::Approx(f.kinetic + f.potential - f.line_term));
}

TEST_CASE("zero trial has a zero form") {
  const FormBreakdown f = evaluate_form(ZeroTrial{}, kCritical, CurveSpec::wedge(kPi4), BiasOrientation::InteriorBias);
  CHECK(f.kinetic == 0.0);
  CHECK(f.potential == 0.0);
  CHECK(f.line_term == 0.0);
  CHECK(f.norm_sq == 0.0);
  CHECK(f.total == 0.0);
}

TEST_CASE("theorem4 certificate") {
  const auto a = theorem4_certificate(kCritical, CurveSpec::wedge(kPi4));
  REQUIRE(a);
  CHECK(a->form.total < 0.0);
  const auto& t = std::get<Theorem4Trial>(a->trial);
  CHECK(t.b / t.a >= std::exp(10.0) * (1 - 1e-12));
  CHECK(theorem4_certificate(kCritical, CurveSpec::wedge(M_PI / 3)));
  CHECK_FALSE(theorem4_certificate({1.0, 4.0}, CurveSpec::wedge(M_PI / 3)));
  CHECK_THROWS_AS(theorem4_certificate({1.0, 0.5}, CurveSpec::wedge(kPi4)), InvalidRegime);
}

TEST_CASE("theorem6 certificate") {
  const auto f = theorem6_certificate(kCritical, CurveSpec::filleted(kPi4, 1.0));
  REQUIRE(f);
  CHECK(f->form.total < 0.0);
  CHECK_FALSE(theorem6_certificate(kCritical, CurveSpec::filleted(kPi4, 1.0), BiasOrientation::ExteriorBias));
  // Small fillets reproduce the wedge.
  const auto w = theorem4_certificate(kCritical, CurveSpec::wedge(kPi4));
  const auto s = theorem6_certificate(kCritical, CurveSpec::filleted(kPi4, 1e-4));
  REQUIRE(w);
  REQUIRE(s);
  CHECK(s->form.total == doctest::Approx(w->form.total).epsilon(0.02));
}

TEST_CASE("multiplicity condition as printed") {
  const double d = std::tan(0.01);
  const double expect = 4.0 / (1.0 + 4.0 * d) * (1.25 - 2.0 / std::cos(0.01)) + 4.0 * std::pow(M_PI / 100.0, 2);
  const Prop2Condition c = prop2_condition(1.0, 0.0, 0.01, 100.0, 1);
  CHECK(c.lhs == doctest::Approx(expect).epsilon(1e-14));
  CHECK(c.lhs == doctest::Approx(-2.88).epsilon(2e-3));
  CHECK(c.holds);
  CHECK(prop2_condition(1.0, 0.999, 1e-4, 1e4, 1).holds);
  CHECK_THROWS_AS(prop2_condition(1.0, 1.0, 0.01, 100.0, 1), InvalidRegime);
}

TEST_CASE("product trial Ritz value matches the form of the single mode") {
  const PhysicsParams p{1.0, 0.5};
  for (double beta : {0.6, 0.075}) {
    const auto ritz = product_trial_ritz(p, beta, 10.0, 1);
    const FormBreakdown f = evaluate_form(WedgeProductTrial{10.0, 1}, p, CurveSpec::wedge(beta), BiasOrientation::InteriorBias);
    CHECK(ritz.front() == doctest::Approx(f.quotient()).epsilon(1e-8));
  }
}

TEST_CASE("decaying transverse profile of the product trial") {
  const PhysicsParams p{1.3, 0.5};
  const CurveSpec c = CurveSpec::wedge(0.2);
  const Curve curve(c);
  const WedgeProductTrial t{4.0, 1};
  const double x = 6.0;  // sin(pi/2) = 1
  const auto rule = quad::uniform(-60.0, 60.0, 2000);
  const double norm = rule.apply([&](double y) { return std::pow(trial_value(t, p, curve, {x, y}), 2); });
  CHECK(norm == doctest::Approx(4.0 * 4.0 * std::tan(0.2) + 1.0 / p.alpha).epsilon(1e-6));
}

TEST_CASE("proposition 1 certificate") {
  const PhysicsParams p{1.0, 0.02};
  const Prop1Result r = prop1_certificate(p, CurveSpec::wedge(kPi4), {0.1, 12.0});
  CHECK(r.certified);
  CHECK(r.quotient < r.mu);
  CHECK(r.mu == doctest::Approx(-0.2401));
  CHECK(r.vc_lower_bound == doctest::Approx(2.0 * std::sqrt(-r.lambda0) - 1.0));
  const Prop1Result z = prop1_certificate({1.0, 0.0}, CurveSpec::wedge(kPi4), {0.1, 12.0});
  CHECK(z.quotient == doctest::Approx(z.lambda0).epsilon(1e-9));
  CHECK(z.lambda0 < -0.25);
  CHECK_THROWS_AS(prop1_certificate({1.0, 1.0}, CurveSpec::wedge(kPi4), {0.1, 12.0}), InvalidRegime);
}

// Properties.

TEST_SUITE_BEGIN("invariants");

TEST_CASE("continuum form agrees with the assembled matrix on sampled trials") {
  struct Case {
    TrialFunction t;
    PhysicsParams p;
    CurveSpec c;
    BiasOrientation o;
    double R;
    Point off;
  };
  const Case cases[] = {
      {Theorem4Trial{1.0, std::exp(2.0)}, kCritical, CurveSpec::wedge(kPi4), BiasOrientation::InteriorBias, 8.0, {}},
      {Theorem4Trial{1.0, std::exp(2.0)}, kCritical, CurveSpec::wedge(kPi4), BiasOrientation::ExteriorBias, 8.0, {}},
      {Theorem4Trial{2.0, 2.0 * std::exp(1.5)}, kCritical, CurveSpec::filleted(kPi4, 1.0), BiasOrientation::InteriorBias, 10.0, {}},
      {WedgeProductTrial{2.0, 1}, PhysicsParams{1.0, 0.5}, CurveSpec::wedge(0.6), BiasOrientation::InteriorBias, 8.0, {3.0, 0.0}},
  };
  for (const Case& k : cases) {
    const FormBreakdown f = evaluate_form(k.t, k.p, k.c, k.o);
    // Lumping converges at first order; h = 0.0125 is inside the tolerance.
    const DiscreteForm d = sampled_form(k.t, k.p, k.c, k.o, k.R, 0.0125, k.off);
    INFO("family " << std::string(trial_family(k.t)) << " continuum " << f.total << " discrete " << d.energy);
    CHECK(std::abs(d.energy - f.total) <= std::max(0.02 * std::abs(f.total), 2e-3));
    CHECK(d.norm_sq == doctest::Approx(f.norm_sq).epsilon(0.02));
  }
}

TEST_CASE("logarithmic trial structure") {
  // Omega_2 is bounded by the tangential gradient of P, (1/2 alpha)
  // ln(b/a)^-2 (1/a - 1/b) on each of the two branches.
  for (double alpha : {1.0, 2.0}) {
    for (double beta : {kPi4, M_PI / 3, 0.3}) {
      for (double lr : {5.0, 10.0}) {
        const double a = 2.0, b = a * std::exp(lr);
        const FormBreakdown f =
            evaluate_form(Theorem4Trial{a, b}, {alpha, alpha * alpha}, CurveSpec::wedge(beta), BiasOrientation::InteriorBias);
        CHECK(f.parts.at("exterior_kinetic") == doctest::Approx((2 * M_PI - 2 * beta) / lr).epsilon(1e-6));
        CHECK(f.parts.at("omega2") <= 2.0 * 0.5 / alpha / (lr * lr) * (1.0 / a - 1.0 / b));
      }
    }
  }
}

TEST_CASE("Rayleigh quotient scales under dilation") {
  // x -> 2x, alpha -> alpha / 2, v0 -> v0 / 4: the quotient scales by 1/4.
  const double l = 2.0;
  for (const BiasOrientation o : {BiasOrientation::InteriorBias, BiasOrientation::ExteriorBias}) {
    const FormBreakdown a = evaluate_form(Theorem4Trial{1.0, std::exp(6.0)}, {1.0, 1.0}, CurveSpec::filleted(0.7, 0.5), o);
    const FormBreakdown b =
        evaluate_form(Theorem4Trial{l, l * std::exp(6.0)}, {1.0 / l, 1.0 / (l * l)}, CurveSpec::filleted(0.7, 0.5 * l), o);
    CHECK(b.quotient() == doctest::Approx(a.quotient() / (l * l)).epsilon(1e-6));
  }
  const FormBreakdown c = evaluate_form(WedgeProductTrial{5.0, 2}, {1.0, 0.3}, CurveSpec::wedge(0.4), BiasOrientation::InteriorBias);
  const FormBreakdown d = evaluate_form(WedgeProductTrial{10.0, 2}, {0.5, 0.075}, CurveSpec::wedge(0.4), BiasOrientation::InteriorBias);
  CHECK(d.quotient() == doctest::Approx(c.quotient() / 4.0).epsilon(1e-6));
}

TEST_CASE("multiplicity condition is monotone") {
  for (double beta : {0.01, 0.05, 0.2}) {
    for (double L : {20.0, 50.0, 100.0}) {
      for (double v0 : {0.0, 0.3, 0.6}) {
        const double base = prop2_condition(1.0, v0, beta, L, 1).lhs;
        CHECK(prop2_condition(1.0, v0, beta, L, 2).lhs > base);
        CHECK(prop2_condition(1.0, v0 + 0.2, beta, L, 1).lhs > base);
        CHECK(prop2_condition(1.0, v0, beta, 2 * L, 1).lhs < base);
      }
    }
  }
}

TEST_SUITE_END();
