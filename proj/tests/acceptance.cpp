// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run all twelve
//   acceptance --criterion N   run one
//
// Exit status is 0 when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lwire/assembly.hpp"
#include "lwire/eigensolve.hpp"
#include "lwire/transverse.hpp"
#include "lwire/variational.hpp"

using namespace lwire;

namespace {

const double kPi = 3.141592653589793;
const double kPi4 = kPi / 4.0;
const double kPi3 = kPi / 3.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<GridRung> default_ladder(double alpha = 1.0) {
  return {{0.1 / alpha, 12.0 / alpha}, {0.05 / alpha, 12.0 / alpha}, {0.05 / alpha, 24.0 / alpha}};
}

// Interior critical states bind by a few 1e-3; they need R >= 48.
std::vector<GridRung> critical_ladder(double alpha = 1.0) {
  return {{0.1 / alpha, 48.0 / alpha}, {0.1 / alpha, 64.0 / alpha}};
}

ScanResult scan(const PhysicsParams& p, const CurveSpec& c, BiasOrientation o, const std::vector<GridRung>& ladder) {
  return discrete_spectrum_scan(p, c, o, ladder, ScanOptions{});
}

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::string rungs_text(const ScanResult& r) {
  std::string s;
  for (const SpectralResult& x : r.rungs) {
    s += " (" + fmt(x.grid.h, 3) + "," + fmt(x.grid.R, 3) + ")=" + fmt(x.lambda1, 5);
  }
  return s;
}

// 1. Transverse closed form over random subcritical pairs.
Outcome criterion1() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ua(0.5, 2.0), uf(0.0, 0.8);
  const double ladder[] = {0.02, 0.01, 0.005};
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = ua(rng);
    const PhysicsParams p{a, uf(rng) * a * a};
    const double mu = essential_threshold(p);
    const auto ex = extrapolate_transverse_fd(p, transverse_truncation_width(p), ladder);
    worst = std::max(worst, std::abs(ex.extrapolated - mu) / std::abs(mu));
  }
  return {worst <= 1e-4, "20 pairs, worst relative error " + fmt(worst, 3) + " (tol 1e-4)"};
}

// 2. Straight-line control approaches the transverse threshold.
Outcome criterion2() {
  const CurveSpec line = CurveSpec::wedge(kPi / 2.0 - 1e-9);
  bool ok = true;
  std::string d;
  for (const PhysicsParams p : {PhysicsParams{1.0, 0.0}, PhysicsParams{1.0, 0.5}}) {
    const ScanResult r = scan(p, line, BiasOrientation::InteriorBias, default_ladder());
    const double mu = essential_threshold(p);
    const double l_coarse = r.rungs[0].lambda1, l_h = r.rungs[1].lambda1, l_fine = r.rungs[2].lambda1;
    const double tol = 0.02 * std::abs(mu) + 1e-3;
    const double gap = std::abs(l_fine - mu);
    // First order in h at R = 12, 1/R^2 in R at h = 0.05.
    const double extrapolated = l_fine + (l_h - l_coarse) + (l_fine - l_h) / 3.0;
    ok = ok && gap <= tol;
    d += " v0=" + fmt(p.v0, 2) + ": lambda1=" + fmt(l_fine) + " mu=" + fmt(mu) + " |gap|=" + fmt(gap, 3) +
         " tol=" + fmt(tol, 3) + " extrapolated=" + fmt(extrapolated) + ";";
  }
  return {ok, d};
}

// 3. Exterior critical bias: no bound state.
Outcome criterion3() {
  bool ok = true;
  std::string d;
  for (double beta : {kPi3, kPi4}) {
    const ScanResult r = scan({1.0, 1.0}, CurveSpec::wedge(beta), BiasOrientation::ExteriorBias, default_ladder());
    ok = ok && r.verdict.kind == VerdictKind::Absent;
    d += " beta=" + fmt(beta, 4) + " " + to_string(r.verdict.kind) + rungs_text(r) + ";";
  }
  return {ok, d};
}

// 4. Interior critical bias: bound state by both the solver and the trial.
Outcome criterion4() {
  bool ok = true;
  std::string d;
  for (double beta : {kPi4, kPi3}) {
    const CurveSpec c = CurveSpec::wedge(beta);
    const ScanResult r = scan({1.0, 1.0}, c, BiasOrientation::InteriorBias, critical_ladder());
    const auto cert = theorem4_certificate({1.0, 1.0}, c);
    const bool here = r.verdict.kind == VerdictKind::Exists && cert && cert->form.total < 0.0;
    ok = ok && here;
    d += " beta=" + fmt(beta, 4) + " " + to_string(r.verdict.kind) + rungs_text(r) +
         " certificate=" + (cert ? fmt(cert->form.total, 5) : std::string("none")) + ";";
  }
  return {ok, d};
}

// 5. One-sided angle bound for supercritical bias.
Outcome criterion5() {
  const PhysicsParams p{1.0, 4.0};
  const ScanResult wide = scan(p, CurveSpec::wedge(kPi3), BiasOrientation::InteriorBias, default_ladder());
  const ScanResult narrow = scan(p, CurveSpec::wedge(0.15), BiasOrientation::InteriorBias, default_ladder());
  return {wide.verdict.kind == VerdictKind::Absent,
          " beta=pi/3 " + std::string(to_string(wide.verdict.kind)) + rungs_text(wide) + "; beta=0.15 (reported only) " +
              to_string(narrow.verdict.kind) + rungs_text(narrow)};
}

// 6. Multiplicity grows as the wedge closes.
Outcome criterion6() {
  const PhysicsParams p{1.0, 0.5};
  const double betas[] = {0.6, 0.3, 0.15, 0.075};
  std::vector<long> counts;
  std::string d = " counts";
  for (double b : betas) {
    const ScanResult r = scan(p, CurveSpec::wedge(b), BiasOrientation::InteriorBias, default_ladder());
    counts.push_back(r.rungs.back().count_below_mu_margin);
    d += " " + fmt(b, 3) + ":" + std::to_string(counts.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < counts.size(); ++i) monotone = monotone && counts[i] >= counts[i - 1];
  const bool reaches_two = counts.back() >= 2;

  // The printed condition for j = 1, 2 at trial lengths that fit the finest
  // box (2 L <= 24), cross-checked against the inertia count.
  bool some_confirmed = false;
  for (std::size_t i = 0; i < std::size(betas); ++i) {
    for (double L : {4.0, 6.0, 8.0, 10.0, 12.0}) {
      if (!(prop2_condition(p.alpha, p.v0, betas[i], L, 1).holds && prop2_condition(p.alpha, p.v0, betas[i], L, 2).holds)) {
        continue;
      }
      const bool agrees = counts[i] >= 2;
      some_confirmed = some_confirmed || agrees;
      d += "; condition holds at beta=" + fmt(betas[i], 3) + " L=" + fmt(L, 3) + ", inertia count " +
           std::to_string(counts[i]) + (agrees ? " confirms" : " does NOT confirm");
      break;
    }
  }
  return {monotone && reaches_two && some_confirmed, d};
}

// 7. Weak exterior bias keeps the bias-free bound state.
Outcome criterion7() {
  bool ok = true;
  std::string d;
  for (double v0 : {0.0, 0.02, 0.05}) {
    const PhysicsParams p{1.0, v0};
    const ScanResult r = scan(p, CurveSpec::wedge(kPi4), BiasOrientation::ExteriorBias, default_ladder());
    const double mu = essential_threshold(p);
    ok = ok && r.verdict.kind == VerdictKind::Exists && r.rungs.back().lambda1 < mu;
    d += " v0=" + fmt(v0, 3) + " " + to_string(r.verdict.kind) + " lambda1=" + fmt(r.rungs.back().lambda1) +
         " mu=" + fmt(mu) + ";";
  }
  return {ok, d};
}

// 8. Smooth curve with the same asymptotes binds too.
Outcome criterion8() {
  const CurveSpec c = CurveSpec::filleted(kPi4, 1.0);
  const ScanResult r = scan({1.0, 1.0}, c, BiasOrientation::InteriorBias, critical_ladder());
  const auto cert = theorem6_certificate({1.0, 1.0}, c);
  return {r.verdict.kind == VerdictKind::Exists && cert && cert->form.total < 0.0,
          " " + std::string(to_string(r.verdict.kind)) + rungs_text(r) +
              " certificate=" + (cert ? fmt(cert->form.total, 5) : std::string("none"))};
}

// 9. Smooth curve, exterior critical or supercritical bias: no bound state.
Outcome criterion9() {
  bool ok = true;
  std::string d;
  for (double v0 : {1.0, 4.0}) {
    const ScanResult r =
        scan({1.0, v0}, CurveSpec::filleted(kPi4, 1.0), BiasOrientation::ExteriorBias, default_ladder());
    ok = ok && r.verdict.kind == VerdictKind::Absent;
    d += " v0=" + fmt(v0, 2) + " " + to_string(r.verdict.kind) + rungs_text(r) + ";";
  }
  return {ok, d};
}

// 10. The count at the smallest angle is stable under box doubling.
Outcome criterion10() {
  const PhysicsParams p{1.0, 0.5};
  const CurveSpec c = CurveSpec::wedge(0.075);
  ScanOptions o;
  const SpectralResult a = scan_rung(p, c, BiasOrientation::InteriorBias, {0.2, 48.0}, o);
  const SpectralResult b = scan_rung(p, c, BiasOrientation::InteriorBias, {0.2, 96.0}, o);
  return {a.count_below_mu_margin == b.count_below_mu_margin,
          " h=0.2 count R=48: " + std::to_string(a.count_below_mu_margin) +
              ", R=96: " + std::to_string(b.count_below_mu_margin)};
}

// 11. Iterative solver and inertia against the dense oracle.
Outcome criterion11() {
  struct Cfg {
    PhysicsParams p;
    CurveSpec c;
    BiasOrientation o;
    double R, h;
    DeltaMode m;
  };
  const Cfg cfgs[] = {
      {{1.0, 1.0}, CurveSpec::wedge(kPi4), BiasOrientation::InteriorBias, 2.0, 0.1, DeltaMode::lumping()},
      {{1.0, 1.0}, CurveSpec::wedge(kPi3), BiasOrientation::ExteriorBias, 2.0, 0.1, DeltaMode::lumping()},
      {{1.0, 0.5}, CurveSpec::wedge(0.3), BiasOrientation::InteriorBias, 2.0, 0.1, DeltaMode::gaussian()},
      {{1.0, 0.0}, CurveSpec::wedge(kPi4), BiasOrientation::ExteriorBias, 2.0, 0.1, DeltaMode::lumping()},
      {{2.0, 4.0}, CurveSpec::filleted(kPi4, 0.5), BiasOrientation::InteriorBias, 1.0, 0.05, DeltaMode::lumping()},
      {{1.0, 4.0}, CurveSpec::wedge(kPi3), BiasOrientation::InteriorBias, 2.0, 0.1, DeltaMode::lumping()},
      {{1.0, 1.0}, CurveSpec::filleted(kPi4, 1.0), BiasOrientation::ExteriorBias, 2.0, 0.1, DeltaMode::gaussian(1.0)},
      {{0.5, 0.1}, CurveSpec::wedge(1.2), BiasOrientation::InteriorBias, 2.0, 0.1, DeltaMode::lumping()},
      {{1.0, 0.2}, CurveSpec::filleted(0.4, 2.0), BiasOrientation::InteriorBias, 2.0, 0.1, DeltaMode::lumping()},
      {{3.0, 2.0}, CurveSpec::wedge(kPi4), BiasOrientation::ExteriorBias, 0.6, 0.03, DeltaMode::gaussian(2.0)},
  };
  std::mt19937_64 rng(5);
  double worst = 0.0;
  long mismatches = 0, max_dim = 0;
  for (const Cfg& c : cfgs) {
    const DiscreteOperator op = assemble_hamiltonian(c.p, c.c, c.o, Grid2D(c.R, c.h), c.m);
    max_dim = std::max(max_dim, op.dim());
    const Eigen::MatrixXd dense(op.matrix);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense, Eigen::EigenvaluesOnly).eigenvalues();
    const EigenResult r = lowest_eigenvalues(op, 6, 1e-9);
    for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(r.values[i] - ev[i]) / std::max(1.0, std::abs(ev[i])));
    std::uniform_real_distribution<double> u(ev[0] - 0.5, ev[30]);
    for (int i = 0; i < 20; ++i) {
      const double s = u(rng);
      long dense_count = 0;
      for (Eigen::Index k = 0; k < ev.size(); ++k) dense_count += ev[k] < s;
      mismatches += count_below(op, s) != dense_count;
    }
  }
  return {max_dim <= 2000 && worst <= 1e-8 && mismatches == 0,
          " 10 operators (max dim " + std::to_string(max_dim) + "), worst eigenvalue error " + fmt(worst, 3) +
              ", count mismatches " + std::to_string(mismatches) + "/200"};
}

// 12. Every module's invariant suite.
Outcome criterion12() {
  std::stringstream bins(LWIRE_INVARIANT_BINS);
  std::string bin;
  bool ok = true;
  std::string d;
  while (std::getline(bins, bin, ';')) {
    const std::string cmd = "'" + bin + "' -ts=invariants > /dev/null 2>&1";
    const bool pass = std::system(cmd.c_str()) == 0;
    ok = ok && pass;
    d += " " + bin.substr(bin.find_last_of('/') + 1) + (pass ? ":ok" : ":FAILED");
  }
  return {ok, d};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {"transverse closed form", 10, criterion1},
    {"threshold edge, straight-line control", 120, criterion2},
    {"exterior critical absence", 240, criterion3},
    {"interior critical existence", 300, criterion4},
    {"angle bound, supercritical bias", 240, criterion5},
    {"multiplicity as the angle closes", 600, criterion6},
    {"persistence under weak exterior bias", 300, criterion7},
    {"smooth curve existence", 300, criterion8},
    {"smooth curve exterior absence", 240, criterion9},
    {"finite count, stable in R", 300, criterion10},
    {"oracle equivalence", 60, criterion11},
    {"module invariant suites", 300, criterion12},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--criterion") only = std::atoi(argv[i + 1]);
  }
  if (only < 0 || only > 12) {
    std::fprintf(stderr, "criterion must be in 1..12\n");
    return 2;
  }
  bool all = true;
  for (int n = 1; n <= 12; ++n) {
    if (only && n != only) continue;
    const Criterion& c = kCriteria[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string(" exception: ") + e.what()};
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = t <= c.budget_s;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::printf("criterion %2d %s | %s |%s | %.1f s of %.0f s%s\n", n, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), t, c.budget_s, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
