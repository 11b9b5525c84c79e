#include "lwire/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "lwire/errors.hpp"

namespace lwire {

// ---------------------------------------------------------------------------
// ShiftInvert

struct ShiftInvert::Impl {
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

ShiftInvert::ShiftInvert(const SparseMatrix& a, double sigma)
    : impl_(std::make_unique<Impl>()), sigma_(sigma), negatives_(0) {
  if (a.rows() != a.cols()) throw InvalidArgument("matrix must be square");
  if (!std::isfinite(sigma)) throw InvalidArgument("shift must be finite");
  impl_->ldlt.analyzePattern(a);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    impl_->ldlt.setShift(-sigma_);
    impl_->ldlt.factorize(a);
    bool ok = impl_->ldlt.info() == Eigen::Success;
    if (ok) {
      const Eigen::VectorXd& d = impl_->ldlt.vectorD();
      ok = d.allFinite() && (d.array() != 0.0).all();
      if (ok) {
        negatives_ = static_cast<long>((d.array() < 0.0).count());
        return;
      }
    }
    if (attempt < 3) sigma_ += 1e-10;
  }
  throw FactorizationBreakdown("LDL^T of A - sigma I broke down near sigma = " +
                               std::to_string(sigma));
}

ShiftInvert::~ShiftInvert() = default;
ShiftInvert::ShiftInvert(ShiftInvert&&) noexcept = default;
ShiftInvert& ShiftInvert::operator=(ShiftInvert&&) noexcept = default;

void ShiftInvert::solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) const {
  x = impl_->ldlt.solve(b);
}

long count_below(const DiscreteOperator& a, double sigma) {
  return ShiftInvert(a.matrix, sigma).negative_count();
}

// ---------------------------------------------------------------------------
// Shift-invert Lanczos

namespace {

struct Found {
  double lambda;
  double residual;
  Eigen::VectorXd vec;
};

void orthogonalize(Eigen::VectorXd& w, const std::vector<Found>& locked) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Found& f : locked) w -= f.vec.dot(w) * f.vec;
  }
}

Eigen::VectorXd random_unit(long n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(rng);
  return v / v.norm();
}

// Rayleigh quotient and residual norm of a unit vector.
std::pair<double, double> rayleigh(const SparseMatrix& a, const Eigen::VectorXd& x, Exec exec) {
  Eigen::VectorXd ax;
  kernels::symmetric_spmv(a, x, ax, exec);
  const double lambda = x.dot(ax);
  return {lambda, (ax - lambda * x).norm()};
}

int pick_krylov_dim(const EigenOptions& opts, long dim, long want, long locked) {
  long m = opts.krylov_dim > 0 ? opts.krylov_dim : std::max<long>(40, 2 * want + 20);
  const long budget = std::max<long>(20, static_cast<long>(6e8 / (8.0 * static_cast<double>(dim))));
  if (opts.krylov_dim <= 0) m = std::min(m, budget);
  m = std::min(m, dim - locked);
  return static_cast<int>(std::max<long>(m, 1));
}

struct Cycle {
  Eigen::VectorXd theta;        // Ritz values of the inverted operator
  Eigen::MatrixXd ritz;         // Ritz vectors in the Lanczos basis
  Eigen::MatrixXd basis;        // dim x steps
  int steps = 0;
};

Cycle lanczos_cycle(const ShiftInvert& op, const Eigen::VectorXd& start,
                    const std::vector<Found>& locked, int m) {
  const long n = start.size();
  Cycle c;
  c.basis.resize(n, m);
  std::vector<double> alpha;
  std::vector<double> beta;
  c.basis.col(0) = start;
  Eigen::VectorXd w(n);
  for (int j = 0; j < m; ++j) {
    op.solve(c.basis.col(j), w);
    orthogonalize(w, locked);
    const double a = c.basis.col(j).dot(w);
    w -= a * c.basis.col(j);
    if (j > 0) w -= beta.back() * c.basis.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd coef = c.basis.leftCols(j + 1).transpose() * w;
      w -= c.basis.leftCols(j + 1) * coef;
      orthogonalize(w, locked);
    }
    alpha.push_back(a);
    c.steps = j + 1;
    const double b = w.norm();
    if (j + 1 == m) break;
    if (!(b > 1e-12 * std::max(1.0, std::abs(a)))) break;  // invariant subspace
    beta.push_back(b);
    c.basis.col(j + 1) = w / b;
  }
  const int s = c.steps;
  c.basis.conservativeResize(n, s);
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), s);
  Eigen::VectorXd sub = s > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), s - 1))
                              : Eigen::VectorXd();
  if (s == 1) {
    c.theta = diag;
    c.ritz = Eigen::MatrixXd::Ones(1, 1);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    c.theta = tri.eigenvalues();
    c.ritz = tri.eigenvectors();
  }
  return c;
}

// Core loop for a fixed factorization.  Finds every eigenvalue below the
// shift plus the lowest `need_above` ones above it.
void solve_fixed_shift(const DiscreteOperator& a, long need_below, long need_above,
                       double tol, const ShiftInvert& op, const EigenOptions& opts,
                       std::mt19937_64& rng, std::vector<Found>& found, SolverStats& stats) {
  const long n = a.dim();
  const double sigma = op.sigma();
  Eigen::VectorXd start = random_unit(n, rng);
  auto count_side = [&](bool below) {
    return std::count_if(found.begin(), found.end(),
                         [&](const Found& f) { return (f.lambda < sigma) == below; });
  };
  std::vector<std::pair<double, double>> pending;  // unconverged pairs of the last cycle
  for (;;) {
    const long have_below = count_side(true);
    const long have_above = count_side(false);
    if (have_below >= need_below && have_above >= need_above) return;
    if (stats.cycles >= opts.max_cycles || static_cast<long>(found.size()) >= n) {
      std::vector<double> vals;
      std::vector<double> res;
      for (const Found& f : found) {
        vals.push_back(f.lambda);
        res.push_back(f.residual);
      }
      for (const auto& [l, r] : pending) {
        vals.push_back(l);
        res.push_back(r);
      }
      throw ConvergenceFailure("Lanczos did not converge within " +
                                   std::to_string(opts.max_cycles) + " cycles",
                               vals, res);
    }
    orthogonalize(start, found);
    if (!(start.norm() > 1e-8)) {
      start = random_unit(n, rng);
      orthogonalize(start, found);
    }
    start.normalize();

    const long want = (need_below - have_below) + (need_above - have_above);
    const int m = pick_krylov_dim(opts, n, want, static_cast<long>(found.size()));
    const Cycle cyc = lanczos_cycle(op, start, found, m);
    ++stats.cycles;
    stats.lanczos_steps += cyc.steps;

    // Candidate order: below the shift, nearest first (most negative theta);
    // above the shift, nearest first (largest theta).
    std::vector<int> neg;
    std::vector<int> pos;
    for (int i = 0; i < cyc.steps; ++i) (cyc.theta[i] < 0.0 ? neg : pos).push_back(i);
    std::sort(neg.begin(), neg.end(), [&](int x, int y) { return cyc.theta[x] < cyc.theta[y]; });
    std::sort(pos.begin(), pos.end(), [&](int x, int y) { return cyc.theta[x] > cyc.theta[y]; });

    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    pending.clear();
    auto try_candidate = [&](int i) {
      Eigen::VectorXd x = cyc.basis * cyc.ritz.col(i);
      x.normalize();
      const auto [lambda, r] = rayleigh(a.matrix, x, opts.exec);
      if (r <= tol) {
        found.push_back({lambda, r, std::move(x)});
        return true;
      }
      pending.emplace_back(lambda, r);
      next += x;
      return false;
    };
    const long miss_below = need_below - have_below;
    for (long t = 0; t < static_cast<long>(neg.size()) && t < miss_below + 2; ++t) {
      try_candidate(neg[static_cast<std::size_t>(t)]);
    }
    // Above the shift only a contiguous run of converged pairs is kept, so
    // that a skipped lower eigenvalue cannot be replaced by a higher one.
    const long miss_above = need_above - have_above;
    bool contiguous = true;
    for (long t = 0; t < static_cast<long>(pos.size()) && t < miss_above + 2; ++t) {
      const int i = pos[static_cast<std::size_t>(t)];
      if (contiguous) {
        contiguous = try_candidate(i);
      } else {
        Eigen::VectorXd x = cyc.basis * cyc.ritz.col(i);
        next += x / x.norm();
      }
    }
    start = next;
  }
}

EigenResult finish(std::vector<Found> found, int k, bool want_vectors, const SolverStats& stats) {
  std::sort(found.begin(), found.end(),
            [](const Found& x, const Found& y) { return x.lambda < y.lambda; });
  EigenResult out;
  out.stats = stats;
  const int take = std::min<int>(k, static_cast<int>(found.size()));
  for (int i = 0; i < take; ++i) {
    out.values.push_back(found[static_cast<std::size_t>(i)].lambda);
    out.residuals.push_back(found[static_cast<std::size_t>(i)].residual);
  }
  if (want_vectors && take > 0) {
    out.vectors.resize(found.front().vec.size(), take);
    for (int i = 0; i < take; ++i) out.vectors.col(i) = found[static_cast<std::size_t>(i)].vec;
  }
  return out;
}

void check_request(const DiscreteOperator& a, int k, double tol) {
  if (k < 1 || k >= a.dim()) throw InvalidArgument("need 1 <= k < dim");
  if (!(tol > 0.0 && tol <= 1e-4)) throw InvalidArgument("tol_resid must lie in (0, 1e-4]");
}

EigenResult solve_with(const DiscreteOperator& a, int k, double tol, const ShiftInvert& factor,
                       const EigenOptions& opts, std::mt19937_64& rng, SolverStats stats) {
  std::vector<Found> found;
  const long below = factor.negative_count();
  long need_above = std::max<long>(0, k - below);
  stats.shift = factor.sigma();
  for (int round = 0;; ++round) {
    solve_fixed_shift(a, below, need_above, tol, factor, opts, rng, found, stats);
    if (!opts.verify_count) break;
    // Confirm nothing below the k-th value was skipped.
    std::vector<double> vals;
    for (const Found& f : found) vals.push_back(f.lambda);
    std::sort(vals.begin(), vals.end());
    const double top = vals[static_cast<std::size_t>(std::min<long>(k, static_cast<long>(vals.size())) - 1)];
    const double eps = std::max(10.0 * tol, 1e-9 * std::max(1.0, std::abs(top)));
    const long exact = ShiftInvert(a.matrix, top + eps).negative_count();
    ++stats.factorizations;
    const long have = std::count_if(vals.begin(), vals.end(), [&](double v) { return v < top + eps; });
    if (exact <= have || round >= 8) break;
    need_above += exact - have;
  }
  return finish(std::move(found), k, opts.want_vectors, stats);
}

}  // namespace

EigenResult lowest_eigenvalues(const DiscreteOperator& a, int k, double tol_resid,
                               const ShiftInvert& factor, const EigenOptions& opts) {
  check_request(a, k, tol_resid);
  std::mt19937_64 rng(opts.seed);
  return solve_with(a, k, tol_resid, factor, opts, rng, SolverStats{});
}

EigenResult lowest_eigenvalues(const DiscreteOperator& a, int k, double tol_resid,
                               const EigenOptions& opts) {
  check_request(a, k, tol_resid);
  std::mt19937_64 rng(opts.seed);
  SolverStats stats;
  double sigma;
  if (opts.shift) {
    sigma = *opts.shift;
  } else {
    // A pilot cycle from just below the Gershgorin bound; its Ritz values
    // lie above the true eigenvalues and place the working shift.
    const auto gb = kernels::gershgorin(a.matrix, opts.exec);
    const double span = std::max(gb.upper - gb.lower, 1e-300);
    const ShiftInvert pilot(a.matrix, gb.lower - 1e-3 * span);
    ++stats.factorizations;
    const int m = pick_krylov_dim(opts, a.dim(), k, 0);
    const Cycle cyc = lanczos_cycle(pilot, random_unit(a.dim(), rng), {}, m);
    stats.lanczos_steps += cyc.steps;
    std::vector<double> est;
    for (int i = 0; i < cyc.steps; ++i) {
      if (cyc.theta[i] > 0.0) est.push_back(pilot.sigma() + 1.0 / cyc.theta[i]);
    }
    std::sort(est.begin(), est.end());
    const double low = est.front();
    const double kth = est[std::min<std::size_t>(static_cast<std::size_t>(k) - 1, est.size() - 1)];
    sigma = low - 0.1 * (kth - low) - 1e-6 * std::max(1.0, std::abs(low));
  }
  const ShiftInvert factor(a.matrix, sigma);
  ++stats.factorizations;
  return solve_with(a, k, tol_resid, factor, opts, rng, stats);
}

// ---------------------------------------------------------------------------
// Scan

double acceptance_margin(const PhysicsParams& p) {
  return std::max(0.02 * std::abs(essential_threshold(p)), 1e-3 * p.alpha * p.alpha);
}

const char* to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Exists: return "Exists";
    case VerdictKind::Absent: return "Absent";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

VerdictKind verdict_from_string(const std::string& s) {
  if (s == "Exists") return VerdictKind::Exists;
  if (s == "Absent") return VerdictKind::Absent;
  if (s == "Inconclusive") return VerdictKind::Inconclusive;
  throw ConfigError("unknown verdict '" + s + "'");
}

double default_tol_R(const SpectralResult& largest_r) {
  return std::max(largest_r.margin, 0.5 * std::abs(largest_r.lambda1 - largest_r.mu));
}

Verdict decide_verdict(std::span<const SpectralResult> rungs, std::optional<double> tol_R) {
  if (rungs.empty()) return {};
  const SpectralResult& finest = rungs.back();
  if (finest.lambda1 >= finest.mu - finest.margin) return {VerdictKind::Absent, std::nullopt};
  for (const SpectralResult& r : rungs) {
    if (!(r.lambda1 < r.mu - r.margin)) return {};
  }
  if (rungs.size() < 2) return {};
  // The two largest-R rungs, later rungs winning ties.
  std::vector<std::size_t> idx(rungs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return rungs[x].grid.R < rungs[y].grid.R; });
  const SpectralResult& big = rungs[idx[idx.size() - 1]];
  const SpectralResult& next = rungs[idx[idx.size() - 2]];
  const double tol = tol_R.value_or(default_tol_R(big));
  if (std::abs(big.lambda1 - next.lambda1) < tol) return {VerdictKind::Exists, finest.lambda1};
  return {};
}

void check_ladder(std::span<const GridRung> ladder) {
  if (ladder.size() < 2) throw InvalidArgument("a ladder needs at least two rungs");
  bool strict = false;
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i].R < ladder[i - 1].R || ladder[i].h > ladder[i - 1].h) {
      throw InvalidArgument("ladder rungs must have non-decreasing R and non-increasing h");
    }
    strict = strict || ladder[i].R > ladder[i - 1].R || ladder[i].h < ladder[i - 1].h;
  }
  if (!strict) throw InvalidArgument("ladder rungs must not all be equal");
}

SpectralResult scan_rung(const PhysicsParams& p, const CurveSpec& c, BiasOrientation o,
                         const GridRung& rung, const ScanOptions& opts) {
  p.validate();
  const Grid2D grid(rung.R, rung.h, opts.origin_offset);
  const DiscreteOperator op = assemble_hamiltonian(p, c, o, grid, opts.delta, opts.exec);

  SpectralResult out;
  out.mu = essential_threshold(p);
  out.margin = opts.margin.value_or(acceptance_margin(p));
  if (!(out.margin > 0.0)) throw InvalidArgument("margin must be positive");
  out.seed = opts.seed;
  out.grid = {rung.h, rung.R, grid.nx(), grid.ny(), op.dim(), opts.origin_offset};

  const ShiftInvert factor(op.matrix, out.mu - out.margin);
  out.count_below_mu_margin = factor.negative_count();
  const long k = std::min<long>(out.count_below_mu_margin + 2, op.dim() - 1);

  EigenOptions eo;
  eo.seed = opts.seed;
  eo.verify_count = false;
  eo.exec = opts.exec;
  const EigenResult res = lowest_eigenvalues(op, static_cast<int>(k), opts.tol_resid, factor, eo);
  out.stats = res.stats;
  out.stats.factorizations += 1;
  out.eigenvalues = res.values;
  out.residuals = res.residuals;
  out.lambda1 = res.values.front();
  for (double v : res.values) {
    if (v < out.mu - out.margin) out.eigenvalues_below.push_back(v);
  }
  return out;
}

ScanResult discrete_spectrum_scan(const PhysicsParams& p, const CurveSpec& c, BiasOrientation o,
                                  std::span<const GridRung> ladder, const ScanOptions& opts) {
  check_ladder(ladder);
  ScanResult out;
  for (const GridRung& rung : ladder) out.rungs.push_back(scan_rung(p, c, o, rung, opts));
  out.verdict = decide_verdict(out.rungs, opts.tol_R);
  return out;
}

}  // namespace lwire
