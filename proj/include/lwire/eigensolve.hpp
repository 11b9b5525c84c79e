#pragma once

// Lowest eigenvalues of an assembled operator and exact eigenvalue counts.
//
// Counts come from the inertia of a sparse LDL^T factorization of A - sigma I
// (Sylvester's law).  Eigenpairs come from shift-and-invert Lanczos with
// full reorthogonalization and locking; every reported pair carries an
// explicitly recomputed residual |A v - lambda v|.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lwire/assembly.hpp"

namespace lwire {

/// LDL^T factorization of A - sigma I with an AMD fill-reducing ordering.
/// On a zero pivot sigma is nudged up by 1e-10 (at most three times).
class ShiftInvert {
 public:
  ShiftInvert(const SparseMatrix& a, double sigma);
  ~ShiftInvert();
  ShiftInvert(ShiftInvert&&) noexcept;
  ShiftInvert& operator=(ShiftInvert&&) noexcept;

  /// Shift actually factorized (after any breakdown perturbation).
  double sigma() const noexcept { return sigma_; }
  /// Number of eigenvalues of A strictly below sigma().
  long negative_count() const noexcept { return negatives_; }
  /// x = (A - sigma I)^{-1} b.
  void solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double sigma_;
  long negatives_;
};

/// Number of eigenvalues of A strictly below sigma.
long count_below(const DiscreteOperator& a, double sigma);

struct EigenOptions {
  std::uint64_t seed = 20240601;
  std::optional<double> shift;  // default: below the Gershgorin lower bound
  int krylov_dim = 0;           // 0 picks a size from k and the memory budget
  int max_cycles = 40;
  bool want_vectors = false;
  /// Confirm by a second factorization that no eigenvalue below the
  /// largest reported one was missed (guards against exact multiplicities).
  bool verify_count = true;
  Exec exec = Exec::Parallel;
};

struct SolverStats {
  long lanczos_steps = 0;
  int cycles = 0;
  int factorizations = 0;
  double shift = 0.0;

  friend bool operator==(const SolverStats&, const SolverStats&) = default;
};

struct EigenResult {
  std::vector<double> values;     // ascending
  std::vector<double> residuals;  // |A v - lambda v| with |v| = 1
  Eigen::MatrixXd vectors;        // columns, empty unless requested
  SolverStats stats;
};

/// The k smallest eigenvalues of A.  Requires 1 <= k < dim and
/// 0 < tol_resid <= 1e-4.  Throws ConvergenceFailure with the best iterate
/// when the residual target is not met within max_cycles restarts.
EigenResult lowest_eigenvalues(const DiscreteOperator& a, int k, double tol_resid,
                               const EigenOptions& opts = {});

/// Same, reusing an existing factorization as the shift-invert operator.
EigenResult lowest_eigenvalues(const DiscreteOperator& a, int k, double tol_resid,
                               const ShiftInvert& factor, const EigenOptions& opts);

// ---------------------------------------------------------------------------
// Ladder scan and verdict.

struct GridRung {
  double h = 0.1;
  double R = 12.0;

  friend bool operator==(const GridRung&, const GridRung&) = default;
};

/// Default acceptance margin max(0.02 |mu|, 1e-3 alpha^2).
double acceptance_margin(const PhysicsParams& p);

struct GridSummary {
  double h = 0.0;
  double R = 0.0;
  long nx = 0;
  long ny = 0;
  long dim = 0;
  Point origin_offset;

  friend bool operator==(const GridSummary&, const GridSummary&) = default;
};

struct SpectralResult {
  double mu = 0.0;
  double margin = 0.0;
  double lambda1 = 0.0;                  // lowest eigenvalue of the rung
  std::vector<double> eigenvalues;       // all computed, ascending
  std::vector<double> residuals;
  std::vector<double> eigenvalues_below; // those < mu - margin
  long count_below_mu_margin = 0;
  SolverStats stats;
  GridSummary grid;
  std::uint64_t seed = 0;

  friend bool operator==(const SpectralResult&, const SpectralResult&) = default;
};

enum class VerdictKind { Exists, Absent, Inconclusive };

const char* to_string(VerdictKind v);
VerdictKind verdict_from_string(const std::string& s);

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::optional<double> lambda1;  // set for Exists

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// R-stability tolerance: max(margin, 0.5 |lambda1 - mu|) on the largest-R rung.
double default_tol_R(const SpectralResult& largest_r);

/// Exists when every rung has lambda1 < mu - margin and the two largest-R
/// rungs differ by less than tol_R; Absent when the finest (last) rung has
/// lambda1 >= mu - margin; Inconclusive otherwise.
Verdict decide_verdict(std::span<const SpectralResult> rungs,
                       std::optional<double> tol_R = std::nullopt);

struct ScanOptions {
  std::optional<double> margin;
  DeltaMode delta;
  Point origin_offset;
  std::uint64_t seed = 20240601;
  double tol_resid = 1e-6;
  std::optional<double> tol_R;
  Exec exec = Exec::Parallel;
};

struct ScanResult {
  std::vector<SpectralResult> rungs;
  Verdict verdict;
};

/// Throws InvalidArgument unless the ladder has >= 2 rungs with R
/// non-decreasing, h non-increasing and at least one strict change.
void check_ladder(std::span<const GridRung> ladder);

/// One rung: assemble, factor at mu - margin, count, and solve for
/// count + 2 eigenvalues.
SpectralResult scan_rung(const PhysicsParams& p, const CurveSpec& c, BiasOrientation o,
                         const GridRung& rung, const ScanOptions& opts);

ScanResult discrete_spectrum_scan(const PhysicsParams& p, const CurveSpec& c, BiasOrientation o,
                                  std::span<const GridRung> ladder, const ScanOptions& opts = {});

}  // namespace lwire
