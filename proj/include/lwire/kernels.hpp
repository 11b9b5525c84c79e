#pragma once

// Data-parallel inner loops.  Each kernel takes an Exec tag: Parallel runs
// the OpenMP version, Serial runs the plain reference loop the tests and the
// benchmark compare against.

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace lwire {

enum class Exec { Serial, Parallel };

using SparseMatrix = Eigen::SparseMatrix<double>;

namespace kernels {

/// y = A x for a structurally and numerically symmetric A stored
/// column-major; column i is read as row i.
void symmetric_spmv(const SparseMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y,
                    Exec exec = Exec::Parallel);

/// x^T A x for symmetric A.
double symmetric_quadratic_form(const SparseMatrix& a, const Eigen::VectorXd& x,
                                Exec exec = Exec::Parallel);

/// Max over rows of (diag - sum |offdiag|) and (diag + sum |offdiag|).
struct GershgorinBounds {
  double lower;
  double upper;
};
GershgorinBounds gershgorin(const SparseMatrix& a, Exec exec = Exec::Parallel);

}  // namespace kernels
}  // namespace lwire
