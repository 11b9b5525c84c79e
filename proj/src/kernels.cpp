#include "lwire/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lwire::kernels {

void symmetric_spmv(const SparseMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y,
                    Exec exec) {
  const Eigen::Index n = a.cols();
  y.resize(n);
  if (exec == Exec::Serial) {
    y.noalias() = a * x;
    return;
  }
  const int* outer = a.outerIndexPtr();
  const int* inner = a.innerIndexPtr();
  const double* val = a.valuePtr();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = outer[i]; k < outer[i + 1]; ++k) acc += val[k] * x[inner[k]];
    y[i] = acc;
  }
}

double symmetric_quadratic_form(const SparseMatrix& a, const Eigen::VectorXd& x, Exec exec) {
  const Eigen::Index n = a.cols();
  const int* outer = a.outerIndexPtr();
  const int* inner = a.innerIndexPtr();
  const double* val = a.valuePtr();
  double total = 0.0;
  if (exec == Exec::Serial) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = outer[i]; k < outer[i + 1]; ++k) acc += val[k] * x[inner[k]];
      total += x[i] * acc;
    }
    return total;
  }
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = outer[i]; k < outer[i + 1]; ++k) acc += val[k] * x[inner[k]];
    total += x[i] * acc;
  }
  return total;
}

GershgorinBounds gershgorin(const SparseMatrix& a, Exec exec) {
  const Eigen::Index n = a.cols();
  const int* outer = a.outerIndexPtr();
  const int* inner = a.innerIndexPtr();
  const double* val = a.valuePtr();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto row = [&](Eigen::Index i, double& l, double& h) {
    double d = 0.0;
    double r = 0.0;
    for (int k = outer[i]; k < outer[i + 1]; ++k) {
      if (inner[k] == i) {
        d += val[k];
      } else {
        r += std::abs(val[k]);
      }
    }
    l = std::min(l, d - r);
    h = std::max(h, d + r);
  };
  if (exec == Exec::Serial) {
    for (Eigen::Index i = 0; i < n; ++i) row(i, lo, hi);
    return {lo, hi};
  }
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
  for (Eigen::Index i = 0; i < n; ++i) row(i, lo, hi);
  return {lo, hi};
}

}  // namespace lwire::kernels
