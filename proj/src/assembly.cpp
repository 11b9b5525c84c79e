#include "lwire/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "lwire/errors.hpp"

namespace lwire {

Grid2D::Grid2D(double half_extent, double h, Point origin_offset)
    : half_(half_extent), h_(h), center_(origin_offset), n_(0) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) {
    throw InvalidArgument("box half-extent must be positive");
  }
  if (!std::isfinite(origin_offset.x) || !std::isfinite(origin_offset.y)) {
    throw InvalidArgument("box offset must be finite");
  }
  const double intervals = std::round(2.0 * half_extent / h);
  if (std::abs(intervals * h - 2.0 * half_extent) > 1e-12 * 2.0 * half_extent) {
    throw InvalidArgument("h must divide 2R");
  }
  if (intervals < 2.0) throw InvalidArgument("grid has no interior node");
  if (intervals > 46000.0) throw InvalidArgument("grid too large");
  n_ = static_cast<long>(intervals) - 1;
}

Box Grid2D::owned_region() const noexcept {
  const double half = 0.5 * h_;
  return {x(0) - half, x(n_ - 1) + half, y(0) - half, y(n_ - 1) + half};
}

void DeltaMode::validate() const {
  if (kind == Kind::GaussianMollifier && !(width_factor >= 0.5 && width_factor <= 5.0)) {
    throw InvalidArgument("mollifier width factor must lie in [0.5, 5]");
  }
}

const char* to_string(DeltaMode::Kind k) {
  return k == DeltaMode::Kind::CellLumping ? "lumping" : "gaussian";
}

DeltaMode::Kind delta_kind_from_string(const std::string& s) {
  if (s == "lumping" || s == "cell_lumping") return DeltaMode::Kind::CellLumping;
  if (s == "gaussian" || s == "gaussian_mollifier") return DeltaMode::Kind::GaussianMollifier;
  throw ConfigError("unknown delta mode '" + s + "'");
}

DiscreteOperator DiscreteOperator::from_matrix(SparseMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidArgument("matrix must be square");
  m.makeCompressed();
  const SparseMatrix t = m.transpose();
  if ((m - t).norm() != 0.0) throw InvalidArgument("matrix must be symmetric");
  DiscreteOperator op;
  op.matrix = std::move(m);
  op.potential = Eigen::VectorXd::Zero(op.matrix.rows());
  op.line_mass = Eigen::VectorXd::Zero(op.matrix.rows());
  return op;
}

void check_assembly_inputs(const PhysicsParams& p, const CurveSpec& c, const Grid2D& g) {
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) throw InvalidArgument("alpha must be >= 0");
  if (!(p.v0 >= 0.0) || !std::isfinite(p.v0)) throw InvalidArgument("v0 must be >= 0");
  c.validate();
  const Point o = g.origin_offset();
  if (!(std::abs(o.x) < g.half_extent() && std::abs(o.y) < g.half_extent())) {
    throw InvalidArgument("the curve vertex must lie inside the box");
  }
  const double inv_alpha = p.alpha > 0.0 ? 1.0 / p.alpha : INFINITY;
  const double limit = std::min(inv_alpha, 1.0 / std::sqrt(std::max(p.v0, 1.0))) / 4.0;
  if (g.h() > limit * (1.0 + 1e-12)) {
    throw InvalidArgument("h = " + std::to_string(g.h()) + " does not resolve the length scales (need h <= " +
                          std::to_string(limit) + ")");
  }
}

namespace {

bool biased(RegionLabel r, BiasOrientation o) {
  return (o == BiasOrientation::InteriorBias && r == RegionLabel::Interior) ||
         (o == BiasOrientation::ExteriorBias && r == RegionLabel::Exterior);
}

Eigen::VectorXd lumped_mass(const Curve& curve, const Grid2D& g, Exec exec) {
  const long n = g.size();
  const double half = 0.5 * g.h();
  Eigen::VectorXd mass(n);
  auto cell = [&](long k) {
    const Point q = g.node(k);
    mass[k] = curve.length_in_box({q.x - half, q.x + half, q.y - half, q.y + half});
  };
  if (exec == Exec::Serial) {
    for (long k = 0; k < n; ++k) cell(k);
  } else {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) cell(k);
  }
  return mass;
}

struct Sample {
  Point at;
  double weight;  // ds / (kernel sum over nodes)
};

Eigen::VectorXd mollified_mass(const Curve& curve, const Grid2D& g, double width_factor,
                               Exec exec) {
  const double h = g.h();
  const long nn = g.nx();
  const double sigma = width_factor * h;
  const double cutoff = 6.0 * sigma;
  const double cutoff_sq = cutoff * cutoff;
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  const long reach = static_cast<long>(std::ceil(cutoff / h)) + 1;

  auto kernel = [&](Point node, Point at) {
    const double dx = node.x - at.x;
    const double dy = node.y - at.y;
    const double d2 = dx * dx + dy * dy;
    return d2 <= cutoff_sq ? std::exp(-d2 * inv_two_var) : 0.0;
  };
  auto nearest_i = [&](double v, double first) {
    return std::clamp(static_cast<long>(std::lround((v - first) / h)), 0L, nn - 1);
  };

  std::vector<Sample> samples;
  for (const auto& [s0, s1] : curve.s_intervals_in_box(g.owned_region())) {
    const long pieces = std::max(1L, static_cast<long>(std::ceil((s1 - s0) / (0.25 * h))));
    const double ds = (s1 - s0) / static_cast<double>(pieces);
    for (long q = 0; q < pieces; ++q) {
      const double s = s0 + (static_cast<double>(q) + 0.5) * ds;
      samples.push_back({curve.point_at(s), ds});
    }
  }

  // Normalize each sample's kernel over the nodes that exist, so that the
  // deposited mass equals ds exactly.
  const long ns = static_cast<long>(samples.size());
  auto normalize = [&](long q) {
    Sample& sm = samples[static_cast<std::size_t>(q)];
    const long ci = nearest_i(sm.at.x, g.x(0));
    const long cj = nearest_i(sm.at.y, g.y(0));
    double z = 0.0;
    for (long j = std::max(0L, cj - reach); j <= std::min(nn - 1, cj + reach); ++j) {
      for (long i = std::max(0L, ci - reach); i <= std::min(nn - 1, ci + reach); ++i) {
        z += kernel({g.x(i), g.y(j)}, sm.at);
      }
    }
    sm.weight = z > 0.0 ? sm.weight / z : 0.0;
  };
  if (exec == Exec::Serial) {
    for (long q = 0; q < ns; ++q) normalize(q);
  } else {
#pragma omp parallel for schedule(static)
    for (long q = 0; q < ns; ++q) normalize(q);
  }

  // Bucket samples by nearest node, then gather per node in a fixed order;
  // the result does not depend on the thread count.
  std::vector<long> bucket_start(static_cast<std::size_t>(g.size()) + 1, 0);
  std::vector<long> owner(static_cast<std::size_t>(ns));
  for (long q = 0; q < ns; ++q) {
    const Point at = samples[static_cast<std::size_t>(q)].at;
    owner[static_cast<std::size_t>(q)] = g.index(nearest_i(at.x, g.x(0)), nearest_i(at.y, g.y(0)));
    ++bucket_start[static_cast<std::size_t>(owner[static_cast<std::size_t>(q)]) + 1];
  }
  for (std::size_t k = 1; k < bucket_start.size(); ++k) bucket_start[k] += bucket_start[k - 1];
  std::vector<long> order(static_cast<std::size_t>(ns));
  {
    std::vector<long> fill(bucket_start.begin(), bucket_start.end() - 1);
    for (long q = 0; q < ns; ++q) {
      order[static_cast<std::size_t>(fill[static_cast<std::size_t>(owner[static_cast<std::size_t>(q)])]++)] = q;
    }
  }

  Eigen::VectorXd mass = Eigen::VectorXd::Zero(g.size());
  auto gather = [&](long k) {
    const long i0 = k % nn;
    const long j0 = k / nn;
    const Point node = g.node(k);
    double acc = 0.0;
    for (long j = std::max(0L, j0 - reach); j <= std::min(nn - 1, j0 + reach); ++j) {
      for (long i = std::max(0L, i0 - reach); i <= std::min(nn - 1, i0 + reach); ++i) {
        const long b = g.index(i, j);
        for (long t = bucket_start[static_cast<std::size_t>(b)];
             t < bucket_start[static_cast<std::size_t>(b) + 1]; ++t) {
          const Sample& sm = samples[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])];
          acc += sm.weight * kernel(node, sm.at);
        }
      }
    }
    mass[k] = acc;
  };
  // Only nodes within reach of some sample can receive mass.
  std::vector<char> touched(static_cast<std::size_t>(g.size()), 0);
  for (long q = 0; q < ns; ++q) {
    const long b = owner[static_cast<std::size_t>(q)];
    const long bi = b % nn;
    const long bj = b / nn;
    for (long j = std::max(0L, bj - reach); j <= std::min(nn - 1, bj + reach); ++j) {
      for (long i = std::max(0L, bi - reach); i <= std::min(nn - 1, bi + reach); ++i) {
        touched[static_cast<std::size_t>(g.index(i, j))] = 1;
      }
    }
  }
  const long total = g.size();
  if (exec == Exec::Serial) {
    for (long k = 0; k < total; ++k) {
      if (touched[static_cast<std::size_t>(k)]) gather(k);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 256)
    for (long k = 0; k < total; ++k) {
      if (touched[static_cast<std::size_t>(k)]) gather(k);
    }
  }
  return mass;
}

inline double diagonal_entry(double inv_h2, double v, double alpha, double mass) {
  return 4.0 * inv_h2 + v - alpha * mass * inv_h2;
}

}  // namespace

Eigen::VectorXd potential_field(const PhysicsParams& p, const CurveSpec& c, BiasOrientation o,
                                const Grid2D& g, Exec exec) {
  const Curve curve(c);
  const long n = g.size();
  Eigen::VectorXd v(n);
  auto at = [&](long k) { v[k] = biased(curve.classify(g.node(k)), o) ? p.v0 : 0.0; };
  if (exec == Exec::Serial) {
    for (long k = 0; k < n; ++k) at(k);
  } else {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) at(k);
  }
  return v;
}

Eigen::VectorXd line_mass(const CurveSpec& c, const Grid2D& g, const DeltaMode& m, Exec exec) {
  m.validate();
  const Curve curve(c);
  return m.kind == DeltaMode::Kind::CellLumping ? lumped_mass(curve, g, exec)
                                                : mollified_mass(curve, g, m.width_factor, exec);
}

DiscreteOperator assemble_hamiltonian(const PhysicsParams& p, const CurveSpec& c,
                                      BiasOrientation o, const Grid2D& g, const DeltaMode& m,
                                      Exec exec) {
  check_assembly_inputs(p, c, g);
  m.validate();

  DiscreteOperator op;
  op.meta = OperatorMeta{p, c, o, g, m};
  op.potential = potential_field(p, c, o, g, exec);
  op.line_mass = line_mass(c, g, m, exec);

  const long nn = g.nx();
  const long n = g.size();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const double off = -inv_h2;

  if (exec == Exec::Serial) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(5 * n));
    for (long k = 0; k < n; ++k) {
      const long i = k % nn;
      const long j = k / nn;
      if (j > 0) trip.emplace_back(k - nn, k, off);
      if (i > 0) trip.emplace_back(k - 1, k, off);
      trip.emplace_back(k, k, diagonal_entry(inv_h2, op.potential[k], p.alpha, op.line_mass[k]));
      if (i + 1 < nn) trip.emplace_back(k + 1, k, off);
      if (j + 1 < nn) trip.emplace_back(k + nn, k, off);
    }
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    op.matrix.makeCompressed();
    return op;
  }

  // Column-compressed storage is filled directly: the column pattern of
  // the 5-point stencil is known, so each column is written independently.
  std::vector<int> outer(static_cast<std::size_t>(n) + 1, 0);
  for (long k = 0; k < n; ++k) {
    const long i = k % nn;
    const long j = k / nn;
    outer[static_cast<std::size_t>(k) + 1] =
        outer[static_cast<std::size_t>(k)] + 1 + (i > 0) + (i + 1 < nn) + (j > 0) + (j + 1 < nn);
  }
  const int nnz = outer.back();
  std::vector<int> inner(static_cast<std::size_t>(nnz));
  std::vector<double> values(static_cast<std::size_t>(nnz));
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) {
    const long i = k % nn;
    const long j = k / nn;
    int pos = outer[static_cast<std::size_t>(k)];
    auto put = [&](long row, double v) {
      inner[static_cast<std::size_t>(pos)] = static_cast<int>(row);
      values[static_cast<std::size_t>(pos)] = v;
      ++pos;
    };
    if (j > 0) put(k - nn, off);
    if (i > 0) put(k - 1, off);
    put(k, diagonal_entry(inv_h2, op.potential[k], p.alpha, op.line_mass[k]));
    if (i + 1 < nn) put(k + 1, off);
    if (j + 1 < nn) put(k + nn, off);
  }
  op.matrix = Eigen::Map<const SparseMatrix>(n, n, nnz, outer.data(), inner.data(), values.data());
  op.matrix.makeCompressed();
  return op;
}

void export_coordinate(const DiscreteOperator& op, std::ostream& out) {
  const SparseMatrix& a = op.matrix;
  out << a.rows() << ' ' << a.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

DiscreteForm discrete_form(const DiscreteOperator& op, const Eigen::VectorXd& psi, Exec exec) {
  if (psi.size() != op.dim()) throw InvalidArgument("vector length does not match the operator");
  const double h2 = op.meta ? op.meta->grid.h() * op.meta->grid.h() : 1.0;
  return {h2 * kernels::symmetric_quadratic_form(op.matrix, psi, exec), h2 * psi.squaredNorm()};
}

}  // namespace lwire
