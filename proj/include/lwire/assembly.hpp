#pragma once

// Finite-difference discretization of
//   H = -Laplace + V - alpha delta_L
// on a square box with Dirichlet walls.  The quadratic form
//   |grad psi|^2 + V |psi|^2 - alpha int_L |psi(L(s))|^2 ds
// is approximated node-wise: a 5-point Laplacian, V sampled at the nodes
// and the line measure alpha ds distributed over nodes.

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lwire/geometry.hpp"
#include "lwire/kernels.hpp"
#include "lwire/transverse.hpp"

namespace lwire {

/// Square box [cx - R, cx + R] x [cy - R, cy + R] with spacing h; 2R/h
/// intervals per axis, the boundary nodes carry the Dirichlet condition.
class Grid2D {
 public:
  Grid2D(double half_extent, double h, Point origin_offset = {});

  double half_extent() const noexcept { return half_; }
  double h() const noexcept { return h_; }
  Point origin_offset() const noexcept { return center_; }
  /// Interior nodes per axis.
  long nx() const noexcept { return n_; }
  long ny() const noexcept { return n_; }
  long size() const noexcept { return n_ * n_; }

  long index(long i, long j) const noexcept { return i + n_ * j; }
  double x(long i) const noexcept { return center_.x + static_cast<double>(2 * (i + 1) - n_ - 1) * (0.5 * h_); }
  double y(long j) const noexcept { return center_.y + static_cast<double>(2 * (j + 1) - n_ - 1) * (0.5 * h_); }
  Point node(long k) const noexcept { return {x(k % n_), y(k / n_)}; }

  /// Union of the node-centered cells [x - h/2, x + h/2] x [y - h/2, y + h/2].
  Box owned_region() const noexcept;
  /// Node index of the y -> -y image of node k (meaningful when cy == 0).
  long mirror_index(long k) const noexcept { return index(k % n_, n_ - 1 - k / n_); }

  friend bool operator==(const Grid2D& a, const Grid2D& b) {
    return a.half_ == b.half_ && a.h_ == b.h_ && a.center_ == b.center_;
  }

 private:
  double half_;
  double h_;
  Point center_;
  long n_;
};

/// How the line measure ds on L is spread over the nodes.
struct DeltaMode {
  enum class Kind { CellLumping, GaussianMollifier };
  Kind kind = Kind::CellLumping;
  double width_factor = 0.5;  // Gaussian width in units of h

  void validate() const;

  static DeltaMode lumping() { return {Kind::CellLumping, 0.5}; }
  static DeltaMode gaussian(double w = 0.5) { return {Kind::GaussianMollifier, w}; }

  friend bool operator==(const DeltaMode&, const DeltaMode&) = default;
};

const char* to_string(DeltaMode::Kind k);
DeltaMode::Kind delta_kind_from_string(const std::string& s);

struct OperatorMeta {
  PhysicsParams params;
  CurveSpec curve;
  BiasOrientation orientation = BiasOrientation::InteriorBias;
  Grid2D grid{1.0, 0.5};
  DeltaMode delta;
};

/// Assembled sparse symmetric matrix.  Operators built by
/// assemble_hamiltonian carry their metadata and the diagonal pieces; the
/// from_matrix form wraps an arbitrary symmetric matrix.
struct DiscreteOperator {
  SparseMatrix matrix;
  std::optional<OperatorMeta> meta;
  Eigen::VectorXd potential;   // V at each node
  Eigen::VectorXd line_mass;   // arclength attributed to each node

  long dim() const noexcept { return static_cast<long>(matrix.rows()); }

  /// Throws InvalidArgument unless m is square and exactly symmetric.
  static DiscreteOperator from_matrix(SparseMatrix m);
};

/// Validation used by the assembly: alpha >= 0 (0 gives the bare box) and
/// v0 >= 0.  Also checks the box/vertex and resolution preconditions.
void check_assembly_inputs(const PhysicsParams& p, const CurveSpec& c, const Grid2D& g);

DiscreteOperator assemble_hamiltonian(const PhysicsParams& p, const CurveSpec& c,
                                      BiasOrientation o, const Grid2D& g, const DeltaMode& m,
                                      Exec exec = Exec::Parallel);

/// Node-sampled bias: v0 on the biased side, 0 elsewhere (and on L).
Eigen::VectorXd potential_field(const PhysicsParams& p, const CurveSpec& c, BiasOrientation o,
                                const Grid2D& g, Exec exec = Exec::Parallel);

/// Arclength of L attributed to each node.  The total equals the length of
/// L inside g.owned_region().
Eigen::VectorXd line_mass(const CurveSpec& c, const Grid2D& g, const DeltaMode& m,
                          Exec exec = Exec::Parallel);

/// Writes `dim nnz` and then one `row col value` line per stored entry.
void export_coordinate(const DiscreteOperator& op, std::ostream& out);

/// Discrete quadratic form h^2 <psi, A psi> and squared norm h^2 |psi|^2 of a
/// node vector; their ratio is the Rayleigh quotient.
struct DiscreteForm {
  double energy = 0.0;
  double norm_sq = 0.0;
  double quotient() const { return energy / norm_sq; }
};
DiscreteForm discrete_form(const DiscreteOperator& op, const Eigen::VectorXd& psi,
                           Exec exec = Exec::Parallel);

}  // namespace lwire
