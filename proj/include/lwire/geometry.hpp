#pragma once

// Curves L with asymptotes on the rays of polar angle +beta and -beta.
//
// Two families: the broken line (Wedge) and the same asymptotes joined by a
// circular fillet of radius r tangent to both rays (FilletedWedge).  Both are
// symmetric under y -> -y and parametrized by arclength s, with s > 0 on the
// upper branch.  The convex side containing the positive x-axis far from the
// vertex is the interior region.

#include <string>
#include <utility>
#include <vector>

namespace lwire {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point mirror(Point p) noexcept { return {p.x, -p.y}; }

enum class CurveKind { Wedge, FilletedWedge };

struct CurveSpec {
  CurveKind kind = CurveKind::Wedge;
  double beta = 0.7853981633974483;  // half-angle between the asymptotes
  double fillet_radius = 0.0;

  void validate() const;

  static CurveSpec wedge(double beta) { return {CurveKind::Wedge, beta, 0.0}; }
  static CurveSpec filleted(double beta, double r) { return {CurveKind::FilletedWedge, beta, r}; }

  friend bool operator==(const CurveSpec&, const CurveSpec&) = default;
};

const char* to_string(CurveKind k);
CurveKind curve_kind_from_string(const std::string& s);

enum class BiasOrientation { InteriorBias, ExteriorBias };

const char* to_string(BiasOrientation o);
BiasOrientation orientation_from_string(const std::string& s);

enum class RegionLabel { Interior, Exterior, OnCurve };

const char* to_string(RegionLabel r);

struct Box {
  double x0, x1, y0, y1;
};

struct NearestPoint {
  double distance = 0.0;
  double s = 0.0;
};

/// Immutable evaluator for a CurveSpec.  Cheap to copy.
class Curve {
 public:
  explicit Curve(const CurveSpec& spec);

  const CurveSpec& spec() const noexcept { return spec_; }
  double beta() const noexcept { return spec_.beta; }
  double radius() const noexcept { return r_; }
  double sin_beta() const noexcept { return sb_; }
  double cos_beta() const noexcept { return cb_; }
  double tan_beta() const noexcept { return tb_; }

  /// Center of the fillet circle, on the positive x-axis (origin for a wedge).
  Point fillet_center() const noexcept { return {center_, 0.0}; }
  /// Distance from the asymptote crossing to the tangent points of the arc.
  double tangent_distance() const noexcept { return t0_; }
  /// Arclength from the symmetry point to either end of the arc; outside
  /// |s| > s_compact() the curve lies on its asymptotes.
  double s_compact() const noexcept { return half_arc_; }

  Point point_at(double s) const noexcept;
  /// Unit tangent dL/ds.
  Point tangent_at(double s) const noexcept;

  /// Distance to the curve and the arclength of a nearest point; ties go to
  /// the smaller |s|, then to s > 0.
  NearestPoint nearest(Point p) const noexcept;

  /// OnCurve within 1e-12 * max(1, |p|), else Interior/Exterior.
  RegionLabel classify(Point p) const noexcept;

  /// Length of L inside the closed axis-aligned box.
  double length_in_box(const Box& b) const noexcept;

  /// Arclength intervals [s_begin, s_end] of the pieces of L inside the box.
  /// Their total length equals length_in_box(b) up to rounding.
  std::vector<std::pair<double, double>> s_intervals_in_box(const Box& b) const;

  /// +infinity on straight parts, the fillet radius on the arc.  Throws
  /// CornerError at the wedge vertex.
  double curvature_radius(double s) const;

 private:
  // Parameter interval (t along the upper ray, phi along the upper half-arc)
  // inside the box; empty when hi <= lo.
  std::pair<double, double> upper_ray_interval(const Box& b) const noexcept;
  std::pair<double, double> upper_arc_interval(const Box& b) const noexcept;
  double upper_ray_length(const Box& b) const noexcept;
  double upper_arc_length(const Box& b) const noexcept;
  NearestPoint nearest_upper(Point p) const noexcept;
  bool inside_rounded_wedge(Point p) const noexcept;

  CurveSpec spec_;
  double r_;
  double sb_, cb_, tb_;
  double center_;    // r / sin(beta)
  double t0_;        // r / tan(beta)
  double half_arc_;  // r (pi/2 - beta)
  double phi_max_;   // pi/2 - beta
};

// Free-function forms of the Curve members.
Point point_at(const CurveSpec& c, double s);
RegionLabel classify_region(const CurveSpec& c, Point pt);
NearestPoint distance_to_curve(const CurveSpec& c, Point pt);
double cell_arclength(const CurveSpec& c, Point lower_left, double h);
double curvature_radius(const CurveSpec& c, double s);

}  // namespace lwire
