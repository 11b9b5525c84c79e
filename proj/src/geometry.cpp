#include "lwire/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lwire/errors.hpp"

namespace lwire {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Prefer the smaller distance, then the smaller |s|, then s > 0.
bool better(const NearestPoint& a, const NearestPoint& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (std::abs(a.s) != std::abs(b.s)) return std::abs(a.s) < std::abs(b.s);
  return a.s > b.s;
}

Box mirror(const Box& b) { return {b.x0, b.x1, -b.y1, -b.y0}; }

}  // namespace

void CurveSpec::validate() const {
  if (!(beta > 0.0 && beta < kHalfPi)) {
    throw InvalidArgument("beta must lie in (0, pi/2)");
  }
  if (kind == CurveKind::Wedge && fillet_radius != 0.0) {
    throw InvalidArgument("a wedge has no fillet radius");
  }
  if (kind == CurveKind::FilletedWedge && !(fillet_radius > 0.0 && std::isfinite(fillet_radius))) {
    throw InvalidArgument("a filleted wedge needs a positive fillet radius");
  }
}

const char* to_string(CurveKind k) {
  return k == CurveKind::Wedge ? "wedge" : "filleted_wedge";
}

CurveKind curve_kind_from_string(const std::string& s) {
  if (s == "wedge") return CurveKind::Wedge;
  if (s == "filleted_wedge" || s == "filleted") return CurveKind::FilletedWedge;
  throw ConfigError("unknown curve kind '" + s + "'");
}

const char* to_string(BiasOrientation o) {
  return o == BiasOrientation::InteriorBias ? "interior" : "exterior";
}

BiasOrientation orientation_from_string(const std::string& s) {
  if (s == "interior") return BiasOrientation::InteriorBias;
  if (s == "exterior") return BiasOrientation::ExteriorBias;
  throw ConfigError("unknown bias orientation '" + s + "'");
}

const char* to_string(RegionLabel r) {
  switch (r) {
    case RegionLabel::Interior: return "Interior";
    case RegionLabel::Exterior: return "Exterior";
    case RegionLabel::OnCurve: return "OnCurve";
  }
  return "?";
}

Curve::Curve(const CurveSpec& spec) : spec_(spec) {
  spec_.validate();
  r_ = spec_.kind == CurveKind::Wedge ? 0.0 : spec_.fillet_radius;
  sb_ = std::sin(spec_.beta);
  cb_ = std::cos(spec_.beta);
  tb_ = sb_ / cb_;
  center_ = r_ / sb_;
  t0_ = r_ / tb_;
  phi_max_ = kHalfPi - spec_.beta;
  half_arc_ = r_ * phi_max_;
}

Point Curve::point_at(double s) const noexcept {
  if (r_ > 0.0 && std::abs(s) <= half_arc_) {
    const double phi = s / r_;
    return {center_ - r_ * std::cos(phi), r_ * std::sin(phi)};
  }
  const double t = t0_ + (std::abs(s) - half_arc_);
  return {t * cb_, std::copysign(t * sb_, s)};
}

Point Curve::tangent_at(double s) const noexcept {
  if (r_ > 0.0 && std::abs(s) <= half_arc_) {
    const double phi = s / r_;
    return {std::sin(phi), std::cos(phi)};
  }
  return s >= 0.0 ? Point{cb_, sb_} : Point{-cb_, sb_};
}

NearestPoint Curve::nearest_upper(Point p) const noexcept {
  // Upper straight branch: t >= t0 along (cos b, sin b).
  const double t = std::max(p.x * cb_ + p.y * sb_, t0_);
  NearestPoint best{std::hypot(p.x - t * cb_, p.y - t * sb_), half_arc_ + (t - t0_)};
  if (r_ <= 0.0) return best;

  // Upper half of the arc: (c - r cos phi, r sin phi), phi in [0, phi_max].
  const double vx = center_ - p.x;
  const double vy = p.y;
  const double rho = std::hypot(vx, vy);
  auto arc_point = [&](double phi) {
    return NearestPoint{std::hypot(p.x - (center_ - r_ * std::cos(phi)), p.y - r_ * std::sin(phi)),
                        r_ * phi};
  };
  NearestPoint arc;
  if (rho == 0.0) {
    arc = {r_, 0.0};
  } else {
    const double phi = std::atan2(vy, vx);
    if (phi >= 0.0 && phi <= phi_max_) {
      arc = {std::abs(rho - r_), r_ * phi};
    } else {
      const NearestPoint a0 = arc_point(0.0);
      const NearestPoint a1 = arc_point(phi_max_);
      arc = better(a0, a1) ? a0 : a1;
    }
  }
  return better(arc, best) ? arc : best;
}

NearestPoint Curve::nearest(Point p) const noexcept {
  const NearestPoint up = nearest_upper(p);
  NearestPoint low = nearest_upper(mirror(p));
  low.s = -low.s;
  return better(low, up) ? low : up;
}

bool Curve::inside_rounded_wedge(Point p) const noexcept {
  // The interior is the set of points closer than r to the wedge with apex
  // at the fillet center (for r = 0: the open wedge itself).
  const double qx = p.x - center_;
  const double qy = std::abs(p.y);
  const double side = qy * cb_ - qx * sb_;
  if (r_ <= 0.0) return side < 0.0;
  if (side <= 0.0) return true;
  const double t = qx * cb_ + qy * sb_;
  const double d = t <= 0.0 ? std::hypot(qx, qy) : side;
  return d < r_;
}

RegionLabel Curve::classify(Point p) const noexcept {
  const double tol = 1e-12 * std::max(1.0, std::hypot(p.x, p.y));
  if (nearest(p).distance <= tol) return RegionLabel::OnCurve;
  return inside_rounded_wedge(p) ? RegionLabel::Interior : RegionLabel::Exterior;
}

std::pair<double, double> Curve::upper_ray_interval(const Box& b) const noexcept {
  const double lo = std::max({t0_, b.x0 / cb_, b.y0 / sb_});
  const double hi = std::min(b.x1 / cb_, b.y1 / sb_);
  return {lo, hi};
}

std::pair<double, double> Curve::upper_arc_interval(const Box& b) const noexcept {
  constexpr std::pair<double, double> empty{0.0, 0.0};
  if (r_ <= 0.0) return empty;
  // Both coordinates of (c - r cos phi, r sin phi) increase on [0, phi_max],
  // so the part inside the box is a single phi-interval.
  const double c_lo = (center_ - b.x1) / r_;
  const double c_hi = (center_ - b.x0) / r_;
  if (c_hi < -1.0 || c_lo > 1.0) return empty;
  double lo = c_hi >= 1.0 ? 0.0 : std::acos(c_hi);
  double hi = c_lo <= -1.0 ? std::numbers::pi : std::acos(c_lo);

  const double s_lo = b.y0 / r_;
  const double s_hi = b.y1 / r_;
  if (s_hi < 0.0 || s_lo > 1.0) return empty;
  lo = std::max(lo, s_lo <= 0.0 ? 0.0 : std::asin(s_lo));
  hi = std::min(hi, s_hi >= 1.0 ? kHalfPi : std::asin(s_hi));
  return {std::max(lo, 0.0), std::min(hi, phi_max_)};
}

double Curve::upper_ray_length(const Box& b) const noexcept {
  const auto [lo, hi] = upper_ray_interval(b);
  return hi > lo ? hi - lo : 0.0;
}

double Curve::upper_arc_length(const Box& b) const noexcept {
  const auto [lo, hi] = upper_arc_interval(b);
  return hi > lo ? r_ * (hi - lo) : 0.0;
}

std::vector<std::pair<double, double>> Curve::s_intervals_in_box(const Box& b) const {
  std::vector<std::pair<double, double>> out;
  auto add_ray = [&](const Box& box, double sign) {
    const auto [lo, hi] = upper_ray_interval(box);
    if (hi > lo) {
      const double a = half_arc_ + (lo - t0_);
      const double e = half_arc_ + (hi - t0_);
      out.emplace_back(sign > 0 ? a : -e, sign > 0 ? e : -a);
    }
  };
  auto add_arc = [&](const Box& box, double sign) {
    const auto [lo, hi] = upper_arc_interval(box);
    if (hi > lo) {
      out.emplace_back(sign > 0 ? r_ * lo : -r_ * hi, sign > 0 ? r_ * hi : -r_ * lo);
    }
  };
  add_ray(b, 1.0);
  add_ray(mirror(b), -1.0);
  add_arc(b, 1.0);
  add_arc(mirror(b), -1.0);
  return out;
}

double Curve::length_in_box(const Box& b) const noexcept {
  // Lower pieces are evaluated as upper pieces in the mirrored box so that
  // mirrored boxes give bitwise identical lengths.
  const double rays = upper_ray_length(b) + upper_ray_length(mirror(b));
  const double arcs = upper_arc_length(b) + upper_arc_length(mirror(b));
  return rays + arcs;
}

double Curve::curvature_radius(double s) const {
  if (r_ <= 0.0) {
    if (s == 0.0) throw CornerError("curvature is undefined at the wedge vertex");
    return std::numeric_limits<double>::infinity();
  }
  return std::abs(s) <= half_arc_ ? r_ : std::numeric_limits<double>::infinity();
}

Point point_at(const CurveSpec& c, double s) { return Curve(c).point_at(s); }

RegionLabel classify_region(const CurveSpec& c, Point pt) { return Curve(c).classify(pt); }

NearestPoint distance_to_curve(const CurveSpec& c, Point pt) { return Curve(c).nearest(pt); }

double cell_arclength(const CurveSpec& c, Point lower_left, double h) {
  if (!(h > 0.0)) throw InvalidArgument("cell size must be positive");
  return Curve(c).length_in_box({lower_left.x, lower_left.x + h, lower_left.y, lower_left.y + h});
}

double curvature_radius(const CurveSpec& c, double s) { return Curve(c).curvature_radius(s); }

}  // namespace lwire
