#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "annulus/core.hpp"
#include "annulus/grid.hpp"

namespace annulus {

struct Circle {
  Vec2 center{};
  double radius = 1.0;
};

/// S_delta(x,r) = { y : | |y-x| - r | <= delta }.
struct Annulus {
  Circle circle{};
  double thickness = 0.0;

  void validate() const {
    if (!(circle.radius > 0.0)) throw std::invalid_argument("radius must be > 0");
    if (!(thickness > 0.0) || thickness >= circle.radius)
      throw std::invalid_argument("degenerate annulus: thickness must be in (0, radius)");
  }

  /// Shell area; equals 4*pi*r*delta whenever delta <= r.
  double area() const { return shell_area(circle.radius, thickness); }

  /// pi*((r+t)^2 - max(r-t,0)^2), the closed-form Lebesgue measure of
  /// S_t(x,r); reduces to 4*pi*r*t for t <= r.
  static double shell_area(double r, double t) {
    double outer = r + t;
    double inner = std::max(r - t, 0.0);
    return kPi * (outer * outer - inner * inner);
  }
};

struct TangencyParams {
  double delta_param = 0.0;  // | |x-y| - |r-s| |
  double dist_param = 0.0;   // |x-y| + |r-s|
};

/// Tangency and distance parameters of a circle pair; Delta = 0 iff the
/// circles are internally tangent, and Delta <= d always.
inline TangencyParams tangency_params(const Circle& c1, const Circle& c2) {
  double center_dist = dist(c1.center, c2.center);
  double radius_gap = std::abs(c1.radius - c2.radius);
  return {std::abs(center_dist - radius_gap), center_dist + radius_gap};
}

/// Distance between circles as points (x, r) of the parameter space R^3.
inline double parameter_dist(const Circle& c1, const Circle& c2) {
  double dr = c1.radius - c2.radius;
  return std::sqrt(dist2(c1.center, c2.center) + dr * dr);
}

/// Pixel-counted area of the intersection of two annuli, sampled at subcell
/// side min(thickness)/resolution_divisor. Accurate to within 5% of the true
/// area once resolution_divisor >= 32.
inline double annulus_intersection_area(const Annulus& a1, const Annulus& a2,
                                        int resolution_divisor) {
  a1.validate();
  a2.validate();
  if (resolution_divisor < 16) throw std::invalid_argument("resolution_divisor must be >= 16");
  const double px = std::min(a1.thickness, a2.thickness) / resolution_divisor;

  auto bounds = [&](const Annulus& a, double& xlo, double& xhi, double& ylo, double& yhi) {
    double R = a.circle.radius + a.thickness;
    xlo = a.circle.center.x - R;
    xhi = a.circle.center.x + R;
    ylo = a.circle.center.y - R;
    yhi = a.circle.center.y + R;
  };
  double x1lo, x1hi, y1lo, y1hi, x2lo, x2hi, y2lo, y2hi;
  bounds(a1, x1lo, x1hi, y1lo, y1hi);
  bounds(a2, x2lo, x2hi, y2lo, y2hi);
  double xlo = std::max(x1lo, x2lo), xhi = std::min(x1hi, x2hi);
  double ylo = std::max(y1lo, y2lo), yhi = std::min(y1hi, y2hi);
  if (xlo >= xhi || ylo >= yhi) return 0.0;

  // Count pixel centers in both rings one row at a time: each ring meets a
  // row in at most two column intervals, so a row costs O(1), not O(columns).
  auto row_intervals = [&](const Annulus& a, double y, double (&iv)[2][2]) -> int {
    double dy = y - a.circle.center.y;
    double outer = a.circle.radius + a.thickness;
    double inner = std::max(a.circle.radius - a.thickness, 0.0);
    double o2 = outer * outer - dy * dy;
    if (o2 <= 0.0) return 0;
    double ho = std::sqrt(o2);
    double i2 = inner * inner - dy * dy;
    double cx = a.circle.center.x;
    if (i2 <= 0.0) {
      iv[0][0] = cx - ho;
      iv[0][1] = cx + ho;
      return 1;
    }
    double hi = std::sqrt(i2);
    iv[0][0] = cx - ho;
    iv[0][1] = cx - hi;
    iv[1][0] = cx + hi;
    iv[1][1] = cx + ho;
    return 2;
  };

  std::int64_t count = 0;
  const std::int64_t col0 = 0;
  for (double y = ylo + px / 2.0; y < yhi; y += px) {
    double iv1[2][2], iv2[2][2];
    int n1 = row_intervals(a1, y, iv1);
    int n2 = row_intervals(a2, y, iv2);
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        double lo = std::max({iv1[i][0], iv2[j][0], xlo});
        double hi = std::min({iv1[i][1], iv2[j][1], xhi});
        if (lo >= hi) continue;
        // pixel centers at xlo + (k + 1/2) px
        std::int64_t klo = static_cast<std::int64_t>(std::ceil((lo - xlo) / px - 0.5));
        std::int64_t khi = static_cast<std::int64_t>(std::floor((hi - xlo) / px - 0.5));
        klo = std::max(klo, col0);
        if (khi >= klo) count += khi - klo + 1;
      }
    }
  }
  return static_cast<double>(count) * px * px;
}

/// Cells of `spec` whose centers lie in the annulus. Errors if the annulus
/// pokes out of the grid extent.
inline std::vector<CellSpan> rasterize_annulus(const Annulus& a, const GridSpec& spec) {
  a.validate();
  double reach = a.circle.radius + a.thickness;
  double xlo = a.circle.center.x - reach, xhi = a.circle.center.x + reach;
  double ylo = a.circle.center.y - reach, yhi = a.circle.center.y + reach;
  double gx1 = spec.origin.x + spec.nx * spec.delta;
  double gy1 = spec.origin.y + spec.ny * spec.delta;
  if (xlo < spec.origin.x || ylo < spec.origin.y || xhi > gx1 || yhi > gy1) {
    throw std::invalid_argument(
        "annulus exceeds grid extent: needs [" + std::to_string(xlo) + "," + std::to_string(xhi) +
        "]x[" + std::to_string(ylo) + "," + std::to_string(yhi) + "]");
  }
  return annulus_spans(a.circle.center, a.circle.radius, a.thickness, spec);
}

/// delta-neighborhood of an arc of length sqrt(delta/t) on `parent`.
struct TangencyRectangle {
  Circle parent{};
  double arc_center_angle = 0.0;
  double delta = 0.0;  // fine scale
  double t = 0.0;      // coarse scale

  void validate() const {
    if (!(delta > 0.0) || delta > t) throw std::invalid_argument("need 0 < delta <= t");
  }
  double arc_length() const { return std::sqrt(delta / t); }

  Vec2 point_at(double angle_offset, double radial_offset) const {
    double ang = arc_center_angle + angle_offset;
    double r = parent.radius + radial_offset;
    return {parent.center.x + r * std::cos(ang), parent.center.y + r * std::sin(ang)};
  }
};

namespace detail {

inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, 2.0 * kPi);
  if (d > kPi) d -= 2.0 * kPi;
  if (d < -kPi) d += 2.0 * kPi;
  return std::abs(d);
}

/// Membership of p in the (lambda*delta, t)-rectangle with the given arc
/// center on `parent`.
inline bool in_fattened_rectangle(Vec2 p, const Circle& parent, double arc_center_angle,
                                  double arc_length, double thickness) {
  constexpr double kTol = 1e-9;  // absorbs rounding at exact-boundary samples
  Vec2 rel = p - parent.center;
  double rho = rel.norm();
  if (std::abs(rho - parent.radius) > thickness * (1.0 + kTol)) return false;
  double ang = std::atan2(rel.y, rel.x);
  return angle_diff(ang, arc_center_angle) <=
         arc_length / (2.0 * parent.radius) * (1.0 + kTol);
}

/// Sample points of a rectangle: ~3 arc positions per delta of arc length
/// crossed with 3 radial offsets (the "9 x arc-length/delta" density).
inline std::vector<Vec2> rectangle_samples(const TangencyRectangle& r, int density_multiplier = 1) {
  int n_arc = std::max(3, static_cast<int>(std::ceil(3.0 * density_multiplier * r.arc_length() /
                                                     r.delta)));
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n_arc + 1) * 3);
  double half = r.arc_length() / (2.0 * r.parent.radius);
  for (int i = 0; i <= n_arc; ++i) {
    double ang = -half + 2.0 * half * i / n_arc;
    for (double rad : {-r.delta, 0.0, r.delta}) out.push_back(r.point_at(ang, rad));
  }
  return out;
}

}  // namespace detail

/// True iff a single (lambda*delta, t)-rectangle contains both rectangles,
/// tested by containment of dense samples of both arc-neighborhoods in a
/// lambda-fattened arc on either parent circle.
inline bool comparable(const TangencyRectangle& r1, const TangencyRectangle& r2, double lambda,
                       int sample_density = 1) {
  r1.validate();
  r2.validate();
  if (r1.t != r2.t) throw std::invalid_argument("mismatched coarse scale t");
  if (lambda < 1.0) throw std::invalid_argument("lambda must be >= 1");

  auto samples1 = detail::rectangle_samples(r1, sample_density);
  auto samples2 = detail::rectangle_samples(r2, sample_density);

  double fat = lambda * std::min(r1.delta, r2.delta);
  double arc = std::sqrt(fat / r1.t);

  for (const TangencyRectangle* host : {&r1, &r2}) {
    // candidate container: fattened arc on the host parent, centered on the
    // angle bisecting the two arc centers as seen from the host circle
    Vec2 other_center =
        host == &r1 ? r2.point_at(0.0, 0.0) : r1.point_at(0.0, 0.0);
    Vec2 rel = other_center - host->parent.center;
    double ang_other = std::atan2(rel.y, rel.x);
    double d = detail::angle_diff(ang_other, host->arc_center_angle);
    double ang_mid = host->arc_center_angle;
    if (d > 1e-12) {
      // rotate halfway toward the other arc
      double sgn = std::fmod(ang_other - host->arc_center_angle + 3 * kPi, 2 * kPi) - kPi > 0
                       ? 1.0
                       : -1.0;
      ang_mid += sgn * d / 2.0;
    }
    bool ok = true;
    for (const auto& sets : {samples1, samples2}) {
      for (Vec2 p : sets) {
        if (!detail::in_fattened_rectangle(p, host->parent, ang_mid, arc, fat)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace annulus
