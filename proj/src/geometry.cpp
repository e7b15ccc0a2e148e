#include "cylpc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cylpc/error.hpp"

namespace cylpc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::InvalidConfig: return "invalid config";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::CorruptStream: return "corrupt stream";
    case ErrorKind::MalformedFile: return "malformed file";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "i/o error";
  }
  return "unknown";
}

PointCloud::PointCloud(std::vector<CartesianPoint> points, std::vector<double> attributes)
    : points_(std::move(points)), attributes_(std::move(attributes)) {
  if (points_.size() != attributes_.size()) {
    fail(ErrorKind::InvalidInput, "point cloud has " + std::to_string(points_.size()) +
                                      " points but " + std::to_string(attributes_.size()) +
                                      " attributes");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!is_finite(points_[i])) {
      fail(ErrorKind::InvalidInput, "point " + std::to_string(i) + " is not finite");
    }
    const double a = attributes_[i];
    if (!(a >= 0.0 && a <= 255.0)) {
      fail(ErrorKind::InvalidInput,
           "attribute " + std::to_string(i) + " outside [0, 255]: " + std::to_string(a));
    }
  }
}

bool is_finite(const CartesianPoint& p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

double wrap_angle(double theta) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta + std::numbers::pi, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  double wrapped = t - std::numbers::pi;
  if (wrapped >= std::numbers::pi) wrapped = -std::numbers::pi;
  return wrapped;
}

CylindricalPoint to_cylindrical(const CartesianPoint& p) {
  if (!is_finite(p)) fail(ErrorKind::InvalidInput, "to_cylindrical: non-finite point");
  CylindricalPoint c;
  c.r = std::hypot(p.x, p.y);
  c.h = p.z;
  if (p.x == 0.0 && p.y == 0.0) {
    c.theta = 0.0;
  } else {
    c.theta = std::atan2(p.y, p.x);
    // atan2 returns (-pi, pi]; the upper end belongs to -pi here.
    if (c.theta >= std::numbers::pi) c.theta = -std::numbers::pi;
  }
  return c;
}

CartesianPoint to_cartesian(const CylindricalPoint& p) {
  if (!std::isfinite(p.r) || !std::isfinite(p.theta) || !std::isfinite(p.h) || p.r < 0.0 ||
      p.theta < -std::numbers::pi || p.theta >= std::numbers::pi) {
    fail(ErrorKind::InvalidInput, "to_cartesian: cylindrical point violates invariants");
  }
  return {p.r * std::cos(p.theta), p.r * std::sin(p.theta), p.h};
}

namespace {

double expand(double extent, double magnitude) {
  return extent + kBoundsEpsilon * std::max({extent, magnitude, 1.0});
}

}  // namespace

BoundingCylinder bounding_cylinder(const PointCloud& pc) {
  if (pc.empty()) fail(ErrorKind::InvalidInput, "bounding_cylinder: empty point cloud");
  double r_max = 0.0;
  double h_lo = std::numeric_limits<double>::infinity();
  double h_hi = -std::numeric_limits<double>::infinity();
  for (const auto& p : pc.points()) {
    r_max = std::max(r_max, std::hypot(p.x, p.y));
    h_lo = std::min(h_lo, p.z);
    h_hi = std::max(h_hi, p.z);
  }
  BoundingCylinder b;
  b.radius = expand(r_max, r_max);
  b.h_min = h_lo;
  b.height = expand(h_hi - h_lo, std::max(std::abs(h_lo), std::abs(h_hi)));
  return b;
}

BoundingBox bounding_box(const PointCloud& pc) {
  if (pc.empty()) fail(ErrorKind::InvalidInput, "bounding_box: empty point cloud");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  CartesianPoint lo{kInf, kInf, kInf};
  CartesianPoint hi{-kInf, -kInf, -kInf};
  for (const auto& p : pc.points()) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  const double magnitude = std::max({std::abs(lo.x), std::abs(lo.y), std::abs(lo.z),
                                     std::abs(hi.x), std::abs(hi.y), std::abs(hi.z)});
  return {lo, expand(extent, magnitude)};
}

}  // namespace cylpc
