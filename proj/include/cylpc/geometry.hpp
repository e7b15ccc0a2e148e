#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace cylpc {

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const CartesianPoint&, const CartesianPoint&) = default;
};

// theta lives in the half-open interval [-pi, pi).
struct CylindricalPoint {
  double r = 0.0;
  double theta = 0.0;
  double h = 0.0;

  friend bool operator==(const CylindricalPoint&, const CylindricalPoint&) = default;
};

/// Points with one intensity attribute each, on the 8-bit scale [0, 255].
///
/// The container itself may be empty (a sensor sweep can legitimately return
/// nothing); every operation that needs points rejects an empty cloud.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::vector<CartesianPoint> points, std::vector<double> attributes);

  std::span<const CartesianPoint> points() const noexcept { return points_; }
  std::span<const double> attributes() const noexcept { return attributes_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<CartesianPoint> points_;
  std::vector<double> attributes_;
};

struct BoundingCylinder {
  double radius = 0.0;  // R
  double height = 0.0;  // H
  double h_min = 0.0;

  double volume() const noexcept { return std::numbers::pi * radius * radius * height; }
};

struct BoundingBox {
  CartesianPoint origin;
  double side = 0.0;  // W
};

// Relative expansion applied to tight bounds so that the maximum lands inside
// the last bin of a half-open partition.
inline constexpr double kBoundsEpsilon = 1e-9;

bool is_finite(const CartesianPoint& p) noexcept;

CylindricalPoint to_cylindrical(const CartesianPoint& p);
CartesianPoint to_cartesian(const CylindricalPoint& p);

/// Wraps any finite angle into [-pi, pi).
double wrap_angle(double theta) noexcept;

BoundingCylinder bounding_cylinder(const PointCloud& pc);
BoundingBox bounding_box(const PointCloud& pc);

}  // namespace cylpc
