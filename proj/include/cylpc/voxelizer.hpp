#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "cylpc/geometry.hpp"
#include "cylpc/morton.hpp"

namespace cylpc {

enum class CoordinateSystem : std::uint8_t { Cartesian = 0, Cylindrical = 1 };

const char* to_string(CoordinateSystem system) noexcept;

struct VoxelIndex {
  std::uint32_t i = 0;  // axis0: x or r
  std::uint32_t j = 0;  // axis1: y or theta
  std::uint32_t k = 0;  // axis2: z or h

  std::uint64_t code() const noexcept { return morton::encode(i, j, k); }
  static VoxelIndex from_code(std::uint64_t code) noexcept {
    return {morton::axis(code, 0), morton::axis(code, 1), morton::axis(code, 2)};
  }
  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
};

inline constexpr double kDefaultRMin = 1.0;

/// Separable partition of space into 2^depth bins per axis.
///
/// Cartesian grids bin (x, y, z) over a cube of side W. Cylindrical grids bin
/// (r, theta, h); with log_radial the radial axis is ln(max(r, r_min)) over
/// [ln r_min, ln R], so shells grow geometrically away from the sensor.
class VoxelGridConfig {
 public:
  static VoxelGridConfig cartesian(const BoundingBox& box, int depth);
  static VoxelGridConfig cylindrical(const BoundingCylinder& cylinder, int depth,
                                     bool log_radial = false, double r_min = kDefaultRMin);

  CoordinateSystem system() const noexcept { return system_; }
  int depth() const noexcept { return depth_; }
  bool log_radial() const noexcept { return log_radial_; }
  double r_min() const noexcept { return r_min_; }
  const BoundingBox& box() const noexcept { return box_; }
  const BoundingCylinder& cylinder() const noexcept { return cylinder_; }

  std::uint32_t bins_per_axis() const noexcept { return std::uint32_t{1} << depth_; }
  double axis_min(int axis) const noexcept { return axis_min_[axis]; }
  // W (Cartesian) or W_R, W_theta, W_H (cylindrical).
  double axis_extent(int axis) const noexcept { return axis_extent_[axis]; }
  // Q (Cartesian) or Q1, Q2, Q3 (cylindrical).
  double step(int axis) const noexcept { return axis_extent_[axis] / bins_per_axis(); }

  // Coordinates on the binned axes (after the cylindrical/log transform).
  std::array<double, 3> to_axes(const CartesianPoint& p) const;
  // Bin number per axis; may fall outside [0, 2^depth) for points outside the bounds.
  std::array<std::int64_t, 3> bin(const CartesianPoint& p) const;
  CartesianPoint center(const VoxelIndex& v) const;

  friend bool operator==(const VoxelGridConfig&, const VoxelGridConfig&);

 private:
  VoxelGridConfig() = default;
  void finish();

  CoordinateSystem system_ = CoordinateSystem::Cartesian;
  int depth_ = 1;
  bool log_radial_ = false;
  double r_min_ = kDefaultRMin;
  BoundingBox box_;
  BoundingCylinder cylinder_;
  std::array<double, 3> axis_min_{};
  std::array<double, 3> axis_extent_{};
};

VoxelGridConfig make_config(const PointCloud& pc, CoordinateSystem system, int depth,
                            bool log_radial = false, double r_min = kDefaultRMin);

struct Voxel {
  std::uint64_t code = 0;
  double attribute = 0.0;
  std::uint32_t weight = 0;

  VoxelIndex index() const noexcept { return VoxelIndex::from_code(code); }
};

struct VoxelizedCloud {
  VoxelGridConfig config;
  std::vector<Voxel> voxels;  // ascending by code, codes unique

  std::size_t point_count() const noexcept;
};

VoxelizedCloud voxelize(const PointCloud& pc, const VoxelGridConfig& cfg);
PointCloud devoxelize(const VoxelizedCloud& vc);

// Slot in vc.voxels holding each point of the source cloud.
std::vector<std::size_t> point_to_voxel(const PointCloud& pc, const VoxelizedCloud& vc);

/// Per-axis variances of the voxelization error.
struct ErrorModel {
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
  double sigma3_sq = 0.0;
};

double voxelization_error_cartesian(const CartesianPoint& p, const CartesianPoint& reconstructed);
/// Squared distance between (r, t, h) and (r + e1, t + e2, h + e3); independent of t.
double voxelization_error_cylindrical(double r, double e1, double e2, double e3);
double expected_error_cylindrical(double r, const ErrorModel& model);
// Sum of the per-axis variances, i.e. 3 sigma^2 for an isotropic model.
double expected_error_cartesian(const ErrorModel& model);

// Radius at which the cylindrical and Cartesian expectations coincide.
double error_crossover_radius(const ErrorModel& cylindrical, const ErrorModel& cartesian);

struct KnnSample {
  double r = 0.0;
  double mean_distance = 0.0;
};

std::vector<KnnSample> knn_mean_distance(const PointCloud& pc, std::size_t k);

struct OccupancyStats {
  std::size_t voxels = 0;
  double mean_points = 0.0;
};

OccupancyStats occupancy_stats(const VoxelizedCloud& vc);

}  // namespace cylpc
