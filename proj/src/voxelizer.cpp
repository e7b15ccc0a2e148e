#include "cylpc/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cylpc/error.hpp"
#include "cylpc/kernels.hpp"

namespace cylpc {

const char* to_string(CoordinateSystem system) noexcept {
  return system == CoordinateSystem::Cartesian ? "cartesian" : "cylindrical";
}

namespace {

void check_depth(int depth) {
  if (depth < 1 || depth > morton::kMaxDepth) {
    fail(ErrorKind::InvalidConfig,
         "depth must lie in [1, " + std::to_string(morton::kMaxDepth) + "], got " +
             std::to_string(depth));
  }
}

}  // namespace

VoxelGridConfig VoxelGridConfig::cartesian(const BoundingBox& box, int depth) {
  check_depth(depth);
  if (!(box.side > 0.0) || !std::isfinite(box.side) || !is_finite(box.origin)) {
    fail(ErrorKind::InvalidConfig, "cartesian grid needs a finite cube with side > 0");
  }
  VoxelGridConfig cfg;
  cfg.system_ = CoordinateSystem::Cartesian;
  cfg.depth_ = depth;
  cfg.box_ = box;
  cfg.finish();
  return cfg;
}

VoxelGridConfig VoxelGridConfig::cylindrical(const BoundingCylinder& cylinder, int depth,
                                             bool log_radial, double r_min) {
  check_depth(depth);
  if (!(cylinder.radius > 0.0) || !(cylinder.height > 0.0) || !std::isfinite(cylinder.radius) ||
      !std::isfinite(cylinder.height) || !std::isfinite(cylinder.h_min)) {
    fail(ErrorKind::InvalidConfig, "cylindrical grid needs finite R > 0 and H > 0");
  }
  if (log_radial) {
    if (!(r_min > 0.0) || !std::isfinite(r_min)) {
      fail(ErrorKind::InvalidConfig, "log-radial partition needs r_min > 0");
    }
    if (r_min >= cylinder.radius) {
      fail(ErrorKind::InvalidConfig, "log-radial partition needs r_min < R (r_min = " +
                                          std::to_string(r_min) +
                                          ", R = " + std::to_string(cylinder.radius) + ")");
    }
  }
  VoxelGridConfig cfg;
  cfg.system_ = CoordinateSystem::Cylindrical;
  cfg.depth_ = depth;
  cfg.log_radial_ = log_radial;
  cfg.r_min_ = r_min;
  cfg.cylinder_ = cylinder;
  cfg.finish();
  return cfg;
}

void VoxelGridConfig::finish() {
  if (system_ == CoordinateSystem::Cartesian) {
    axis_min_ = {box_.origin.x, box_.origin.y, box_.origin.z};
    axis_extent_ = {box_.side, box_.side, box_.side};
    return;
  }
  if (log_radial_) {
    axis_min_[0] = std::log(r_min_);
    axis_extent_[0] = std::log(cylinder_.radius) - std::log(r_min_);
  } else {
    axis_min_[0] = 0.0;
    axis_extent_[0] = cylinder_.radius;
  }
  axis_min_[1] = -std::numbers::pi;
  axis_extent_[1] = 2.0 * std::numbers::pi;
  axis_min_[2] = cylinder_.h_min;
  axis_extent_[2] = cylinder_.height;
}

std::array<double, 3> VoxelGridConfig::to_axes(const CartesianPoint& p) const {
  if (system_ == CoordinateSystem::Cartesian) return {p.x, p.y, p.z};
  const CylindricalPoint c = to_cylindrical(p);
  const double radial = log_radial_ ? std::log(std::max(c.r, r_min_)) : c.r;
  return {radial, c.theta, c.h};
}

std::array<std::int64_t, 3> VoxelGridConfig::bin(const CartesianPoint& p) const {
  const auto u = to_axes(p);
  std::array<std::int64_t, 3> b{};
  for (int a = 0; a < 3; ++a) {
    const double t = std::floor((u[a] - axis_min_[a]) / step(a));
    // Keep the cast defined for far-away points; anything this large is out of range anyway.
    b[a] = static_cast<std::int64_t>(std::clamp(t, -1.0, static_cast<double>(bins_per_axis())));
  }
  return b;
}

CartesianPoint VoxelGridConfig::center(const VoxelIndex& v) const {
  const std::array<std::uint32_t, 3> idx{v.i, v.j, v.k};
  std::array<double, 3> c{};
  for (int a = 0; a < 3; ++a) c[a] = axis_min_[a] + (idx[a] + 0.5) * step(a);
  if (system_ == CoordinateSystem::Cartesian) return {c[0], c[1], c[2]};
  const double r = log_radial_ ? std::exp(c[0]) : c[0];
  return to_cartesian({r, c[1], c[2]});
}

bool operator==(const VoxelGridConfig& a, const VoxelGridConfig& b) {
  return a.system_ == b.system_ && a.depth_ == b.depth_ && a.log_radial_ == b.log_radial_ &&
         a.r_min_ == b.r_min_ && a.box_.origin == b.box_.origin && a.box_.side == b.box_.side &&
         a.cylinder_.radius == b.cylinder_.radius && a.cylinder_.height == b.cylinder_.height &&
         a.cylinder_.h_min == b.cylinder_.h_min;
}

VoxelGridConfig make_config(const PointCloud& pc, CoordinateSystem system, int depth,
                            bool log_radial, double r_min) {
  if (system == CoordinateSystem::Cartesian) {
    return VoxelGridConfig::cartesian(bounding_box(pc), depth);
  }
  return VoxelGridConfig::cylindrical(bounding_cylinder(pc), depth, log_radial, r_min);
}

std::size_t VoxelizedCloud::point_count() const noexcept {
  std::size_t n = 0;
  for (const auto& v : voxels) n += v.weight;
  return n;
}

VoxelizedCloud voxelize(const PointCloud& pc, const VoxelGridConfig& cfg) {
  if (pc.empty()) fail(ErrorKind::InvalidInput, "voxelize: empty point cloud");
  const auto codes = kernels::parallel::voxel_codes(pc.points(), cfg);

  std::vector<std::uint32_t> order(codes.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return codes[a] < codes[b]; });

  const auto attrs = pc.attributes();
  VoxelizedCloud vc{cfg, {}};
  std::size_t i = 0;
  while (i < order.size()) {
    const std::uint64_t code = codes[order[i]];
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::uint32_t count = 0;
    for (; i < order.size() && codes[order[i]] == code; ++i) {
      const double a = attrs[order[i]];
      sum += a;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
      ++count;
    }
    // Rounding in the sum must not push the mean past its members.
    vc.voxels.push_back({code, std::clamp(sum / count, lo, hi), count});
  }
  return vc;
}

PointCloud devoxelize(const VoxelizedCloud& vc) {
  std::vector<CartesianPoint> points;
  std::vector<double> attrs;
  points.reserve(vc.voxels.size());
  attrs.reserve(vc.voxels.size());
  for (const auto& v : vc.voxels) {
    points.push_back(vc.config.center(v.index()));
    attrs.push_back(v.attribute);
  }
  return {std::move(points), std::move(attrs)};
}

std::vector<std::size_t> point_to_voxel(const PointCloud& pc, const VoxelizedCloud& vc) {
  const auto codes = kernels::parallel::voxel_codes(pc.points(), vc.config);
  std::vector<std::size_t> slot(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    auto it = std::lower_bound(
        vc.voxels.begin(), vc.voxels.end(), codes[i],
        [](const Voxel& v, std::uint64_t c) { return v.code < c; });
    if (it == vc.voxels.end() || it->code != codes[i]) {
      fail(ErrorKind::InvalidInput,
           "point " + std::to_string(i) + " falls in a voxel that is not occupied");
    }
    slot[i] = static_cast<std::size_t>(it - vc.voxels.begin());
  }
  return slot;
}

double voxelization_error_cartesian(const CartesianPoint& p, const CartesianPoint& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double dz = p.z - q.z;
  return dx * dx + dy * dy + dz * dz;
}

double voxelization_error_cylindrical(double r, double e1, double e2, double e3) {
  if (!(r >= 0.0)) fail(ErrorKind::InvalidInput, "voxelization_error_cylindrical: r < 0");
  // 1 - cos(e2) = 2 sin^2(e2 / 2) keeps precision for tiny angular errors.
  const double s = std::sin(0.5 * e2);
  return e1 * e1 + 2.0 * r * (r + e1) * (2.0 * s * s) + e3 * e3;
}

namespace {

void check_model(const ErrorModel& m) {
  if (!(m.sigma1_sq >= 0.0) || !(m.sigma2_sq >= 0.0) || !(m.sigma3_sq >= 0.0)) {
    fail(ErrorKind::InvalidInput, "error model variances must be >= 0");
  }
}

}  // namespace

double expected_error_cylindrical(double r, const ErrorModel& model) {
  check_model(model);
  return model.sigma1_sq + r * r * model.sigma2_sq + model.sigma3_sq;
}

double expected_error_cartesian(const ErrorModel& model) {
  check_model(model);
  return model.sigma1_sq + model.sigma2_sq + model.sigma3_sq;
}

double error_crossover_radius(const ErrorModel& cylindrical, const ErrorModel& cartesian) {
  const double base = expected_error_cylindrical(0.0, cylindrical);
  const double target = expected_error_cartesian(cartesian);
  if (target <= base) return 0.0;
  if (cylindrical.sigma2_sq == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt((target - base) / cylindrical.sigma2_sq);
}

std::vector<KnnSample> knn_mean_distance(const PointCloud& pc, std::size_t k) {
  if (k == 0) fail(ErrorKind::InvalidInput, "knn_mean_distance: k must be positive");
  if (pc.size() <= k) {
    fail(ErrorKind::InvalidInput, "knn_mean_distance: need more than k = " + std::to_string(k) +
                                      " points, got " + std::to_string(pc.size()));
  }
  const auto mean = kernels::parallel::knn_mean_distance(pc.points(), k);
  std::vector<KnnSample> out(mean.size());
  const auto pts = pc.points();
  for (std::size_t i = 0; i < mean.size(); ++i) {
    out[i] = {std::hypot(pts[i].x, pts[i].y), mean[i]};
  }
  return out;
}

OccupancyStats occupancy_stats(const VoxelizedCloud& vc) {
  if (vc.voxels.empty()) return {};
  return {vc.voxels.size(),
          static_cast<double>(vc.point_count()) / static_cast<double>(vc.voxels.size())};
}

}  // namespace cylpc
