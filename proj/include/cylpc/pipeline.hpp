#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cylpc/bitstream.hpp"
#include "cylpc/metrics.hpp"
#include "cylpc/octree.hpp"
#include "cylpc/raht.hpp"
#include "cylpc/voxelizer.hpp"

namespace cylpc {

// Octree depths that gave the best attribute coding for each system.
inline constexpr int kDefaultCartesianDepth = 16;
inline constexpr int kDefaultCylindricalDepth = 13;
inline constexpr std::array<double, 7> kDefaultQsteps{64, 32, 16, 8, 4, 2, 1};

int default_depth(CoordinateSystem system) noexcept;

struct GridParams {
  CoordinateSystem system = CoordinateSystem::Cylindrical;
  int depth = kDefaultCylindricalDepth;
  bool log_radial = false;
  double r_min = kDefaultRMin;
};

/// Geometry and transform work that does not depend on the quantizer step.
///
/// The transform runs on unit leaf weights: the decoder only sees occupancy,
/// so per-voxel point counts are not available to it.
struct PreparedFrame {
  VoxelizedCloud voxels;
  OccupancyStream geometry;
  CoefficientStream coefficients;
  std::size_t point_count = 0;
};

PreparedFrame prepare_frame(const PointCloud& pc, const GridParams& grid);

struct EncodedFrame {
  std::vector<std::uint8_t> bytes;
  std::size_t geometry_bytes = 0;
  std::size_t attribute_bytes = 0;
  std::size_t point_count = 0;
  std::size_t voxel_count = 0;

  std::size_t overhead_bytes() const noexcept { return bytes.size() - geometry_bytes - attribute_bytes; }
  double geometry_bpp() const;
  double attribute_bpp() const;
  double total_bpp() const;
};

EncodedFrame encode_prepared(const PreparedFrame& frame, double qstep);
EncodedFrame encode_frame(const PointCloud& pc, const GridParams& grid, double qstep);

struct DecodedFrame {
  BitstreamHeader header;
  VoxelizedCloud voxels;  // decoded attributes, clamped to [0, 255]; unit weights
  PointCloud cloud;       // voxel centers
};

DecodedFrame decode_frame(std::span<const std::uint8_t> bytes);

struct FrameEvaluation {
  double qstep = 0.0;
  double geometry_bpp = 0.0;
  double attribute_bpp = 0.0;
  double total_bpp = 0.0;
  // Original point intensities against the decoded intensity of their voxel.
  Psnr psnr = Psnr::lossless();
  double point_mse = 0.0;
  // Voxel (averaged) intensities against their decoded values.
  double voxel_mse = 0.0;
  std::size_t voxel_count = 0;
};

FrameEvaluation evaluate_prepared(const PointCloud& pc, const PreparedFrame& frame,
                                  std::span<const std::size_t> point_voxel, double qstep);

struct SweepResult {
  GridParams grid;
  double geometry_bpp = 0.0;
  std::vector<FrameEvaluation> runs;  // in qstep input order

  std::vector<RatePoint> rate_points() const;
};

/// One encode/decode per qstep; runs are spread over OpenMP threads.
SweepResult rd_sweep(const PointCloud& pc, const GridParams& grid, std::span<const double> qsteps);

struct SystemComparison {
  SweepResult cartesian;
  SweepResult cylindrical;
  BdResult bd;  // cylindrical relative to cartesian
};

SystemComparison compare_systems(const PointCloud& pc, int cartesian_depth, int cylindrical_depth,
                                 std::span<const double> qsteps, bool log_radial = false,
                                 double r_min = kDefaultRMin);

}  // namespace cylpc
