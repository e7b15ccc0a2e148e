#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "cylpc/geometry.hpp"

namespace cylpc {

struct LoadedCloud {
  PointCloud cloud;
  std::size_t dropped_points = 0;  // non-finite records skipped while loading
};

/// KITTI velodyne frame: consecutive little-endian float32 (x, y, z, reflectance).
/// Reflectance in [0, 1] maps to round(255 * r), clamped to [0, 255].
LoadedCloud load_kitti_bin(const std::filesystem::path& path);
void write_kitti_bin(const std::filesystem::path& path, const PointCloud& pc);

/// ASCII or binary_little_endian PLY with vertex properties x, y, z and an
/// intensity (or reflectance) property of any numeric type.
///
/// Intensities are mapped linearly onto [0, 255] from, in order of
/// preference: a "comment intensity_range <lo> <hi>" header line, the full
/// range of a uchar property, or the observed min/max of the file.
LoadedCloud load_ply(const std::filesystem::path& path);

enum class PlyEncoding { Ascii, BinaryLittleEndian };

// Writes double-precision x, y, z, intensity and declares intensity_range 0 255.
void write_ply(const std::filesystem::path& path, const PointCloud& pc,
               PlyEncoding encoding = PlyEncoding::Ascii);

// Dispatches on the extension: ".bin" or ".ply".
LoadedCloud load_point_cloud(const std::filesystem::path& path);

enum class IntensityModel { Constant, RangeDecay, Checker };

/// Spinning multi-beam sensor over a flat ground plane with box obstacles.
/// Points are in the sensor frame; the ground sits at z = -sensor_height.
struct SweepSpec {
  int beams = 64;
  double elevation_min = -24.8 * 0.017453292519943295;  // radians
  double elevation_max = 2.0 * 0.017453292519943295;
  double azimuth_step = 0.2 * 0.017453292519943295;
  double max_range = 80.0;
  double sensor_height = 1.73;
  double noise_sigma = 0.02;  // range noise, meters
  IntensityModel intensity = IntensityModel::RangeDecay;
  double intensity_noise = 2.0;  // 8-bit levels
  int boxes = 40;
};

// Deterministic for a given (spec, seed). May return an empty cloud.
PointCloud synth_sweep(const SweepSpec& spec, std::uint64_t seed);

}  // namespace cylpc
